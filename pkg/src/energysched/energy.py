"""Linear power model, per-VM and total energy, policy comparison."""
from __future__ import annotations

import json
from dataclasses import dataclass

from .cluster import UtilizationSummary, average_utilization
from .errors import DatasetMismatch, InvalidSpec
from .simkernel import ScheduleTrace


@dataclass(frozen=True)
class PowerModel:
    p_max: float = 30.0
    p_min: float = 20.0

    def __post_init__(self):
        if not self.p_max > self.p_min >= 0:
            raise InvalidSpec(f"need p_max > p_min >= 0, got p_max={self.p_max}, p_min={self.p_min}")


@dataclass(frozen=True)
class VmEnergy:
    vm_id: int
    summary: UtilizationSummary
    energy: float


@dataclass(frozen=True)
class EnergyMetrics:
    policy: str
    dataset: str
    per_vm: tuple[VmEnergy, ...]
    total_energy: float
    vms_used: int

    @property
    def uv_vector(self) -> list[float]:
        return [v.summary.uv for v in self.per_vm]

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "dataset": self.dataset,
            "te": self.total_energy,
            "vms_used": self.vms_used,
            "per_vm": [
                {"vm": v.vm_id, "uc": v.summary.uc, "ud": v.summary.ud, "ui": v.summary.ui,
                 "uv": v.summary.uv, "energy": v.energy}
                for v in self.per_vm
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


@dataclass(frozen=True)
class ComparisonReport:
    candidate: EnergyMetrics
    baseline: EnergyMetrics
    savings_percent: float
    vm_delta: int

    def to_dict(self) -> dict:
        return {
            "dataset": self.candidate.dataset,
            "candidate": self.candidate.to_dict(),
            "baseline": self.baseline.to_dict(),
            "savings_percent": self.savings_percent,
            "vm_delta": self.vm_delta,
        }


def vm_energy(summary: UtilizationSummary | float, model: PowerModel = PowerModel()) -> float:
    """``(p_max - p_min) * uv + p_min`` with uv as a percentage magnitude (75.26, not 0.7526)."""
    uv = summary.uv if isinstance(summary, UtilizationSummary) else float(summary)
    return (model.p_max - model.p_min) * uv + model.p_min


def compute_metrics(trace: ScheduleTrace, model: PowerModel = PowerModel()) -> EnergyMetrics:
    per_vm = []
    for vm_id, ledger in sorted(trace.vm_ledgers.items()):
        s = average_utilization(ledger)
        per_vm.append(VmEnergy(vm_id, s, vm_energy(s, model)))
    return EnergyMetrics(
        policy=trace.config.policy,
        dataset=trace.label,
        per_vm=tuple(per_vm),
        total_energy=sum(v.energy for v in per_vm),
        vms_used=len(per_vm),
    )


def savings_percent(te_candidate: float, te_baseline: float) -> float:
    return 100.0 * (te_baseline - te_candidate) / te_baseline if te_baseline else 0.0


def compare(candidate: EnergyMetrics, baseline: EnergyMetrics) -> ComparisonReport:
    """Savings of ``candidate`` relative to ``baseline``; negative when the candidate is worse."""
    if candidate.dataset != baseline.dataset:
        raise DatasetMismatch(f"{candidate.dataset!r} vs {baseline.dataset!r}")
    return ComparisonReport(
        candidate,
        baseline,
        savings_percent(candidate.total_energy, baseline.total_energy),
        candidate.vms_used - baseline.vms_used,
    )
