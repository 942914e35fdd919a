"""Built-in ten-task worked example, its published figures, and reproduction checks."""
from __future__ import annotations

from dataclasses import dataclass

from .cluster import closed_form_utilization
from .energy import PowerModel, compute_metrics, savings_percent, vm_energy
from .schedulers import SchedulerConfig, fitness_batch
from .simkernel import arrivals_at, run
from .workload import Dataset, dataset_from_rows

# tid, tat, tpt, tft, tcu, tdu, tiu
EXAMPLE_ROWS = (
    (1, 1, 25, 26, 30, 22, 30),
    (2, 1, 29, 30, 31, 21, 31),
    (3, 1, 23, 24, 32, 27, 32),
    (4, 2, 32, 34, 24, 25, 25),
    (5, 2, 24, 26, 30, 23, 31),
    (6, 2, 28, 30, 30, 31, 31),
    (7, 2, 31, 33, 22, 24, 22),
    (8, 3, 34, 37, 21, 24, 21),
    (9, 3, 35, 38, 27, 30, 27),
    (10, 3, 28, 31, 35, 30, 25),
)

EXPECTED_ASSIGNMENT = {
    "mceets": {1: [1, 2, 3], 2: [7, 4, 5, 8], 3: [6, 10, 9]},
    "maxutil": {1: [1, 2, 3], 2: [4, 5, 6], 3: [7, 8, 9], 4: [10]},
}

# published per-VM (UC, UD, UI)
PUBLISHED_UTIL = {
    "mceets": {1: (82.24, 61.30, 82.24), 2: (88.40, 83.20, 77.10), 3: (76.80, 76.60, 69.80)},
    "maxutil": {1: (84.44, 63.24, 84.44), 2: (73.00, 69.66, 75.70), 3: (65.10, 72.64, 65.10), 4: (35.00, 30.00, 25.00)},
}
# (policy, vm, resource index) entries that contradict the averaging formula applied to the stated assignment
INCONSISTENT_PUBLISHED = {("mceets", 2, 0), ("mceets", 2, 2), ("maxutil", 1, 0), ("maxutil", 1, 2)}
PUBLISHED_ENERGY = {
    "mceets": {1: 772.6, 2: 842.9, 3: 764.0},
    "maxutil": {1: 793.7, 2: 747.86, 3: 696.13, 4: 320.0},
}
PUBLISHED_TE = {"mceets": 2379.5, "maxutil": 2557.69}
PUBLISHED_SAVINGS = 6.96
PUBLISHED_VMS = {"mceets": 3, "maxutil": 4}

# fitness per arrival batch, keyed by task id; slot 1 is published, slots 2-3 are hand-evaluated
EXPECTED_FITNESS = {
    1: {1: 1.775, 2: 1.857, 3: 1.896},
    2: {4: 1.707, 5: 1.746, 6: 1.938, 7: 1.593},
    3: {8: 1.575, 9: 1.886, 10: 1.863},
}
# TE from the closed-form per-VM averages of the expected assignments
ORACLE_TE = {"mceets": 2388.9476, "maxutil": 2533.0587}

FITNESS_TOL = 1e-3
TIGHT_UTIL_TOL = 0.01
LOOSE_UTIL_TOL = 0.35
TE_TOL = 0.01
TE_REL_TOL = 0.015
TWO_ROUTE_RTOL = 1e-9

RESOURCES = ("UC", "UD", "UI")


def example_dataset(vm_count: int = 10) -> Dataset:
    return dataset_from_rows(EXAMPLE_ROWS, vm_count, label="worked_example")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class Reproduction:
    traces: dict
    metrics: dict
    oracle: dict
    checks: list[Check]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)


def reproduce(model: PowerModel = PowerModel(), lam: float = 0.5) -> Reproduction:
    ds = example_dataset()
    traces = {p: run(ds, SchedulerConfig(p, lam)) for p in ("mceets", "maxutil")}
    metrics = {p: compute_metrics(tr, model) for p, tr in traces.items()}
    oracle = {
        p: {vm: closed_form_utilization(led) for vm, led in sorted(tr.vm_ledgers.items())}
        for p, tr in traces.items()
    }
    checks: list[Check] = []

    for p, tr in traces.items():
        got = tr.vm_tasks()
        checks.append(Check(f"{p} assignment", got == EXPECTED_ASSIGNMENT[p], f"{got}"))

    for t, expected in EXPECTED_FITNESS.items():
        recs = {r.task_id: r.fitness for r in fitness_batch(arrivals_at(ds, t), lam)}
        worst = max(abs(recs[k] - v) for k, v in expected.items())
        checks.append(Check(f"fitness batch t={t}", worst <= FITNESS_TOL,
                            ", ".join(f"T{k}={recs[k]:.3f}" for k in sorted(recs))))

    worst_rel = 0.0
    for p, m in metrics.items():
        for v in m.per_vm:
            o = oracle[p][v.vm_id]
            for a, b in zip((v.summary.uc, v.summary.ud, v.summary.ui), (o.uc, o.ud, o.ui)):
                worst_rel = max(worst_rel, abs(a - b) / max(abs(b), 1e-300))
    checks.append(Check("per-slot vs closed-form averages", worst_rel <= TWO_ROUTE_RTOL, f"max rel diff {worst_rel:.2e}"))

    def util_check(p, vm, idx, tol):
        o = oracle[p][vm]
        got = (o.uc, o.ud, o.ui)[idx]
        pub = PUBLISHED_UTIL[p][vm][idx]
        return Check(f"{p} VM{vm} {RESOURCES[idx]} vs published", abs(got - pub) <= tol,
                     f"{got:.2f} vs {pub:.2f} (tol {tol})")

    checks += [util_check("mceets", 1, i, TIGHT_UTIL_TOL) for i in (0, 2)]
    checks += [util_check("mceets", 3, i, TIGHT_UTIL_TOL) for i in range(3)]
    checks += [util_check("maxutil", vm, i, LOOSE_UTIL_TOL) for vm in (2, 3, 4) for i in range(3)]

    oracle_te = {p: sum(vm_energy(s, model) for s in oracle[p].values()) for p in oracle}
    for p in ("mceets", "maxutil"):
        te = metrics[p].total_energy
        checks.append(Check(f"{p} TE formula-exact", abs(te - ORACLE_TE[p]) <= TE_TOL
                            and abs(oracle_te[p] - ORACLE_TE[p]) <= TE_TOL, f"{te:.4f} (expected {ORACLE_TE[p]})"))
        rel = abs(te - PUBLISHED_TE[p]) / PUBLISHED_TE[p]
        checks.append(Check(f"{p} TE within 1.5% of published", rel <= TE_REL_TOL,
                            f"{te:.2f} vs {PUBLISHED_TE[p]} ({100 * rel:.2f}%)"))
    checks.append(Check("MCEETS TE < MaxUtil TE",
                        metrics["mceets"].total_energy < metrics["maxutil"].total_energy))
    return Reproduction(traces, metrics, oracle_te, checks)


def render_report(rep: Reproduction) -> str:
    out = []
    for p in ("mceets", "maxutil"):
        name = rep.traces[p].config.display_name
        out.append(f"== {name} ==")
        out.append("assignment: " + "  ".join(
            f"VM{vm}={{{','.join(f'T{t}' for t in ts)}}}" for vm, ts in rep.traces[p].vm_tasks().items()))
        out.append(f"{'VM':<4}{'UC':>8}{'UD':>8}{'UI':>8}{'UV':>8}{'E':>9}   published UC/UD/UI, E")
        for v in rep.metrics[p].per_vm:
            s = v.summary
            pub = PUBLISHED_UTIL[p].get(v.vm_id)
            flags = "".join("!" if (p, v.vm_id, i) in INCONSISTENT_PUBLISHED else "" for i in range(3))
            pub_txt = "-" if pub is None else "/".join(f"{x:.2f}" for x in pub) + f", {PUBLISHED_ENERGY[p][v.vm_id]}"
            out.append(f"{v.vm_id:<4}{s.uc:8.2f}{s.ud:8.2f}{s.ui:8.2f}{s.uv:8.2f}{v.energy:9.2f}   {pub_txt}"
                       + ("  (inconsistent entries excluded)" if flags else ""))
        out.append(f"TE formula-exact {rep.metrics[p].total_energy:.2f}   published {PUBLISHED_TE[p]}")
        out.append(f"VMs used {rep.metrics[p].vms_used}   published {PUBLISHED_VMS[p]}")
        out.append("")
    ours = savings_percent(rep.metrics["mceets"].total_energy, rep.metrics["maxutil"].total_energy)
    pub = savings_percent(PUBLISHED_TE["mceets"], PUBLISHED_TE["maxutil"])
    out.append(f"savings formula-exact {ours:.2f}%   published TE pair {pub:.2f}% (stated {PUBLISHED_SAVINGS}%)")
    out.append("excluded published entries: " + ", ".join(
        f"{p} VM{vm} {RESOURCES[i]}" for p, vm, i in sorted(INCONSISTENT_PUBLISHED)))
    out.append("")
    out.extend(c.line() for c in rep.checks)
    out.append("RESULT: " + ("PASS" if rep.ok else "FAIL"))
    return "\n".join(out) + "\n"
