"""Ordering and VM-selection policies: MCEETS and the MaxUtil baseline."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .cluster import Cluster, VmLedger
from .errors import InvalidSpec, NoCandidates, PoolExhausted
from .workload import Task

POLICIES = ("mceets", "maxutil")


@dataclass(frozen=True)
class SchedulerConfig:
    policy: str = "mceets"
    lam: float = 0.5
    tie_break: str = "ascending-id"

    def __post_init__(self):
        policy = self.policy.lower()
        if policy not in POLICIES:
            raise InvalidSpec(f"unknown policy {self.policy!r}; expected one of {POLICIES}")
        object.__setattr__(self, "policy", policy)
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidSpec(f"lambda must be in [0, 1], got {self.lam}")

    @property
    def display_name(self) -> str:
        return {"mceets": "MCEETS", "maxutil": "MaxUtil"}[self.policy]


@dataclass(frozen=True)
class FitnessRecord:
    task_id: int
    npt: float
    ncu: float
    ndu: float
    niu: float
    fitness: float


def _normalize(values: np.ndarray) -> np.ndarray:
    top = values.max()
    # an all-zero column normalizes to zeros instead of dividing by zero
    return values / top if top > 0 else np.zeros_like(values)


def fitness_batch(batch: Sequence[Task], lam: float = 0.5) -> list[FitnessRecord]:
    """Fitness of each task in one arrival batch.

    Every column is normalized by its maximum over this batch only, then
    ``fitness = lam * npt + (1 - lam) * (ncu + ndu + niu)``.
    """
    if not batch:
        raise ValueError("empty batch")
    if len({t.arrival for t in batch}) != 1:
        raise ValueError("batch mixes arrival slots")
    cols = np.array([(t.duration, t.cpu, t.disk, t.io) for t in batch], dtype=float)
    npt, ncu, ndu, niu = (_normalize(cols[:, k]) for k in range(4))
    fit = lam * npt + (1.0 - lam) * (ncu + ndu + niu)
    return [
        FitnessRecord(t.id, float(npt[i]), float(ncu[i]), float(ndu[i]), float(niu[i]), float(fit[i]))
        for i, t in enumerate(batch)
    ]


def order_batch(records: Sequence[FitnessRecord]) -> list[int]:
    """Task ids by ascending fitness, exact ties by ascending id."""
    return [r.task_id for r in sorted(records, key=lambda r: (r.fitness, r.task_id))]


def _argmax_lowest_id(vm_ids: Sequence[int], scores: np.ndarray) -> int:
    ids = np.asarray(vm_ids)
    return int(ids[scores == scores.max()].min())


def select_vm_mceets(vm_ids: Sequence[int], estimates) -> int:
    """Pick the candidate with the largest total normalized post-placement load.

    ``estimates[i]`` is the (cpu, disk, io) load of ``vm_ids[i]`` at the
    placement slot after hypothetically adding the task. Each resource is
    normalized by its maximum across candidates and the three are summed.
    """
    if len(vm_ids) == 0:
        raise NoCandidates("no suitable VM")
    est = np.asarray(estimates, dtype=float).reshape(len(vm_ids), 3)
    top = est.max(axis=0)
    norm = np.divide(est, top, out=np.zeros_like(est), where=top > 0)
    return _argmax_lowest_id(vm_ids, norm.sum(axis=1))


def select_vm_maxutil(vm_ids: Sequence[int], estimates) -> int:
    """Pick the candidate with the highest mean post-placement load."""
    if len(vm_ids) == 0:
        raise NoCandidates("no suitable VM")
    est = np.asarray(estimates, dtype=float).reshape(len(vm_ids), 3)
    return _argmax_lowest_id(vm_ids, est.sum(axis=1) / 3)


def next_vm_or_wake(cluster: Cluster, task_id: int, slot: int | None = None) -> VmLedger:
    """Wake the lowest-id sleeping VM, or raise PoolExhausted."""
    ledger = cluster.wake()
    if ledger is None:
        raise PoolExhausted(task_id, slot, cluster.vm_count)
    return ledger


def batch_order(batch: Sequence[Task], config: SchedulerConfig) -> list[Task]:
    """Processing order of one arrival batch under ``config``."""
    by_id = {t.id: t for t in batch}
    if config.policy == "mceets":
        return [by_id[i] for i in order_batch(fitness_batch(batch, config.lam))]
    return sorted(batch, key=lambda t: t.id)


def selector(config: SchedulerConfig):
    return select_vm_mceets if config.policy == "mceets" else select_vm_maxutil
