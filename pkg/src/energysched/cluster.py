"""Per-VM resource ledgers over discrete time slots.

A task occupies the half-open slot interval ``[arrival, finish)``. A VM's busy
period runs from its first task start to its last task finish, and that span
is the divisor of its time-averaged utilization.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapacityViolation, EmptyVm
from .workload import Task, UtilTriple

CAPACITY = 100.0
# slack for non-integer demands; integer demands sum exactly
EPS = 1e-9


class Placement(NamedTuple):
    task_id: int
    start: int
    end: int
    demand: UtilTriple


@dataclass(frozen=True)
class UtilizationSummary:
    uc: float
    ud: float
    ui: float
    uv: float
    busy_period: int


class VmLedger:
    """Committed utilization of one VM, indexed by slot.

    ``load[t]`` is the (cpu, disk, io) sum of every assigned task running in
    slot ``t``. A ledger created by :class:`Cluster` shares its storage with
    the cluster's stacked array so pool-wide queries stay vectorized.
    """

    def __init__(self, vm_id: int, horizon: int = 0, load: np.ndarray | None = None):
        self.vm_id = vm_id
        self.load = np.zeros((horizon + 1, 3)) if load is None else load
        self.assigned: list[Placement] = []
        self.first_start: int | None = None
        self.last_finish: int | None = None

    @property
    def active(self) -> bool:
        return bool(self.assigned)

    @property
    def state(self) -> str:
        return "Active" if self.assigned else "Asleep"

    def _ensure(self, end: int) -> None:
        if end > len(self.load):
            grown = np.zeros((end, 3))
            grown[: len(self.load)] = self.load
            self.load = grown

    def per_slot(self) -> dict[int, UtilTriple]:
        """Sparse view over the busy window."""
        if not self.assigned:
            return {}
        return {t: UtilTriple(*map(float, self.load[t])) for t in range(self.first_start, self.last_finish)}

    def __repr__(self) -> str:
        ids = [p.task_id for p in self.assigned]
        return f"VmLedger(vm_id={self.vm_id}, tasks={ids})"


def _interval_fits(load: np.ndarray, start: int, end: int, demand: np.ndarray) -> bool:
    window = load[start:min(end, len(load))]
    if window.size == 0:
        return bool(np.all(demand <= CAPACITY + EPS))
    return bool(np.all(window + demand <= CAPACITY + EPS))


def can_host(ledger: VmLedger, task: Task, t: int | None = None) -> bool:
    """True iff the task fits in every slot of ``[t, t + duration)``."""
    start = task.arrival if t is None else t
    return _interval_fits(ledger.load, start, start + task.duration, np.asarray(task.demand.as_tuple()))


def can_host_at(ledger: VmLedger, task: Task, t: int) -> bool:
    """Single-slot variant: checks slot ``t`` only."""
    committed = ledger.load[t] if t < len(ledger.load) else np.zeros(3)
    return bool(np.all(committed + np.asarray(task.demand.as_tuple()) <= CAPACITY + EPS))


def place(ledger: VmLedger, task: Task) -> VmLedger:
    """Commit ``task`` to ``ledger`` over ``[arrival, finish)``. Mutates and returns the ledger."""
    if not can_host(ledger, task):
        raise CapacityViolation(f"task {task.id} does not fit on VM {ledger.vm_id} over [{task.arrival}, {task.finish})")
    ledger._ensure(task.finish)
    ledger.load[task.arrival:task.finish] += task.demand.as_tuple()
    ledger.assigned.append(Placement(task.id, task.arrival, task.finish, task.demand))
    ledger.first_start = task.arrival if ledger.first_start is None else min(ledger.first_start, task.arrival)
    ledger.last_finish = task.finish if ledger.last_finish is None else max(ledger.last_finish, task.finish)
    return ledger


def slot_utilization(ledger: VmLedger, t: int) -> UtilTriple:
    if 0 <= t < len(ledger.load):
        return UtilTriple(*map(float, ledger.load[t]))
    return UtilTriple()


def average_utilization(ledger: VmLedger) -> UtilizationSummary:
    """Time-averaged utilization by summing the per-slot ledger over the busy period."""
    if not ledger.assigned:
        raise EmptyVm(f"VM {ledger.vm_id} is asleep")
    busy = ledger.last_finish - ledger.first_start
    uc, ud, ui = (ledger.load[ledger.first_start:ledger.last_finish].sum(axis=0) / busy).tolist()
    return UtilizationSummary(uc, ud, ui, (uc + ud + ui) / 3, busy)


def closed_form_utilization(ledger: VmLedger) -> UtilizationSummary:
    """Same quantity as :func:`average_utilization`, as sum(demand * duration) / busy period."""
    if not ledger.assigned:
        raise EmptyVm(f"VM {ledger.vm_id} is asleep")
    busy = ledger.last_finish - ledger.first_start
    sums = [0.0, 0.0, 0.0]
    for p in ledger.assigned:
        d = p.end - p.start
        sums[0] += p.demand.cpu * d
        sums[1] += p.demand.disk * d
        sums[2] += p.demand.io * d
    uc, ud, ui = (s / busy for s in sums)
    return UtilizationSummary(uc, ud, ui, (uc + ud + ui) / 3, busy)


def rebuild_load(ledger: VmLedger) -> np.ndarray:
    """Recompute the per-slot array from the assignment list alone."""
    load = np.zeros_like(ledger.load)
    for p in ledger.assigned:
        load[p.start:p.end] += p.demand.as_tuple()
    return load


class Cluster:
    """Pool of ``vm_count`` homogeneous VMs, woken lowest id first.

    All ledgers are views into one ``(vm_count, horizon + 1, 3)`` array.
    """

    def __init__(self, vm_count: int, horizon: int):
        self.vm_count = vm_count
        self.horizon = horizon
        self.load = np.zeros((vm_count, horizon + 1, 3))
        self.ledgers: list[VmLedger] = []

    @property
    def awake(self) -> int:
        return len(self.ledgers)

    def wake(self) -> VmLedger | None:
        """Wake the lowest-id sleeping VM; ``None`` when the pool is exhausted."""
        k = len(self.ledgers)
        if k >= self.vm_count:
            return None
        ledger = VmLedger(k + 1, load=self.load[k])
        self.ledgers.append(ledger)
        return ledger

    def ledger(self, vm_id: int) -> VmLedger:
        return self.ledgers[vm_id - 1]

    def suitable(self, task: Task, t: int) -> np.ndarray:
        """Indices (0-based) of awake VMs whose slot-``t`` load admits ``task``.

        Every committed task started at or before ``t`` and runs without
        preemption, so load over ``[t, inf)`` never rises; slot ``t`` is the
        binding slot. :func:`place` still checks the full interval.
        """
        k = len(self.ledgers)
        if k == 0:
            return np.empty(0, dtype=int)
        est = self.load[:k, t] + task.demand.as_tuple()
        return np.flatnonzero(np.all(est <= CAPACITY + EPS, axis=1))
