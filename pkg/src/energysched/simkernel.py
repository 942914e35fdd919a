"""Discrete-time simulation driver and schedule traces."""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .cluster import Cluster, VmLedger, average_utilization, place, rebuild_load
from .schedulers import SchedulerConfig, batch_order, next_vm_or_wake, selector
from .workload import Dataset, Task, UtilTriple


class Assignment(NamedTuple):
    task_id: int
    vm_id: int
    start: int
    end: int


class GanttRow(NamedTuple):
    vm_id: int
    task_id: int
    start: int
    end: int
    demand: UtilTriple


@dataclass
class ScheduleTrace:
    label: str
    config: SchedulerConfig
    assignments: list[Assignment]
    vm_ledgers: dict[int, VmLedger]
    horizon: int
    tasks: dict[int, Task] = field(repr=False, default_factory=dict)

    @property
    def vms_used(self) -> int:
        return len(self.vm_ledgers)

    def vm_tasks(self) -> dict[int, list[int]]:
        """Task ids per VM in placement order."""
        return {vm: [p.task_id for p in led.assigned] for vm, led in sorted(self.vm_ledgers.items())}


def max_arrival_time(dataset: Dataset) -> int:
    return max((t.arrival for t in dataset.tasks), default=0)


def arrivals_at(dataset: Dataset, t: int) -> list[Task]:
    return sorted((task for task in dataset.tasks if task.arrival == t), key=lambda task: task.id)


def run(dataset: Dataset, config: SchedulerConfig | None = None) -> ScheduleTrace:
    """Schedule every task of ``dataset`` at its arrival slot.

    Raises PoolExhausted when a task fits on no awake VM and none is left to wake.
    """
    config = config or SchedulerConfig()
    select = selector(config)
    cluster = Cluster(dataset.vm_count, dataset.horizon)
    batches: dict[int, list[Task]] = defaultdict(list)
    for task in dataset.tasks:
        batches[task.arrival].append(task)

    assignments: list[Assignment] = []
    # only slots with arrivals can change placements; later slots are pure accounting
    for t in sorted(batches):
        for task in batch_order(batches[t], config):
            fits = cluster.suitable(task, t)
            if fits.size == 0:
                ledger = next_vm_or_wake(cluster, task.id, t)
            else:
                est = cluster.load[fits, t] + task.demand.as_tuple()
                ledger = cluster.ledger(select(fits + 1, est))
            place(ledger, task)
            assignments.append(Assignment(task.id, ledger.vm_id, task.arrival, task.finish))

    return ScheduleTrace(
        label=dataset.label,
        config=config,
        assignments=assignments,
        vm_ledgers={led.vm_id: led for led in cluster.ledgers},
        horizon=dataset.horizon,
        tasks={t.id: t for t in dataset.tasks},
    )


def replay(trace: ScheduleTrace) -> dict[int, VmLedger]:
    """Rebuild ledgers from the assignment list alone."""
    ledgers: dict[int, VmLedger] = {}
    for a in trace.assignments:
        led = ledgers.get(a.vm_id)
        if led is None:
            led = ledgers[a.vm_id] = VmLedger(a.vm_id, trace.horizon)
        place(led, trace.tasks[a.task_id])
    return ledgers


def ledgers_equal(a: VmLedger, b: VmLedger) -> bool:
    n = max(len(a.load), len(b.load))
    la = np.zeros((n, 3)); la[: len(a.load)] = a.load
    lb = np.zeros((n, 3)); lb[: len(b.load)] = b.load
    return (
        a.vm_id == b.vm_id
        and a.assigned == b.assigned
        and a.first_start == b.first_start
        and a.last_finish == b.last_finish
        and np.array_equal(la, lb)
        and np.array_equal(a.load, rebuild_load(a))
    )


def gantt(trace: ScheduleTrace) -> list[GanttRow]:
    rows = [GanttRow(a.vm_id, a.task_id, a.start, a.end, trace.tasks[a.task_id].demand) for a in trace.assignments]
    return sorted(rows, key=lambda r: (r.vm_id, r.start, r.task_id))


def gantt_csv(trace: ScheduleTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["vm", "task", "start", "end", "cpu", "disk", "io"])
    for r in gantt(trace):
        w.writerow([r.vm_id, r.task_id, r.start, r.end, *(repr(v) for v in r.demand.as_tuple())])
    return buf.getvalue()


def trace_to_dict(trace: ScheduleTrace) -> dict:
    vms = []
    for vm_id, led in sorted(trace.vm_ledgers.items()):
        s = average_utilization(led)
        vms.append({"vm": vm_id, "tasks": [p.task_id for p in led.assigned], "first_start": led.first_start,
                    "last_finish": led.last_finish, "uc": s.uc, "ud": s.ud, "ui": s.ui, "uv": s.uv})
    return {
        "dataset": trace.label,
        "policy": trace.config.policy,
        "lambda": trace.config.lam,
        "horizon": trace.horizon,
        "assignments": [{"task": a.task_id, "vm": a.vm_id, "start": a.start, "end": a.end} for a in trace.assignments],
        "vms": vms,
    }


def trace_json(trace: ScheduleTrace) -> str:
    return json.dumps(trace_to_dict(trace), indent=2) + "\n"
