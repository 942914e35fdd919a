"""Task model, dataset validation, synthetic generation and the dataset CSV format."""
from __future__ import annotations

import io
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .errors import DemandOutOfRange, InconsistentFinish, InvalidSpec, NonPositiveField, ParseError, TaskError

HEADER = "tid,tat,tpt,tft,tcu,tdu,tiu"


@dataclass(frozen=True)
class UtilTriple:
    """CPU/disk/I-O utilization, in percent of one VM."""

    cpu: float = 0.0
    disk: float = 0.0
    io: float = 0.0

    def __add__(self, other: UtilTriple) -> UtilTriple:
        return UtilTriple(self.cpu + other.cpu, self.disk + other.disk, self.io + other.io)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.cpu, self.disk, self.io)

    def mean(self) -> float:
        return (self.cpu + self.disk + self.io) / 3


@dataclass(frozen=True)
class Task:
    id: int
    arrival: int
    duration: int
    finish: int
    demand: UtilTriple

    @property
    def cpu(self) -> float:
        return self.demand.cpu

    @property
    def disk(self) -> float:
        return self.demand.disk

    @property
    def io(self) -> float:
        return self.demand.io

    def as_row(self) -> tuple:
        return (self.id, self.arrival, self.duration, self.finish, *self.demand.as_tuple())


def _as_int(value, name: str, task_id=None) -> int:
    if isinstance(value, bool):
        raise NonPositiveField(f"{name} must be an integer, got {value!r}", task_id)
    if isinstance(value, (int, np.integer)):
        return int(value)
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise NonPositiveField(f"{name} must be an integer, got {value!r}", task_id) from None
    if not math.isfinite(f) or f != int(f):
        raise NonPositiveField(f"{name} must be an integer, got {value!r}", task_id)
    return int(f)


def validate_task(raw: Sequence) -> Task:
    """Build a Task from a ``(tid, tat, tpt, tft, tcu, tdu, tiu)`` record.

    ``tft`` may be ``None``, in which case it is derived. If supplied it must
    equal ``tat + tpt``.
    """
    if len(raw) != 7:
        raise TaskError(f"expected 7 fields, got {len(raw)}")
    tid = _as_int(raw[0], "tid")
    if tid < 1:
        raise NonPositiveField("tid must be >= 1", tid)
    tat = _as_int(raw[1], "tat", tid)
    tpt = _as_int(raw[2], "tpt", tid)
    if tat < 1:
        raise NonPositiveField(f"arrival must be >= 1, got {tat}", tid)
    if tpt < 1:
        raise NonPositiveField(f"duration must be >= 1, got {tpt}", tid)
    finish = tat + tpt
    if raw[3] is not None and _as_int(raw[3], "tft", tid) != finish:
        raise InconsistentFinish(f"tft={raw[3]} but tat+tpt={finish}", tid)
    demand = []
    for name, value in zip(("tcu", "tdu", "tiu"), raw[4:]):
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise DemandOutOfRange(f"{name} is not a number: {value!r}", tid) from None
        if not (0.0 <= v <= 100.0):
            raise DemandOutOfRange(f"{name}={value} outside [0, 100]", tid)
        demand.append(v)
    return Task(tid, tat, tpt, finish, UtilTriple(*demand))


@dataclass(frozen=True)
class Dataset:
    tasks: tuple[Task, ...]
    vm_count: int
    label: str = ""
    seed: int | None = None

    def __post_init__(self):
        if self.vm_count < 1:
            raise InvalidSpec(f"vm_count must be >= 1, got {self.vm_count}")
        tasks = tuple(sorted(self.tasks, key=lambda t: (t.arrival, t.id)))
        ids = [t.id for t in tasks]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise InvalidSpec(f"duplicate task ids: {dup[:5]}")
        object.__setattr__(self, "tasks", tasks)

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def horizon(self) -> int:
        return max((t.finish for t in self.tasks), default=0)


@dataclass(frozen=True)
class GenSpec:
    """Synthetic workload recipe. Ranges are inclusive integer bounds."""

    task_count: int = 100
    vm_count: int = 20
    instance_count: int = 10
    seed: int = 0
    arrival: tuple[int, int] = (1, 50)
    duration: tuple[int, int] = (20, 100)
    cpu: tuple[int, int] = (5, 20)
    disk: tuple[int, int] = (5, 20)
    io: tuple[int, int] = (5, 20)

    def validate(self) -> None:
        if self.task_count < 0:
            raise InvalidSpec("task_count must be >= 0")
        if self.vm_count < 1:
            raise InvalidSpec("vm_count must be >= 1")
        if self.instance_count < 1:
            raise InvalidSpec("instance_count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed must fit in an unsigned 64-bit integer")
        for name in ("arrival", "duration", "cpu", "disk", "io"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise InvalidSpec(f"{name} range [{lo}, {hi}] is empty")
            floor = 1 if name in ("arrival", "duration") else 0
            if lo < floor:
                raise InvalidSpec(f"{name} low bound must be >= {floor}")
            if name in ("cpu", "disk", "io") and hi > 100:
                raise InvalidSpec(f"{name} high bound must be <= 100")

    def label(self, instance_index: int) -> str:
        return f"{self.task_count}_{self.vm_count}_i{instance_index}"


def instance_rng(seed: int, instance_index: int) -> np.random.Generator:
    """PCG64 stream keyed by (seed, instance).

    Each field is then sampled as a column with
    ``Generator.integers(lo, hi, size=n, endpoint=True)``, in the order
    arrival, duration, cpu, disk, io.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, instance_index])))


def generate_dataset(spec: GenSpec, instance_index: int) -> Dataset:
    spec.validate()
    if not 1 <= instance_index <= spec.instance_count:
        raise InvalidSpec(f"instance_index {instance_index} outside [1, {spec.instance_count}]")
    rng = instance_rng(spec.seed, instance_index)
    n = spec.task_count
    cols = {
        name: rng.integers(*getattr(spec, name), size=n, endpoint=True)
        for name in ("arrival", "duration", "cpu", "disk", "io")
    }
    tasks = [
        validate_task((j + 1, int(cols["arrival"][j]), int(cols["duration"][j]), None,
                       int(cols["cpu"][j]), int(cols["disk"][j]), int(cols["io"][j])))
        for j in range(n)
    ]
    return Dataset(tuple(tasks), spec.vm_count, spec.label(instance_index), spec.seed)


def _fmt_num(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def write_dataset(ds: Dataset) -> bytes:
    buf = io.StringIO()
    seed = "none" if ds.seed is None else str(ds.seed)
    buf.write(f"# vm_count={ds.vm_count} seed={seed} label={ds.label}\n")
    buf.write(HEADER + "\n")
    for t in ds.tasks:
        buf.write(",".join(_fmt_num(v) for v in t.as_row()) + "\n")
    return buf.getvalue().encode("utf-8")


def _parse_meta(line: str) -> dict[str, str]:
    if not line.startswith("#"):
        raise ParseError("missing '# vm_count=... seed=... label=...' metadata line", 1)
    meta = {}
    body = line[1:].strip()
    # label is last and may contain spaces
    head, sep, label = body.partition("label=")
    for part in head.split():
        key, eq, val = part.partition("=")
        if not eq:
            raise ParseError(f"malformed metadata token {part!r}", 1)
        meta[key] = val
    if sep:
        meta["label"] = label.strip()
    return meta


def read_dataset(data: bytes | str) -> Dataset:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input", 1)
    meta = _parse_meta(lines[0])
    try:
        vm_count = int(meta["vm_count"])
    except (KeyError, ValueError):
        raise ParseError("vm_count missing or not an integer", 1) from None
    seed_text = meta.get("seed", "none")
    try:
        seed = None if seed_text in ("", "none") else int(seed_text)
    except ValueError:
        raise ParseError(f"seed is not an integer: {seed_text!r}", 1) from None
    if len(lines) < 2 or lines[1].strip().replace(" ", "") != HEADER:
        raise ParseError(f"expected header {HEADER!r}", 2)
    tasks = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 7:
            raise ParseError(f"expected 7 fields, got {len(fields)}", lineno)
        try:
            tasks.append(validate_task([f.strip() for f in fields]))
        except TaskError as exc:
            raise type(exc)(f"{exc} (line {lineno})") from exc
    try:
        return Dataset(tuple(tasks), vm_count, meta.get("label", ""), seed)
    except InvalidSpec as exc:
        raise ParseError(str(exc)) from exc


def dataset_from_rows(rows: Iterable[Sequence], vm_count: int, label: str = "", seed: int | None = None) -> Dataset:
    return Dataset(tuple(validate_task(r) for r in rows), vm_count, label, seed)
