import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from energysched.example import example_dataset  # noqa: E402
from energysched.workload import dataset_from_rows  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def example():
    return example_dataset()


@st.composite
def task_rows(draw, max_tasks=25, max_arrival=8, max_duration=12, max_demand=60):
    """Oracle-format rows (tid, tat, tpt, tcu, tdu, tiu) with unique ids."""
    n = draw(st.integers(0, max_tasks))
    rows = []
    for tid in range(1, n + 1):
        rows.append((
            tid,
            draw(st.integers(1, max_arrival)),
            draw(st.integers(1, max_duration)),
            draw(st.integers(0, max_demand)),
            draw(st.integers(0, max_demand)),
            draw(st.integers(0, max_demand)),
        ))
    return rows


def to_dataset(rows, vm_count=None, label="h"):
    full = [(r[0], r[1], r[2], None, r[3], r[4], r[5]) for r in rows]
    return dataset_from_rows(full, vm_count or max(len(rows), 1), label)


ACCEPTANCE: dict[str, list[tuple[bool, str]]] = {}


def record(criterion: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=int):
        parts = ACCEPTANCE[crit]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {crit}: {status}")
        for ok, detail in parts:
            terminalreporter.write_line(f"    [{'ok' if ok else 'FAIL'}] {detail}")
