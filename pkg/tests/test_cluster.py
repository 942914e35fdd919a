import numpy as np
import pytest
from hypothesis import given

import oracles
from conftest import task_rows, to_dataset
from energysched.cluster import (
    VmLedger, average_utilization, can_host, can_host_at, closed_form_utilization, place, rebuild_load,
    slot_utilization,
)
from energysched.errors import CapacityViolation, EmptyVm
from energysched.workload import validate_task


def _task(ds, tid):
    return next(t for t in ds.tasks if t.id == tid)


def _vm(ds, *ids, vm_id=1):
    led = VmLedger(vm_id, ds.horizon)
    for i in ids:
        place(led, _task(ds, i))
    return led


def _rows(*ids):
    return [r for r in oracles.EXAMPLE if r[0] in ids]


def test_can_host_fits(example):
    led = _vm(example, 1, 2)
    assert slot_utilization(led, 1).as_tuple() == (61, 43, 61)
    assert can_host(led, _task(example, 3), 1)


def test_can_host_rejects_overflow(example):
    led = _vm(example, 1, 2, 3)
    assert not can_host(led, _task(example, 4), 2)


def test_empty_ledger_hosts_anything(example):
    assert all(can_host(VmLedger(1), t) for t in example.tasks)
    assert can_host(VmLedger(1), validate_task((1, 1, 1, 2, 100, 100, 100)))


def test_place_single(example):
    led = _vm(example, 1)
    assert all(slot_utilization(led, t).as_tuple() == (30, 22, 30) for t in range(1, 26))
    assert slot_utilization(led, 26).as_tuple() == (0, 0, 0)
    assert (led.first_start, led.last_finish) == (1, 26)
    assert led.state == "Active"


def test_place_overlap(example):
    led = _vm(example, 1, 2)
    assert all(slot_utilization(led, t).as_tuple() == (61, 43, 61) for t in range(1, 26))
    assert all(slot_utilization(led, t).as_tuple() == (31, 21, 31) for t in range(26, 30))


def test_place_without_room_raises(example):
    led = _vm(example, 1, 2, 3)
    with pytest.raises(CapacityViolation):
        place(led, _task(example, 4))


def test_slot_utilization(example):
    led = _vm(example, 1, 2, 3)
    assert slot_utilization(led, 10).as_tuple() == oracles.slot_load(_rows(1, 2, 3), 10) == (93, 70, 93)
    assert slot_utilization(led, 25).as_tuple() == (61, 43, 61)
    assert slot_utilization(led, 500).as_tuple() == (0, 0, 0)


def test_per_slot_view_is_sparse(example):
    led = _vm(example, 10)
    assert sorted(led.per_slot()) == list(range(3, 31))
    assert VmLedger(2).per_slot() == {}
    assert VmLedger(2).state == "Asleep"


def test_average_vm1(example):
    s = average_utilization(_vm(example, 1, 2, 3))
    assert s.busy_period == 29
    assert s.uc == pytest.approx((30 * 25 + 31 * 29 + 32 * 23) / 29)
    assert round(s.uc, 2) == 82.24


def test_average_vm3(example):
    s = average_utilization(_vm(example, 6, 10, 9))
    assert s.busy_period == 36
    assert (s.uc, s.ud, s.ui) == pytest.approx(oracles.busy_average(_rows(6, 9, 10)), rel=1e-12)
    assert (s.uc, s.ud, s.ui) == pytest.approx((2765 / 36, 2758 / 36, 2513 / 36), rel=1e-12)


def test_average_single(example):
    s = average_utilization(_vm(example, 10))
    assert (s.uc, s.ud, s.ui, s.uv) == (35.0, 30.0, 25.0, 30.0)


def test_average_asleep_raises():
    with pytest.raises(EmptyVm):
        average_utilization(VmLedger(1))
    with pytest.raises(EmptyVm):
        closed_form_utilization(VmLedger(1))


def _greedy(ds):
    """First-fit packing guarded by can_host; returns ledgers."""
    ledgers = []
    for t in ds.tasks:
        for led in ledgers:
            if can_host(led, t):
                place(led, t)
                break
        else:
            ledgers.append(place(VmLedger(len(ledgers) + 1), t))
    return ledgers


@given(task_rows(max_demand=100))
def test_capacity_safety(rows):
    for led in _greedy(to_dataset(rows)):
        assert np.all(led.load <= 100)


@given(task_rows(max_demand=100))
def test_arrival_only_sufficiency(rows):
    ledgers = []
    for t in to_dataset(rows).tasks:
        for led in ledgers:
            assert can_host(led, t) == can_host_at(led, t, t.arrival)
        for led in ledgers:
            if can_host(led, t):
                place(led, t)
                break
        else:
            ledgers.append(place(VmLedger(len(ledgers) + 1), t))


@given(task_rows())
def test_closed_form_matches_slot_sum(rows):
    for led in _greedy(to_dataset(rows)):
        a, b = average_utilization(led), closed_form_utilization(led)
        for x, y in zip((a.uc, a.ud, a.ui, a.uv), (b.uc, b.ud, b.ui, b.uv)):
            assert x == pytest.approx(y, rel=1e-9, abs=1e-12)
        assert a.uv == pytest.approx((a.uc + a.ud + a.ui) / 3)
        assert a.busy_period == led.last_finish - led.first_start


@given(task_rows())
def test_reconstruction(rows):
    for led in _greedy(to_dataset(rows)):
        assert np.array_equal(led.load, rebuild_load(led))
        members = [r for r in rows if r[0] in {p.task_id for p in led.assigned}]
        for t in range(len(led.load)):
            assert slot_utilization(led, t).as_tuple() == oracles.slot_load(members, t)
