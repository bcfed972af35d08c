import math
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlops.errors import DomainError, InfeasibleError
from qlops.model import AncillaCheck, GridLayout, HardwareParams, Rect, load_config
from qlops.report import packaged_config
from qlops.sec import (
    GATE_2Q,
    MOVE,
    READOUT,
    PREP,
    atom_surface_schedule,
    atom_surface_sec_length,
    choose_parking,
    move_time,
    schedule_gb_sec,
    surface_sec_length,
)

from oracles import move_us
from reference_data import GB_MEMORY, NA_FUTURE, SC_CURRENT, SC_FUTURE
from strategies import check_parking_against_rescan, small_layouts

NA = HardwareParams(name="na", kind="neutral_atom", **NA_FUTURE)
SC_TIMES = ("gate_time_1q", "gate_time_2q", "readout_time", "prep_time")
NA_TIMES = SC_TIMES + ("movement_accel",)


def test_surface_current():
    assert surface_sec_length(HardwareParams(name="c", kind="superconducting", **SC_CURRENT)) == pytest.approx(8.6e-7, rel=1e-12)


def test_surface_future():
    assert surface_sec_length(HardwareParams(name="f", kind="superconducting", **SC_FUTURE)) == pytest.approx(4.0e-7, rel=1e-12)


def test_surface_zero_times():
    zero = {**SC_CURRENT, **{f: 0.0 for f in SC_TIMES}}
    assert surface_sec_length(HardwareParams(name="z", kind="superconducting", **zero)) == 0.0


def test_surface_rejects_atoms():
    with pytest.raises(DomainError):
        surface_sec_length(NA)


def test_move_time_examples():
    assert move_time(5, 0.02) == pytest.approx(38.7298e-6, abs=5e-11)
    assert move_time(5, 0.02) == pytest.approx(move_us(5, 0.02) * 1e-6, rel=1e-15)
    assert move_time(0, 0.02) == 0.0
    assert move_time(20, 0.02) == pytest.approx(2 * move_time(5, 0.02), rel=1e-15)


def test_move_time_bad_acceleration():
    with pytest.raises(DomainError):
        move_time(5, 0.0)


def toy_layout(parking):
    check = AncillaCheck("z0", (0, 0), ((0, 1),))
    return GridLayout((1, 2), ((0, 1),), (), (check,), tuple(parking))


def test_toy_single_check_schedule():
    # parked 1 site from home, home 1 site from the data qubit: out, gate, back
    layout = toy_layout([Rect(0, 0, 0, 0)])
    sched = schedule_gb_sec(layout, NA)
    kinds = [s.kind for s in sched.steps]
    assert kinds == [PREP, MOVE, GATE_2Q, MOVE, READOUT]
    hop = math.sqrt(6 * 5 / 0.02) * 1e-6
    assert sched.total == pytest.approx(2 * hop + 0.2e-6, rel=1e-12)
    assert [s.distance for s in sched.steps if s.kind == MOVE] == [5.0, 5.0]


def test_toy_parking_one_site_away():
    # slot at column -1 is 2 sites from the data qubit
    layout = GridLayout((1, 2), ((0, 1),), (), (AncillaCheck("z0", (0, 1), ((0, 0),)),), (Rect(0, -1, 0, -1),))
    sched = schedule_gb_sec(layout, NA)
    assert sched.total == pytest.approx(2 * move_time(10, 0.02) + 0.2e-6, rel=1e-12)


def test_dominating_candidate_selected():
    near, far = Rect(1, 0, 1, 0), Rect(4, 0, 4, 0)
    check = AncillaCheck("z0", (0, 0), ((0, 0),))
    for order, expect in (((far, near), 1), ((near, far), 0)):
        layout = GridLayout((5, 1), ((0, 0),), (), (check,), order)
        _, place_z, _ = choose_parking(layout, NA)
        assert place_z[0] == expect


def test_infeasible_when_group_cannot_fit():
    checks = (AncillaCheck("a", (0, 0), ((0, 0),)), AncillaCheck("b", (0, 1), ((0, 0),)))
    layout = GridLayout((2, 2), ((0, 0), (0, 1)), (), checks, (Rect(3, 0, 3, 0),))
    with pytest.raises(InfeasibleError):
        schedule_gb_sec(layout, NA)


def na_platform():
    return load_config(packaged_config()).platforms["na-future"]


def gb_layout(code):
    return load_config(packaged_config()).codes[code].layout


def test_smallest_gb_layout_within_quarter_of_published():
    t = schedule_gb_sec(gb_layout("gb-72"), na_platform()).total
    assert 1e-3 <= t < 1e-2
    assert abs(t / GB_MEMORY["72Z"][4] - 1) <= 0.25


def test_move_steps_match_move_time():
    hw = na_platform()
    for step in schedule_gb_sec(gb_layout("gb-72"), hw).steps:
        if step.kind == MOVE:
            assert step.duration == move_time(step.distance, hw.movement_accel)


def test_atom_surface_length():
    t = atom_surface_sec_length(NA, 9)
    assert t == pytest.approx(4 * 38.7298e-6 + 4 * 0.2e-6 + 4 * 0.5e-6, abs=1e-9)
    assert 8.38e-5 < t <= 1.675e-4


def test_atom_surface_zero():
    zero = {**NA_FUTURE, **{f: 0.0 for f in SC_TIMES}, "lattice_spacing": 0.0}
    assert atom_surface_sec_length(HardwareParams(name="z", kind="neutral_atom", **zero), 5) == 0.0


def test_csv_export():
    text = schedule_gb_sec(toy_layout([Rect(0, 0, 0, 0)]), NA).to_csv()
    lines = text.splitlines()
    assert lines[0] == "kind,group,distance_um,duration_s,pipelined"
    assert len(lines) == 6 and lines[1].startswith("Prep") and lines[-1].endswith(",1")


@pytest.mark.parametrize("schedule", [lambda: atom_surface_schedule(NA, 7), lambda: schedule_gb_sec(gb_layout("gb-72"), na_platform())])
def test_pipelining_removal_adds_prep_and_readout(schedule):
    sched = schedule()
    hw = NA if len(sched.steps) < 20 else na_platform()
    assert sched.without_pipelining().total == pytest.approx(sched.total + hw.prep_time + hw.readout_time, rel=1e-12)


@given(st.floats(1e-7, 1e-3), st.floats(1e-7, 1e-3))
def test_pipelining_strictly_increases(prep, readout):
    hw = replace(NA, prep_time=prep, readout_time=readout)
    sched = atom_surface_schedule(hw, 5)
    assert sched.without_pipelining().total > sched.total
    assert sched.without_pipelining().total - sched.total == pytest.approx(prep + readout, rel=1e-9)


@given(st.sampled_from(NA_TIMES), st.floats(1.0, 4.0))
def test_monotone_in_time_parameters(field, factor):
    layout = toy_layout([Rect(0, 0, 0, 0)])
    slower = replace(NA, **{field: getattr(NA, field) * (1 / factor if field == "movement_accel" else factor)})
    assert schedule_gb_sec(layout, slower).total >= schedule_gb_sec(layout, NA).total
    assert atom_surface_sec_length(slower, 5) >= atom_surface_sec_length(NA, 5)


@given(st.sampled_from(SC_TIMES), st.floats(1.0, 4.0))
def test_superconducting_monotone(field, factor):
    hw = HardwareParams(name="c", kind="superconducting", **SC_CURRENT)
    assert surface_sec_length(replace(hw, **{field: getattr(hw, field) * factor})) >= surface_sec_length(hw)


@settings(max_examples=60, deadline=None)
@given(small_layouts())
def test_parking_argmin_matches_exhaustive_rescan(layout):
    check_parking_against_rescan(layout, NA)
