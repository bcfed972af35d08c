"""Syndrome-extraction-cycle length for superconducting and neutral-atom hardware.

Neutral-atom schedules move one AOD group at a time. An ancilla group is
prepared in a parking placement outside the data region, visits its check
offsets in layout order with a two-qubit gate region after each arrival,
and returns to the same placement for readout. Preparation and readout
overlap with the other group's motion, so they are marked pipelined.

On periodic (torus) layouts some targets wrap around the grid. Ancillas
whose displacement differs from the rest of the group need their own AOD
move, so every distinct displacement vector in a transition becomes a
separate sequential Move step.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Sequence

from qlops.errors import DomainError, InfeasibleError
from qlops.model import NEUTRAL_ATOM, SUPERCONDUCTING, AncillaCheck, Coord, GridLayout, HardwareParams

PREP = "Prep"
MOVE = "Move"
GATE_1Q = "Gate1Q"
GATE_2Q = "Gate2QRegion"
READOUT = "Readout"


@dataclass(frozen=True)
class SecStep:
    kind: str
    duration: float
    pipelined: bool = False
    distance: float = 0.0
    group: str = ""


@dataclass(frozen=True)
class SecSchedule:
    steps: tuple[SecStep, ...]
    parking: tuple[int, ...] = ()

    @property
    def total(self) -> float:
        return math.fsum(s.duration for s in self.steps if not s.pipelined)

    def without_pipelining(self) -> SecSchedule:
        return replace(self, steps=tuple(replace(s, pipelined=False) for s in self.steps))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kind", "group", "distance_um", "duration_s", "pipelined"])
        for s in self.steps:
            writer.writerow([s.kind, s.group, f"{s.distance:.6g}", f"{s.duration:.6g}", int(s.pipelined)])
        return buf.getvalue()


def move_time(dx: float, a_p: float) -> float:
    """Seconds to move ``dx`` micrometers at acceleration ``a_p`` (um/us^2)."""
    if not a_p > 0:
        raise DomainError(f"a_p must be positive, got {a_p}")
    if dx < 0:
        raise DomainError(f"dx must be non-negative, got {dx}")
    return math.sqrt(6.0 * dx / a_p) * 1e-6


def _require_kind(hw: HardwareParams, kind: str) -> None:
    if hw.kind != kind:
        raise DomainError(f"platform {hw.name!r} is {hw.kind}, expected {kind}")


def surface_sec_length(hw: HardwareParams) -> float:
    """Prep + readout + 4 single-qubit layers + 4 two-qubit layers."""
    _require_kind(hw, SUPERCONDUCTING)
    return hw.prep_time + hw.readout_time + 4 * hw.gate_time_1q + 4 * hw.gate_time_2q


def _move(hw: HardwareParams, sites: float, group: str = "") -> SecStep:
    dist = sites * hw.lattice_spacing
    return SecStep(MOVE, move_time(dist, hw.movement_accel), distance=dist, group=group)


def atom_surface_schedule(hw: HardwareParams, d: int) -> SecSchedule:
    """Surface-code SEC with one-site AOD hops before each two-qubit layer.

    Every hop is a single lattice site regardless of ``d``, so the length
    does not depend on the distance.
    """
    _require_kind(hw, NEUTRAL_ATOM)
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    g1 = SecStep(GATE_1Q, hw.gate_time_1q)
    g2 = SecStep(GATE_2Q, hw.gate_time_2q)
    hop_pair = [_move(hw, 1), g2, _move(hw, 1), g2]
    steps = [SecStep(PREP, hw.prep_time, True), g1, *hop_pair, g1, g1, *hop_pair, g1, SecStep(READOUT, hw.readout_time, True)]
    return SecSchedule(tuple(steps))


def atom_surface_sec_length(hw: HardwareParams, d: int) -> float:
    return atom_surface_schedule(hw, d).total


# ---------------------------------------------------------------------------
# GB-code scheduling


def _placements(layout: GridLayout, group: Sequence[AncillaCheck]) -> list[tuple[int, Coord]]:
    """All (region index, translation) pairs that park the whole group inside one region."""
    rows = [c.home[0] for c in group]
    cols = [c.home[1] for c in group]
    out = []
    for idx, rect in enumerate(layout.candidate_parking_regions):
        for tr in range(rect.row0 - min(rows), rect.row1 - max(rows) + 1):
            for tc in range(rect.col0 - min(cols), rect.col1 - max(cols) + 1):
                out.append((idx, (tr, tc)))
    return out


def _transitions(layout: GridLayout, group: Sequence[AncillaCheck], shift: Coord) -> list[list[Coord]]:
    """Per transition, the sorted distinct nonzero displacement vectors."""
    parked = [(c.home[0] + shift[0], c.home[1] + shift[1]) for c in group]
    weight = len(group[0].offsets)
    stops = [parked]
    for i in range(weight):
        stops.append([layout.target(c.home, c.offsets[i]) for c in group])
    stops.append(parked)
    out = []
    for before, after in zip(stops, stops[1:]):
        disp = {(b[0] - a[0], b[1] - a[1]) for a, b in zip(before, after)}
        disp.discard((0, 0))
        out.append(sorted(disp))
    return out


def _group_steps(layout: GridLayout, group: Sequence[AncillaCheck], shift: Coord, hw: HardwareParams, label: str) -> list[SecStep]:
    steps: list[SecStep] = []
    transitions = _transitions(layout, group, shift)
    for i, disps in enumerate(transitions):
        for dr, dc in disps:
            steps.append(_move(hw, math.hypot(dr, dc), label))
        if i < len(transitions) - 1:
            steps.append(SecStep(GATE_2Q, hw.gate_time_2q, group=label))
    return steps


def _group_cost(layout: GridLayout, group: Sequence[AncillaCheck], shift: Coord, hw: HardwareParams) -> float:
    return math.fsum(s.duration for s in _group_steps(layout, group, shift, hw, "") if s.kind == MOVE)


def _parked_cells(group: Sequence[AncillaCheck], shift: Coord) -> set[Coord]:
    return {(c.home[0] + shift[0], c.home[1] + shift[1]) for c in group}


def choose_parking(
    layout: GridLayout, hw: HardwareParams
) -> tuple[tuple[int, Coord] | None, tuple[int, Coord] | None, float]:
    """Exhaustively pick X and Z parking placements with the least total move time.

    Placements are enumerated in region order, then by translation; among
    equal-cost pairs the first in that order wins. The two groups may not
    share a parked cell. An absent group gets ``None``.
    """
    groups = [g for g in (layout.x_checks, layout.z_checks) if g]
    options = []
    for g in groups:
        opts = _placements(layout, g)
        if not opts:
            raise InfeasibleError("no parking region can hold the whole ancilla group")
        options.append([(_group_cost(layout, g, shift, hw), n, (idx, shift)) for n, (idx, shift) in enumerate(opts)])
    if len(groups) == 1:
        cost, _, place = min(options[0], key=lambda o: (o[0], o[1]))
        return (place, None, cost) if layout.x_checks else (None, place, cost)
    best = None
    for cx, nx, px in options[0]:
        cells_x = _parked_cells(groups[0], px[1])
        for cz, nz, pz in options[1]:
            key = (cx + cz, nx, nz)
            if best is not None and key >= best[0]:
                continue
            if cells_x & _parked_cells(groups[1], pz[1]):
                continue
            best = (key, px, pz)
    if best is None:
        raise InfeasibleError("X and Z ancilla groups cannot be parked without overlap")
    return best[1], best[2], best[0][0]


def schedule_gb_sec(layout: GridLayout, hw: HardwareParams) -> SecSchedule:
    """Build the AOD schedule of one syndrome-extraction cycle for a grid layout."""
    _require_kind(hw, NEUTRAL_ATOM)
    if not (layout.x_checks or layout.z_checks):
        raise DomainError("layout has no checks")
    place_x, place_z, _ = choose_parking(layout, hw)
    steps = [SecStep(PREP, hw.prep_time, True)]
    parking = []
    groups = [(lbl, g) for lbl, g in (("X", layout.x_checks), ("Z", layout.z_checks)) if g]
    places = [p for p in (place_x, place_z) if p is not None]
    for (label, group), (region, shift) in zip(groups, places):
        parking.append(region)
        if label == "X":
            steps.append(SecStep(GATE_1Q, hw.gate_time_1q, group=label))
        steps.extend(_group_steps(layout, group, shift, hw, label))
        if label == "X":
            steps.append(SecStep(GATE_1Q, hw.gate_time_1q, group=label))
    steps.append(SecStep(READOUT, hw.readout_time, True))
    return SecSchedule(tuple(steps), tuple(parking))
