"""Generate torus grid layouts for the bivariate-bicycle GB codes.

Each code is defined by l, m and polynomials A, B in x (order l) and y
(order m). Data and ancilla qubits are interleaved on a 2l x 2m torus:

    L data (2i, 2j)    X ancilla (2i, 2j+1)
    Z ancilla (2i+1, 2j)    R data (2i+1, 2j+1)

Offset order within each check is chosen to minimise the scheduler's
move time, searching every permutation and every parking placement.

Usage: python scripts/make_bb_layouts.py [outdir]
"""

from __future__ import annotations

import itertools
import sys
from pathlib import Path

import yaml

from qlops.model import AncillaCheck, GridLayout, HardwareParams, Rect
from qlops.sec import _group_cost, _placements, schedule_gb_sec

CODES = {
    "bb_72_12_6": (6, 6, [(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)]),
    "bb_90_8_10": (15, 3, [(9, 0), (0, 1), (0, 2)], [(0, 0), (2, 0), (7, 0)]),
    "bb_108_8_10": (9, 6, [(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)]),
    "bb_144_12_12": (12, 6, [(3, 0), (0, 1), (0, 2)], [(0, 3), (1, 0), (2, 0)]),
    "bb_288_12_18": (12, 12, [(3, 0), (0, 2), (0, 7)], [(0, 3), (1, 0), (2, 0)]),
}

# only timing matters for the order search
HW = HardwareParams(
    name="search", kind="neutral_atom", coherence_time=20.0, gate_time_1q=5e-7,
    gate_time_2q=2e-7, infid_1q=1e-4, infid_2q=1e-3, readout_time=5e-5,
    readout_error=2e-4, prep_time=0.0, prep_error=2e-4, movement_error=1e-4,
    unintended_error=2e-4, movement_accel=0.02, lattice_spacing=5.0,
)


def centred(e: int, n: int) -> int:
    e %= n
    return e - n if e > n // 2 else e


def raw_layout(l: int, m: int, A, B):
    A = [(centred(a, l), centred(b, m)) for a, b in A]
    B = [(centred(a, l), centred(b, m)) for a, b in B]
    rows, cols = 2 * l, 2 * m
    x_off = [(2 * a, 2 * b - 1) for a, b in A] + [(2 * a + 1, 2 * b) for a, b in B]
    z_off = [(-2 * a - 1, -2 * b) for a, b in B] + [(-2 * a, -2 * b + 1) for a, b in A]
    x_homes = [(2 * i, 2 * j + 1) for i in range(l) for j in range(m)]
    z_homes = [(2 * i + 1, 2 * j) for i in range(l) for j in range(m)]
    data = [(2 * i, 2 * j) for i in range(l) for j in range(m)] + [
        (2 * i + 1, 2 * j + 1) for i in range(l) for j in range(m)
    ]
    parking = [
        Rect(0, -cols, rows - 1, -1),
        Rect(0, cols, rows - 1, 2 * cols - 1),
        Rect(-rows, 0, -1, cols - 1),
        Rect(rows, 0, 2 * rows - 1, cols - 1),
    ]
    return (rows, cols), data, x_homes, x_off, z_homes, z_off, parking


def make_group(prefix, homes, offsets):
    return tuple(AncillaCheck(f"{prefix}{n}", h, tuple(offsets)) for n, h in enumerate(homes))


def best_order(dims, data, homes, offsets, parking, prefix):
    probe = GridLayout(dims, tuple(data), make_group(prefix, homes, offsets), (), tuple(parking), True)
    places = _placements(probe, probe.x_checks)
    best = None
    for perm in itertools.permutations(offsets):
        group = make_group(prefix, homes, perm)
        cost = min(_group_cost(probe, group, shift, HW) for _, shift in places)
        if best is None or cost < best[0]:
            best = (cost, list(perm))
    return best[1]


def main(outdir: Path) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for name, (l, m, A, B) in CODES.items():
        dims, data, xh, xo, zh, zo, parking = raw_layout(l, m, A, B)
        xo = best_order(dims, data, xh, xo, parking, "x")
        zo = best_order(dims, data, zh, zo, parking, "z")
        layout = GridLayout(
            dims, tuple(data), make_group("x", xh, xo), make_group("z", zh, zo), tuple(parking), True
        )
        total = schedule_gb_sec(layout, HW).total
        doc = {
            "grid_dims": list(dims),
            "periodic": True,
            "data_positions": [list(p) for p in data],
            "x_checks": [{"id": "x", "homes": [list(h) for h in xh], "offsets": [list(o) for o in xo]}],
            "z_checks": [{"id": "z", "homes": [list(h) for h in zh], "offsets": [list(o) for o in zo]}],
            "parking": [[r.row0, r.col0, r.row1, r.col1] for r in parking],
        }
        header = f"# {name}: l={l}, m={m}; generated by scripts/make_bb_layouts.py\n"
        header += f"# scheduled SEC length with 5 um spacing, a_p=0.02: {total * 1e6:.1f} us\n"
        (outdir / f"{name}.yaml").write_text(header + yaml.safe_dump(doc, default_flow_style=None, sort_keys=False))
        print(name, f"{total * 1e6:.1f} us")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src/qlops/data/layouts")
