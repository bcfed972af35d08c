"""One-level 15-to-1 magic-state factories: error model, footprint and sizing.

Error model
-----------
The protocol is simulated exactly as a five-qubit density matrix: four
check patches (d_X x d_Z) and one output patch (d_X x d_X), all starting
in |+>. Fifteen Z-type pi/8 rotations are applied, one per nonzero vector
v of F_2^4; rotation v acts on check qubit q when bit q of v is set, and
also on the output patch when v has even weight. The four weight-one
rotations are the magic-state preparations of the check patches. The
other eleven are lattice-surgery rotations, two per step, over six steps
of d_m code cycles each (hence 6 d_m cycles before post-selection).
At the end the checks are read out in the X basis and the run is kept
only if all four report +1.

Fault paths, each an independent Pauli or rotation channel:

* injection, per rotation, probability ``p_inject``: a Pauli error on the
  rotation axis (1/3) or a rotation by -pi/8 instead of +pi/8 (2/3);
* time-like lattice-surgery failure, per multi-patch rotation touching w
  patches: probability w * d_X * p0(d_m), after which the pi/4
  correction is wrong with probability 1/2 in either direction;
* storage, per step and patch: a check patch suffers logical X with
  probability d_m * (d_Z / d_X) * p0(d_X) and logical Z with
  d_m * (d_X / d_Z) * p0(d_Z); the output patch suffers X and Z each
  with d_m * p0(d_X).

p0 comes from the platform's log-linear fit. Probabilities saturate at
1/2 (a fully randomising channel). The output infidelity is measured
against the noiseless output state, conditioned on acceptance.
"""

from __future__ import annotations

import csv
import io
import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import least_squares

from qlops.errors import DomainError, InfeasibleError, ModelRangeError
from qlops.metric import LogicalCycle
from qlops.model import CodeSpec, FitModel, SearchRange

log = logging.getLogger(__name__)

_NQ = 5  # qubits 0-3 are checks, 4 is the output
_DIM = 1 << _NQ
_OUT = 4
_ANGLE = math.pi / 8


@dataclass(frozen=True, order=True)
class DistillationProtocol:
    d_X: int
    d_Z: int
    d_m: int

    def __post_init__(self) -> None:
        if min(self.d_X, self.d_Z, self.d_m) < 1:
            raise DomainError(f"distances must be >= 1, got {self}")

    @property
    def label(self) -> str:
        return f"(15-to-1)_{self.d_X},{self.d_Z},{self.d_m}"


@dataclass(frozen=True)
class FactoryPlan:
    protocol: DistillationProtocol
    p_out: float
    p_accept: float
    unit_qubits: int
    expected_cycles: float
    t_sec: float
    t_unit: float
    units: int
    total_qubits: int


def unit_qubits(p: DistillationProtocol) -> int:
    """Physical qubits of one distillation unit."""
    return 2 * (p.d_X + 4 * p.d_Z) * 3 * p.d_X + 4 * p.d_m


def expected_cycles(p: DistillationProtocol, p_accept: float) -> float:
    """Code cycles per accepted output, restarting on rejection."""
    if not (0.0 < p_accept <= 1.0):
        raise DomainError(f"p_accept must lie in (0, 1], got {p_accept}")
    return 6 * p.d_m / p_accept


def units_needed(k: int, t_unit: float, T_L: float) -> int:
    """Units so that k magic states are ready every logical cycle on average."""
    if k < 1 or not t_unit > 0 or not T_L > 0:
        raise DomainError("k, t_unit and T_L must be positive")
    ratio = k * t_unit / T_L
    # guard against a product landing a hair above an exact integer
    return max(1, math.ceil(ratio * (1 - 1e-12)))


# ---------------------------------------------------------------------------
# density-matrix engine

_BITS = (np.arange(_DIM)[:, None] >> np.arange(_NQ)) & 1


def _z_signs(support: Sequence[int]) -> np.ndarray:
    return 1 - 2 * (_BITS[:, list(support)].sum(axis=1) % 2)


def _rotation_support(v: int) -> tuple[int, ...]:
    checks = tuple(q for q in range(4) if v >> q & 1)
    return checks + ((_OUT,) if len(checks) % 2 == 0 else ())


_SUPPORTS = [_rotation_support(v) for v in range(1, 16)]
_PREPARATIONS = [s for s in _SUPPORTS if len(s) == 1]
_MULTI = [s for s in _SUPPORTS if len(s) > 1]
_STEPS = [_MULTI[i : i + 2] for i in range(0, len(_MULTI), 2)]


@dataclass(frozen=True)
class _RotationKernels:
    width: int
    plus: np.ndarray  # elementwise factor of rho for U(+pi/8)
    minus: np.ndarray
    wide: np.ndarray  # U(3pi/8)
    flipped: np.ndarray  # U(+pi/8) followed by the axis Pauli


def _kernels(support: tuple[int, ...]) -> _RotationKernels:
    s = _z_signs(support)
    diff = s[:, None] - s[None, :]
    outer = np.outer(s, s)
    plus = np.exp(-1j * _ANGLE * diff)
    return _RotationKernels(
        len(support), plus, np.exp(1j * _ANGLE * diff), np.exp(-3j * _ANGLE * diff), plus * outer
    )


_PREP_KERNELS = [_kernels(s) for s in _PREPARATIONS]
_STEP_KERNELS = [[_kernels(s) for s in step] for step in _STEPS]
_Z_OUTER = [np.outer(_z_signs([q]), _z_signs([q])) for q in range(_NQ)]
# flat gather indices applying X on qubit q to both sides of rho
_X_FLAT = [((np.arange(_DIM) ^ (1 << q))[:, None] * _DIM + (np.arange(_DIM) ^ (1 << q))[None, :]) for q in range(_NQ)]


@dataclass(frozen=True)
class FaultRates:
    """Per-event fault probabilities fed to the density-matrix engine."""

    inject: float
    check_x: float
    check_z: float
    output_x: float
    output_z: float
    time_like_per_patch: float

    def time_like(self, width: int) -> float:
        return min(0.5, width * self.time_like_per_patch)


def _rotate(rho: np.ndarray, k: _RotationKernels, p_inj: float, p_time: float) -> np.ndarray:
    kernel = (
        (1 - p_inj - p_time) * k.plus
        + (p_inj / 3) * k.flipped
        + (2 * p_inj / 3 + p_time / 2) * k.minus
        + (p_time / 2) * k.wide
    )
    return rho * kernel


def _dephasing(rates: FaultRates) -> np.ndarray:
    kernel = np.ones((_DIM, _DIM))
    for q in range(_NQ):
        pz = rates.output_z if q == _OUT else rates.check_z
        if pz:
            kernel *= (1 - pz) + pz * _Z_OUTER[q]
    return kernel


def _store(rho: np.ndarray, rates: FaultRates, dephase: np.ndarray) -> np.ndarray:
    for q in range(_NQ):
        px = rates.output_x if q == _OUT else rates.check_x
        if px:
            rho = (1 - px) * rho + px * np.take(rho, _X_FLAT[q])
    return rho * dephase


def simulate(rates: FaultRates) -> tuple[np.ndarray, float]:
    """Run the protocol; return the unnormalised accepted output and p_accept."""
    rho = np.full((_DIM, _DIM), 1.0 / _DIM, dtype=complex)
    for k in _PREP_KERNELS:
        rho = _rotate(rho, k, rates.inject, 0.0)
    dephase = _dephasing(rates)
    for step in _STEP_KERNELS:
        for k in step:
            rho = _rotate(rho, k, rates.inject, rates.time_like(k.width))
        rho = _store(rho, rates, dephase)
    # project the checks onto |+>^4; the output qubit is the top index bit
    plus = np.full(16, 0.25)
    out = np.einsum("i,aibj,j->ab", plus, rho.reshape(2, 16, 2, 16), plus)
    return out, float(out.trace().real)


def _ideal_basis() -> tuple[np.ndarray, np.ndarray]:
    out, acc = simulate(FaultRates(0, 0, 0, 0, 0, 0))
    vecs = np.linalg.eigh(out / acc)[1]
    return vecs[:, -1], vecs[:, 0]


_IDEAL, _ORTHOGONAL = _ideal_basis()


def fault_rates(p: DistillationProtocol, fit: FitModel, p_inject: float = 0.0) -> FaultRates:
    for d in (p.d_X, p.d_Z, p.d_m):
        if not (fit.d_min <= d <= fit.d_max):
            raise ModelRangeError(f"distance {d} of {p.label} is outside the fit range [{fit.d_min}, {fit.d_max}]")
    if not (0.0 <= p_inject <= 1.0):
        raise DomainError(f"p_inject must lie in [0, 1], got {p_inject}")

    def p0(d: int) -> float:
        return math.exp(fit.intercept + fit.slope * d)

    cap = lambda x: min(0.5, x)  # noqa: E731
    return FaultRates(
        inject=p_inject,
        check_x=cap(p.d_m * p0(p.d_X) * p.d_Z / p.d_X),
        check_z=cap(p.d_m * p0(p.d_Z) * p.d_X / p.d_Z),
        output_x=cap(p.d_m * p0(p.d_X)),
        output_z=cap(p.d_m * p0(p.d_X)),
        time_like_per_patch=p.d_X * p0(p.d_m),
    )


@lru_cache(maxsize=65536)
def distillation_error(p: DistillationProtocol, fit: FitModel, p_inject: float = 0.0) -> tuple[float, float]:
    """Output infidelity and acceptance probability of one protocol run.

    ``p_inject`` is the error of each injected physical magic state; the
    code-level faults come from ``fit``.
    """
    out, acc = simulate(fault_rates(p, fit, p_inject))
    if acc <= 0:
        return 1.0, 0.0
    p_out = float((_ORTHOGONAL.conj() @ out @ _ORTHOGONAL).real) / acc
    return max(p_out, 0.0), min(acc, 1.0)


# ---------------------------------------------------------------------------
# search

SecLength = float | Callable[[DistillationProtocol], float]


def _protocol_t_sec(t_sec_dist: SecLength, p: DistillationProtocol) -> float:
    t = t_sec_dist(p) if callable(t_sec_dist) else t_sec_dist
    if not t > 0:
        raise DomainError(f"distillation t_SEC must be positive, got {t}")
    return t


def make_plan(
    p: DistillationProtocol,
    p_out: float,
    p_accept: float,
    k: int,
    comp_cycle: LogicalCycle,
    t_sec: float,
) -> FactoryPlan:
    cycles = expected_cycles(p, p_accept)
    t_unit = cycles * t_sec
    units = units_needed(k, t_unit, comp_cycle.duration)
    size = unit_qubits(p)
    return FactoryPlan(p, p_out, p_accept, size, cycles, t_sec, t_unit, units, units * size)


def plan_factory(
    code: CodeSpec,
    fit: FitModel,
    comp_cycle: LogicalCycle,
    t_sec_dist: SecLength,
    target_p0: float,
    search_range: SearchRange = SearchRange(),
    *,
    logical_qubits: int | None = None,
    p_inject: float = 0.0,
) -> FactoryPlan:
    """Smallest factory whose output error is at most ``target_p0``.

    Searches odd (d_X, d_Z, d_m) in ``search_range`` (clipped to the fit's
    range). Ties on total qubits go to fewer expected cycles, then to the
    lexicographically smallest protocol. ``logical_qubits`` defaults to
    ``code.k``; pass the total when several patches share one factory.
    """
    if not target_p0 > 0:
        raise DomainError(f"target p0 must be positive, got {target_p0}")
    if not fit.sub_threshold:
        raise InfeasibleError("fit slope is not negative: platform is above threshold")
    k = logical_qubits or code.k
    lo = max(search_range.d_min, fit.d_min)
    hi = min(search_range.d_max, fit.d_max)
    dists = [d for d in range(lo, hi + 1) if d % 2 == 1]
    if not dists:
        raise InfeasibleError(f"no odd distance in [{lo}, {hi}]")
    if (lo, hi) != (search_range.d_min, search_range.d_max):
        log.info("distillation search clipped to the fit range [%d, %d]", lo, hi)
    candidates = sorted(
        (unit_qubits(p), p) for p in itertools.starmap(DistillationProtocol, itertools.product(dists, repeat=3))
    )
    best: FactoryPlan | None = None
    best_key = None
    for size, p in candidates:
        if best is not None and size > best.total_qubits:
            break
        t_sec = _protocol_t_sec(t_sec_dist, p)
        floor_units = units_needed(k, 6 * p.d_m * t_sec, comp_cycle.duration)
        if best is not None and size * floor_units > best.total_qubits:
            continue
        p_out, p_accept = distillation_error(p, fit, p_inject)
        if p_out > target_p0 or p_accept <= 0:
            continue
        plan = make_plan(p, p_out, p_accept, k, comp_cycle, t_sec)
        key = (plan.total_qubits, plan.expected_cycles, p)
        if best_key is None or key < best_key:
            best, best_key = plan, key
    if best is None:
        raise InfeasibleError(f"no protocol in [{lo}, {hi}] reaches p_out <= {target_p0:g}")
    return best


# ---------------------------------------------------------------------------
# calibration and export


def calibrate_from_distillation(
    rows: Iterable[tuple[DistillationProtocol, float, float]],
    p_inject: float,
    d_min: int = 3,
    d_max: int = 41,
    start: tuple[float, float] = (-4.0, -1.0),
) -> FitModel:
    """Fit (intercept, slope) so the error model reproduces published factories.

    Each row is (protocol, p_out, cycles). Residuals are the ln ratios of
    model to published p_out and of model to published rejection rate
    (1 - 6 d_m / cycles).
    """
    rows = list(rows)
    wide = FitModel(-1.0, -1e-9, 1, 1000)

    def residuals(x: np.ndarray) -> list[float]:
        fit = FitModel(float(x[0]), float(x[1]), wide.d_min, wide.d_max)
        res = []
        for p, pub_out, pub_cycles in rows:
            p_out, acc = distillation_error(p, fit, p_inject)
            res.append(math.log(p_out / pub_out))
            res.append(math.log((1 - acc) / (1 - 6 * p.d_m / pub_cycles)))
        return res

    sol = least_squares(residuals, start, bounds=([-12.0, -3.0], [2.0, -0.2]))
    return FitModel(float(sol.x[0]), float(sol.x[1]), d_min, d_max, tuple(float(r) for r in sol.fun))


def plans_to_csv(plans: Sequence[tuple[str, FactoryPlan]]) -> str:
    """CSV with one row per (label, plan), mirroring the factory table columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["code", "protocol", "p_out", "unit_qubits", "cycles", "units", "total_qubits"])
    for label, plan in plans:
        p = plan.protocol
        writer.writerow(
            [label, f"{p.d_X}/{p.d_Z}/{p.d_m}", f"{plan.p_out:.5g}", plan.unit_qubits, f"{plan.expected_cycles:.6g}", plan.units, plan.total_qubits]
        )
    return buf.getvalue()
