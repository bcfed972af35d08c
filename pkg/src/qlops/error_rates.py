"""Per-layer logical error rates, log-linear fits and distance matching."""

from __future__ import annotations

import csv
import math
import warnings
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog

from qlops.errors import ConfigError, DomainError, InfeasibleError, UnreachableError
from qlops.model import FitModel

ODD = "odd"
ANY = "any"


class ExtrapolationWarning(UserWarning):
    """A fit was evaluated outside the distances it was calibrated on."""


def p0_from_pL(p_L: float, k: int, d: int) -> float:
    """Per-layer, per-logical-qubit error rate of a k*d volume memory run.

    Computed as 1 - (1 - p_L)**(1/(k*d)) in a form that keeps full
    relative precision for tiny p_L.
    """
    if not (0.0 <= p_L < 1.0):
        raise DomainError(f"p_L must lie in [0, 1), got {p_L}")
    if k < 1 or d < 1:
        raise DomainError(f"k and d must be >= 1, got k={k}, d={d}")
    return -math.expm1(math.log1p(-p_L) / (k * d))


def pL_from_p0(p0: float, k: int, d: int) -> float:
    """Inverse of :func:`p0_from_pL`."""
    if not (0.0 <= p0 < 1.0):
        raise DomainError(f"p0 must lie in [0, 1), got {p0}")
    return -math.expm1(k * d * math.log1p(-p0))


def fit_log_linear(samples: Sequence[tuple[int, float]]) -> FitModel:
    """Unweighted least-squares fit of ln p0 against d.

    The returned model is declared valid on the sampled distance range.
    """
    if len(samples) < 2:
        raise DomainError("need at least two samples")
    ds = np.array([float(d) for d, _ in samples])
    p0s = np.array([float(p) for _, p in samples])
    if np.any(p0s <= 0) or np.any(p0s >= 1):
        raise DomainError("every p0 must lie in (0, 1)")
    if np.all(ds == ds[0]):
        raise DomainError("degenerate fit: all distances are equal")
    logs = np.log(p0s)
    slope, intercept = np.polyfit(ds, logs, 1)
    residuals = logs - (intercept + slope * ds)
    return FitModel(
        intercept=float(intercept),
        slope=float(slope),
        d_min=int(ds.min()),
        d_max=int(ds.max()),
        residuals=tuple(float(r) for r in residuals),
    )


def in_fitted_range(model: FitModel, d: float) -> bool:
    return model.d_min <= d <= model.d_max


def predict_p0(model: FitModel, d: float) -> float:
    """exp(intercept + slope*d); warns when d lies outside the fitted range."""
    if d < 1:
        raise DomainError(f"distance must be >= 1, got {d}")
    if not in_fitted_range(model, d):
        warnings.warn(
            f"d={d} is outside the fitted range [{model.d_min}, {model.d_max}]",
            ExtrapolationWarning,
            stacklevel=2,
        )
    return math.exp(model.intercept + model.slope * d)


def match_distance(
    model: FitModel,
    target_p0: float,
    d_range: tuple[int, int] = (3, 41),
    parity: str = ODD,
) -> int:
    """Smallest distance in range (odd by default) whose predicted p0 <= target."""
    if not model.sub_threshold:
        raise InfeasibleError("fit slope is not negative: platform is above threshold")
    if not target_p0 > 0:
        raise DomainError(f"target p0 must be positive, got {target_p0}")
    lo, hi = d_range
    for d in range(max(lo, 1), hi + 1):
        if parity == ODD and d % 2 == 0:
            continue
        # the log-domain comparison avoids exp underflow at large d
        if model.intercept + model.slope * d <= math.log(target_p0):
            return d
    raise UnreachableError(f"no distance in [{lo}, {hi}] reaches p0 <= {target_p0:g}")


def calibrate_from_matches(
    matches: Iterable[tuple[float, int]],
    step: int = 2,
    d_min: int = 1,
    d_max: int = 1000,
) -> FitModel:
    """Fit coefficients that reproduce a set of matched distances.

    Each (target_p0, d) pair demands p0(d) <= target < p0(d - step). The
    returned model is the Chebyshev centre of that polyhedron in
    (intercept, slope, margin), i.e. the fit with the largest ln-domain
    slack to every constraint.
    """
    rows, bounds = [], []
    for target, d in matches:
        log_t = math.log(target)
        rows.append([1.0, d, 1.0])
        bounds.append(log_t)
        rows.append([-1.0, -(d - step), 1.0])
        bounds.append(-log_t)
    if not rows:
        raise DomainError("no matches given")
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=rows,
        b_ub=bounds,
        bounds=[(None, None), (None, 0.0), (0.0, None)],
    )
    if res.status != 0 or res.x[2] <= 0:
        raise InfeasibleError("no log-linear fit reproduces all matched distances")
    return FitModel(float(res.x[0]), float(res.x[1]), d_min, d_max)


def load_samples(path: str | Path) -> list[tuple[int, float, int]]:
    """Read calibration samples from a CSV with columns d, p_L, k."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = {"d", "p_L", "k"} - set(reader.fieldnames or ())
            if missing:
                raise ConfigError(f"{path}: missing column(s) {', '.join(sorted(missing))}")
            out = []
            for line, row in enumerate(reader, start=2):
                try:
                    out.append((int(row["d"]), float(row["p_L"]), int(row["k"])))
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"{path}:{line}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    return out


def fit_from_samples(samples: Iterable[tuple[int, float, int]]) -> FitModel:
    """Convert (d, p_L, k) memory results to p0 and fit them."""
    return fit_log_linear([(d, p0_from_pL(p_L, k, d)) for d, p_L, k in samples])
