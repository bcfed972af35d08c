"""QLOPS, QLOPS density and the logical-cycle model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from qlops.errors import DomainError
from qlops.model import CodeSpec, ExtraPatches

# Ratios this close to an integer are treated as sitting on the ceiling
# boundary; table rounding of t_r and t_SEC cannot resolve the side.
BOUNDARY_RTOL = 1e-9


@dataclass(frozen=True)
class LogicalCycle:
    """SEC rounds per logical operation and the resulting wall-clock time.

    When ``boundary`` is set, t_r / t_sec was an integer N at working
    precision; ``cycles`` uses N and ``alt_cycles`` uses N + 1.
    """

    cycles: int
    t_sec: float
    boundary: bool = False
    alt_cycles: int | None = None

    @property
    def duration(self) -> float:
        return self.cycles * self.t_sec

    @property
    def alt_duration(self) -> float | None:
        return None if self.alt_cycles is None else self.alt_cycles * self.t_sec


def _check_t_sec(t_sec: float) -> None:
    if not t_sec > 0:
        raise DomainError(f"t_sec must be positive, got {t_sec}")


def logical_cycle(t_r: float, t_sec: float, d: int) -> LogicalCycle:
    _check_t_sec(t_sec)
    if t_r < 0:
        raise DomainError(f"t_r must be non-negative, got {t_r}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    ratio = t_r / t_sec
    nearest = round(ratio)
    if nearest > 0 and abs(ratio - nearest) <= BOUNDARY_RTOL * nearest:
        return LogicalCycle(nearest + d, t_sec, True, nearest + 1 + d)
    return LogicalCycle(math.ceil(ratio) + d, t_sec)


def correlated_cycle(t_sec: float, rounds_per_op: int = 1) -> LogicalCycle:
    _check_t_sec(t_sec)
    if rounds_per_op < 1:
        raise DomainError(f"rounds_per_op must be >= 1, got {rounds_per_op}")
    return LogicalCycle(rounds_per_op, t_sec)


def qlops(k: int, t_r: float, t_sec: float, d: int) -> float:
    """k / ((ceil(t_r / t_sec) + d) * t_sec)."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return k / logical_cycle(t_r, t_sec, d).duration


def qlops_correlated(k: int, t_sec: float, rounds_per_op: int = 1) -> float:
    """QLOPS when correlated decoding needs only ``rounds_per_op`` SEC rounds."""
    return k / correlated_cycle(t_sec, rounds_per_op).duration


def qlops_density(q: float, n_phys: int) -> float:
    if n_phys < 1:
        raise DomainError(f"n_phys must be >= 1, got {n_phys}")
    return q / n_phys


def physical_qubits(code: CodeSpec, patches: int = 1, extra: Sequence[ExtraPatches] = ()) -> int:
    """Physical qubits of ``patches`` blocks of ``code`` plus any fixed-size extras.

    Surface patches count 2d^2 - 1 qubits and GB blocks 2n.
    """
    if patches < 1:
        raise DomainError(f"patches must be >= 1, got {patches}")
    total = patches * code.qubits_per_block
    return total + sum(e.count * e.qubits_per_patch for e in extra)


def needs_parallel_decoder(t_r: float, d: int, t_sec: float) -> bool:
    """True when the decoder cannot keep pace with a window of d rounds."""
    _check_t_sec(t_sec)
    return t_r > d * t_sec
