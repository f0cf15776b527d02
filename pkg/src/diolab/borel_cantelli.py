"""Second-moment lower bounds for unions of events and quasi-independence diagnostics.

The central quantity is the divergence-type lower bound

    (sum_{s<=Q} mu(E_s))**2 / sum_{s,t<=Q} mu(E_s intersect E_t)

which never exceeds the measure of the union at the same truncation
(Cauchy-Schwarz), so it doubles as a checkable certificate against exact
union measures.  The limsup over Q is reported as a running maximum over a
geometric checkpoint grid (ratio 2 by default); the grid is a computable
stand-in, configurable by the caller.

Pair measures can come from three sources, recorded by the caller: exact
interval geometry (1-D), Monte Carlo estimates, or the analytic independence
model mu(E_s) * mu(E_t).  The independence model uses the accumulator
identity  sum_{s,t} = S1 + S1**2 - S2  (S1 = sum mu, S2 = sum mu**2) instead
of the literal double loop; the two are cross-checked by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import UndefinedBoundError, UndefinedRatioError
from .measure import MeasureEstimate
from .psi import ApproxFunction

__all__ = [
    "EventStats",
    "bc_lower_bound",
    "bc_lower_bound_interval",
    "bc_scan",
    "quasi_independence_ratio",
]

INDEPENDENT = "independence"


@dataclass(frozen=True)
class EventStats:
    """Per-event measures plus a pair-measure source.

    ``pairs`` is the string "independence", a full (Q, Q) matrix, or a
    callable (s, t) -> measure with 1-based indices.  Optional ``pairs_low``
    and ``pairs_high`` matrices carry confidence bounds for Monte Carlo pair
    tables and feed the interval form of the bound.
    """

    singles: np.ndarray
    pairs: object = INDEPENDENT
    pairs_low: np.ndarray | None = None
    pairs_high: np.ndarray | None = None

    def __post_init__(self):
        singles = np.asarray(self.singles, dtype=np.float64)
        object.__setattr__(self, "singles", singles)
        if singles.ndim != 1 or singles.size == 0:
            raise ValueError("singles must be a nonempty 1-D array")
        if singles.min() < 0.0 or singles.max() > 1.0 + 1e-12:
            raise ValueError("event measures must lie in [0, 1]")
        if isinstance(self.pairs, np.ndarray):
            if self.pairs.shape != (singles.size, singles.size):
                raise ValueError("pair matrix shape must match singles")
        elif self.pairs != INDEPENDENT and not callable(self.pairs):
            raise ValueError("pairs must be 'independence', a matrix, or a callable")

    @property
    def q_max(self) -> int:
        return self.singles.size

    def pair_sum(self, Q: int) -> float:
        """sum_{s,t <= Q} mu(E_s intersect E_t)."""
        if not 1 <= Q <= self.q_max:
            raise ValueError(f"Q={Q} outside [1, {self.q_max}]")
        mu = self.singles[:Q]
        if isinstance(self.pairs, np.ndarray):
            return float(np.sum(self.pairs[:Q, :Q]))
        if self.pairs == INDEPENDENT:
            s1 = float(np.sum(mu))
            s2 = float(np.sum(mu * mu))
            return s1 + s1 * s1 - s2
        total = 0.0
        for s in range(1, Q + 1):
            for t in range(1, Q + 1):
                total += self.pairs(s, t)
        return total


def bc_lower_bound(stats: EventStats, Q: int) -> float:
    """(sum of singles)**2 over the pair sum, truncated at Q."""
    denom = stats.pair_sum(Q)
    if denom == 0.0:
        raise UndefinedBoundError(f"pair sum is zero at Q={Q}")
    num = float(np.sum(stats.singles[:Q]))
    return num * num / denom


def bc_lower_bound_interval(stats: EventStats, Q: int) -> tuple[float, float]:
    """Interval form of the bound when pair tables carry confidence bounds.

    The quotient interval is [num/denom_high, num/denom_low]; without CI
    tables it degenerates to the point bound.
    """
    num = float(np.sum(stats.singles[:Q])) ** 2
    if stats.pairs_low is None or stats.pairs_high is None:
        v = bc_lower_bound(stats, Q)
        return v, v
    lo = float(np.sum(stats.pairs_low[:Q, :Q]))
    hi = float(np.sum(stats.pairs_high[:Q, :Q]))
    if hi == 0.0:
        raise UndefinedBoundError(f"pair sum upper bound is zero at Q={Q}")
    upper = num / lo if lo > 0.0 else math.inf
    return num / hi, upper


def bc_scan(stats: EventStats, grid: Sequence[int]) -> tuple[list[tuple[int, float]], float]:
    """Bound at each checkpoint plus the running maximum (limsup proxy)."""
    grid = sorted(set(int(g) for g in grid))
    if not grid:
        raise ValueError("empty checkpoint grid")
    points = [(Q, bc_lower_bound(stats, Q)) for Q in grid]
    return points, max(b for _, b in points)


def quasi_independence_ratio(
    q: int,
    r: int,
    f: ApproxFunction,
    n: int,
    intersection: MeasureEstimate | float,
) -> float:
    """Intersection measure over psi(q) log(q)**(n-1) * psi(r) log(r)**(n-1).

    A uniform band of these ratios across pairs is the empirical face of
    pairwise quasi-independence on average.
    """
    if q == r:
        raise ValueError("quasi-independence ratio needs q != r")
    if n >= 2 and min(q, r) < 2:
        raise ValueError("need q, r >= 2 when n >= 2 (log weight vanishes)")
    psi_q, psi_r = f(q), f(r)
    if psi_q <= 0.0 or psi_r <= 0.0:
        raise UndefinedRatioError("psi must be positive at q and r")
    denom = psi_q * math.log(q) ** (n - 1) * psi_r * math.log(r) ** (n - 1)
    if denom == 0.0:
        raise UndefinedRatioError("zero denominator in quasi-independence ratio")
    value = intersection.value if isinstance(intersection, MeasureEstimate) else float(intersection)
    return value / denom
