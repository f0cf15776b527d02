"""Exact and closed-form measures of product and max approximation domains.

Geometry conventions
--------------------
A q-slice in dimension n is the set of x in [0,1]^n with

* product mode:  prod_i dist_i < delta
* max mode:      (max_i dist_i)**n < delta

where dist_i is ``||q x_i||`` (plain) or ``||q x_i||'`` (coprime) and
delta = psi(q).  Membership of the hyperbolic region around rational points
p/q is equivalent to the product condition because the per-coordinate
minimization over (coprime) numerators is exact; a unit test pins this down
on explicit small cases.

Closed forms used here
----------------------
* For x uniform on [0,1], ``||q x||`` is uniform on [0, 1/2] for every q, so
  with V_i = 2 dist_i i.i.d. uniform on [0,1],

      |{prod dist_i < delta}| = P(prod V_i < 2**n delta) = F_n(2**n delta),
      F_n(t) = t * sum_{k=0}^{n-1} log(1/t)**k / k!   (0 < t <= 1).

  (log of a uniform is exponential; the product has a Gamma(n) log-law.)
  This formula is validated against the Monte Carlo sampler by the test
  suite before anything downstream trusts it, and its q-independence is a
  tested property, not an assumption.

* The law of ``||q x||'`` is piecewise linear and depends only on the
  radical of q: between consecutive coprime fractions with cyclic gap g (in
  units of 1/q), the distance sweeps a tent of height g/2, so

      P(||q x||' < t) = (1/q) * sum_over_gaps min(2t, g),

  which equals 2t * phi(q)/q for t <= 1/2 and reaches 1 at g_max/2.

* The n-fold product law under the coprime marginal follows the recursion
  G_k(d) = int G_{k-1}(d/t) dF(t).  For n = 2 the integrand is piecewise
  (a + b/t) between explicit knots, so the integral is evaluated in closed
  form piece by piece; n >= 3 uses adaptive Gauss-Legendre refinement of the
  same recursion down to the analytic n = 2 base.
"""

from __future__ import annotations

import math
import threading
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import coprime_residues, default_phi_table, euler_phi, gap_multiset, radical
from .errors import ConvergenceError, ResourceBudgetError
from .measure import MeasureEstimate
from .psi import ApproxFunction, TablePsi

__all__ = [
    "IntervalUnion",
    "PiecewiseCdf",
    "RegionSpec",
    "coprime_dist_cdf",
    "product_region_measure_coprime",
    "product_region_measure_plain",
    "region_measure",
    "region_measure_1d",
    "slice_union",
    "truncated_union_1d",
    "uniform_product_cdf",
]

MERGE_EPS = 1e-15


@dataclass(frozen=True)
class RegionSpec:
    """One q-slice: dimension, threshold delta = psi(q), mode, coprimality."""

    q: int
    n: int
    delta: float
    mode: str = "product"
    coprime: bool = False

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.mode not in ("product", "max"):
            raise ValueError(f"unknown mode {self.mode!r}")


# ---------------------------------------------------------------------------
# interval unions


def union_measure_raw(starts: np.ndarray, ends: np.ndarray) -> float:
    """Measure of a union of intervals given as parallel start/end arrays."""
    if starts.size == 0:
        return 0.0
    order = np.argsort(starts, kind="stable")
    s = starts[order]
    e = ends[order]
    cm = np.maximum.accumulate(e)
    frontier = np.empty_like(cm)
    frontier[0] = -np.inf
    frontier[1:] = cm[:-1]
    contrib = e - np.maximum(s, frontier)
    return float(np.sum(contrib[contrib > 0.0]))


class IntervalUnion:
    """Sorted disjoint closed subintervals of [0, 1]."""

    __slots__ = ("starts", "ends")

    def __init__(self, starts: np.ndarray, ends: np.ndarray):
        self.starts = starts
        self.ends = ends

    @classmethod
    def from_intervals(cls, starts, ends, merge_eps: float = MERGE_EPS) -> "IntervalUnion":
        """Normalize raw intervals: clip to [0,1], sort, merge near-touching."""
        starts = np.asarray(starts, dtype=np.float64)
        ends = np.asarray(ends, dtype=np.float64)
        keep = ends > starts
        starts, ends = np.clip(starts[keep], 0.0, 1.0), np.clip(ends[keep], 0.0, 1.0)
        keep = ends > starts
        starts, ends = starts[keep], ends[keep]
        if starts.size == 0:
            return cls(starts, ends)
        order = np.argsort(starts, kind="stable")
        s, e = starts[order], ends[order]
        cm = np.maximum.accumulate(e)
        new_group = np.empty(s.size, dtype=bool)
        new_group[0] = True
        new_group[1:] = s[1:] > cm[:-1] + merge_eps
        heads = np.flatnonzero(new_group)
        tails = np.append(heads[1:], s.size) - 1
        return cls(s[heads].copy(), cm[tails].copy())

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(np.empty(0), np.empty(0))

    def __len__(self) -> int:
        return self.starts.size

    @property
    def measure(self) -> float:
        return float(np.sum(self.ends - self.starts))

    def _inside(self, xs: np.ndarray) -> np.ndarray:
        # parity of endpoint crossings; valid because intervals are disjoint
        flat = np.empty(2 * len(self))
        flat[0::2] = self.starts
        flat[1::2] = self.ends
        return np.searchsorted(flat, xs, side="right") % 2 == 1

    def intersection_measure(self, other: "IntervalUnion") -> float:
        if len(self) == 0 or len(other) == 0:
            return 0.0
        cuts = np.unique(np.concatenate([self.starts, self.ends, other.starts, other.ends]))
        if cuts.size < 2:
            return 0.0
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        both = self._inside(mids) & other._inside(mids)
        return float(np.sum((cuts[1:] - cuts[:-1])[both]))

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.from_intervals(
            np.concatenate([self.starts, other.starts]),
            np.concatenate([self.ends, other.ends]),
        )


# ---------------------------------------------------------------------------
# q-slice intervals in dimension 1


def _slice_raw_intervals(q: int, delta: float, coprime: bool) -> tuple[np.ndarray, np.ndarray]:
    """Raw (unclipped, unmerged) intervals of one 1-D slice."""
    if delta <= 0.0:
        return np.empty(0), np.empty(0)
    if coprime:
        res = coprime_residues(q).astype(np.float64)
        centers = np.concatenate([res - q, res, res + q])
        centers = centers[(centers > -delta) & (centers < q + delta)]
    else:
        centers = np.arange(0, q + 1, dtype=np.float64)
    return (centers - delta) / q, (centers + delta) / q


def slice_union(q: int, delta: float, coprime: bool = False) -> IntervalUnion:
    """Exact 1-D slice {x : dist(q, x) < delta} as an interval union."""
    if q < 1:
        raise ValueError("q must be >= 1")
    starts, ends = _slice_raw_intervals(q, delta, coprime)
    return IntervalUnion.from_intervals(starts, ends)


def region_measure_1d(spec: RegionSpec) -> MeasureEstimate:
    """Exact measure of a 1-D slice.

    Plain mode is min(1, 2 delta) for every q.  Coprime mode is
    2 delta phi(q)/q while the coprime intervals stay disjoint
    (delta < 1/2); beyond that the explicit interval union is swept.
    """
    if spec.n != 1:
        raise ValueError("region_measure_1d requires n = 1")
    d = spec.delta
    if d == 0.0:
        return MeasureEstimate.exact(0.0)
    if not spec.coprime:
        return MeasureEstimate.exact(min(1.0, 2.0 * d))
    if d < 0.5:
        return MeasureEstimate.exact(2.0 * d * euler_phi(spec.q) / spec.q)
    return MeasureEstimate.exact(min(1.0, slice_union(spec.q, d, coprime=True).measure))


# ---------------------------------------------------------------------------
# closed form for the plain product domain


def uniform_product_cdf(n: int, t: float) -> float:
    """P(V_1 * ... * V_n < t) for V_i i.i.d. uniform on [0, 1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if t <= 0.0:
        return 0.0
    if t >= 1.0:
        return 1.0
    L = -math.log(t)
    term = 1.0
    total = 1.0
    for k in range(1, n):
        term *= L / k
        total += term
    return t * total


def product_region_measure_plain(n: int, delta: float) -> MeasureEstimate:
    """|{x in [0,1]^n : prod ||q x_i|| < delta}|, independent of q."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return MeasureEstimate.closed_form(uniform_product_cdf(n, (2.0**n) * delta))


# ---------------------------------------------------------------------------
# the coprime distance law


class PiecewiseCdf:
    """Piecewise-linear CDF of ``||q x||'`` for x uniform on [0, 1].

    Built from the cyclic gap multiset of the coprime residues of the
    radical of q (the law only sees the squarefree kernel).  Evaluation is
    float by default; ``eval_fraction`` is exact on rational inputs.
    """

    __slots__ = ("modulus", "gaps", "counts", "phi", "_ccounts", "_cgsum")

    def __init__(self, modulus: int, gaps: np.ndarray, counts: np.ndarray):
        self.modulus = int(modulus)
        self.gaps = [int(g) for g in gaps]
        self.counts = [int(c) for c in counts]
        self.phi = int(sum(self.counts))
        ccounts = [0]
        cgsum = [0]
        for g, c in zip(self.gaps, self.counts):
            ccounts.append(ccounts[-1] + c)
            cgsum.append(cgsum[-1] + c * g)
        self._ccounts = ccounts
        self._cgsum = cgsum

    @property
    def max_distance(self) -> float:
        return self.gaps[-1] / 2.0

    @property
    def phi_ratio(self) -> float:
        return self.phi / self.modulus

    def _split(self, two_t: float) -> tuple[int, int]:
        """(count of gaps > 2t, weighted sum of gaps <= 2t)."""
        idx = bisect_right(self.gaps, two_t)
        return self.phi - self._ccounts[idx], self._cgsum[idx]

    def __call__(self, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if 2.0 * t >= self.gaps[-1]:
            return 1.0
        n_above, s_below = self._split(2.0 * t)
        return (2.0 * t * n_above + s_below) / self.modulus

    def eval_fraction(self, t: Fraction) -> Fraction:
        if t <= 0:
            return Fraction(0)
        if 2 * t >= self.gaps[-1]:
            return Fraction(1)
        idx = bisect_right(self.gaps, 2 * t)
        n_above = self.phi - self._ccounts[idx]
        s_below = self._cgsum[idx]
        return (2 * t * n_above + s_below) / self.modulus

    @property
    def breakpoints(self) -> list[float]:
        return [g / 2.0 for g in self.gaps]

    @property
    def values(self) -> list[float]:
        return [self(b) for b in self.breakpoints]


_cdf_cache: dict[int, PiecewiseCdf] = {}
_cdf_lock = threading.Lock()


def coprime_dist_cdf(q: int) -> PiecewiseCdf:
    """Exact law of ``||q x||'``; cached per radical of q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    r = radical(q)
    cdf = _cdf_cache.get(r)
    if cdf is None:
        gaps, counts = gap_multiset(r)
        cdf = PiecewiseCdf(r, gaps, counts)
        with _cdf_lock:
            _cdf_cache.setdefault(r, cdf)
    return cdf


# ---------------------------------------------------------------------------
# n-fold product of coprime distances


def _product_cdf2(cdf: PiecewiseCdf, delta: float) -> float:
    """P(D1 * D2 < delta), D_i i.i.d. with law cdf, evaluated piece by piece.

    Between knots the density is constant and F(delta/t) is linear in 1/t,
    so each piece integrates to closed form with one logarithm.
    """
    T = cdf.max_distance
    if delta <= 0.0:
        return 0.0
    if delta >= T * T:
        return 1.0
    r = cdf.modulus
    knots = {0.0, T, delta / T}
    for g in cdf.gaps:
        half = g / 2.0
        if half < T:
            knots.add(half)
        image = 2.0 * delta / g
        if 0.0 < image < T:
            knots.add(image)
    cuts = sorted(knots)
    total = 0.0
    for t1, t2 in zip(cuts[:-1], cuts[1:]):
        if t2 <= t1:
            continue
        tm = 0.5 * (t1 + t2)
        n_density, _ = cdf._split(2.0 * tm)
        if n_density == 0:
            continue
        c_f = 2.0 * n_density / r
        if tm * T <= delta:
            # inner region: delta/t exceeds the support, F = 1
            total += c_f * (t2 - t1)
        else:
            u = delta / tm
            n_above, s_below = cdf._split(2.0 * u)
            total += c_f * (2.0 * delta * n_above * math.log(t2 / t1) + s_below * (t2 - t1)) / r
    return min(1.0, total)


_GL7 = np.polynomial.legendre.leggauss(7)
_GL15 = np.polynomial.legendre.leggauss(15)


def _gl_panel(fn, a: float, b: float, rule) -> float:
    nodes, weights = rule
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return half * float(np.sum(weights * np.array([fn(mid + half * x) for x in nodes])))


def _product_cdf_rec(
    cdf: PiecewiseCdf, k: int, delta: float, tol: float, max_panels: int = 4000
) -> tuple[float, float]:
    """(value, error bound) of the k-fold product CDF at delta."""
    T = cdf.max_distance
    if delta <= 0.0:
        return 0.0, 0.0
    if delta >= T**k:
        return 1.0, 0.0
    if k == 1:
        return cdf(delta), 1e-15
    if k == 2:
        return _product_cdf2(cdf, delta), 1e-12
    child_tol = 0.5 * tol
    quad_tol = 0.5 * tol
    r = cdf.modulus

    def child(u: float) -> float:
        return _product_cdf_rec(cdf, k - 1, u, child_tol)[0]

    # density breakpoints; below cut the child CDF is exactly 1
    cut = delta / T ** (k - 1)
    pieces = sorted({0.0, T, min(cut, T)} | {g / 2.0 for g in cdf.gaps if g / 2.0 < T})
    total = 0.0
    err = 0.0
    panels: list[tuple[float, float, float]] = []
    for t1, t2 in zip(pieces[:-1], pieces[1:]):
        if t2 <= t1:
            continue
        tm = 0.5 * (t1 + t2)
        n_density, _ = cdf._split(2.0 * tm)
        if n_density == 0:
            continue
        c_f = 2.0 * n_density / r
        if t2 <= cut:
            total += c_f * (t2 - t1)
        else:
            panels.append((t1, t2, c_f))
    work = [(a, b, cf) for a, b, cf in panels]
    used = 0
    while work:
        a, b, cf = work.pop()
        used += 1
        if used > max_panels:
            best = total + sum(
                cf2 * _gl_panel(lambda t: child(delta / t), a2, b2, _GL15)
                for a2, b2, cf2 in work + [(a, b, cf)]
            )
            raise ConvergenceError(
                f"adaptive refinement exceeded {max_panels} panels", best, err + quad_tol
            )
        fn = lambda t: child(delta / t)
        coarse = cf * _gl_panel(fn, a, b, _GL7)
        fine = cf * _gl_panel(fn, a, b, _GL15)
        panel_err = abs(fine - coarse)
        if panel_err <= quad_tol * (b - a) / T or (b - a) < 1e-14:
            total += fine
            err += panel_err
        else:
            mid = 0.5 * (a + b)
            work.append((a, mid, cf))
            work.append((mid, b, cf))
    return min(1.0, total), err + child_tol


def product_region_measure_coprime(
    q: int, n: int, delta: float, tol: float = 1e-9
) -> MeasureEstimate:
    """|{x in [0,1]^n : prod ||q x_i||' < delta}| to absolute tolerance tol."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    cdf = coprime_dist_cdf(q)
    value, err = _product_cdf_rec(cdf, n, delta, tol)
    return MeasureEstimate.numeric(value, max(err, 1e-15))


# ---------------------------------------------------------------------------
# max-mode (cubical) measures


def region_measure(spec: RegionSpec, tol: float = 1e-9) -> MeasureEstimate:
    """Measure of one q-slice under any mode/coprimality combination.

    Max-mode sets are products of per-coordinate slices, hence closed form
    per q; product mode dispatches to the dedicated routines.
    """
    if spec.n == 1:
        # both modes coincide at n = 1
        return region_measure_1d(spec)
    side = spec.delta ** (1.0 / spec.n)
    if spec.mode == "max":
        if not spec.coprime:
            return MeasureEstimate.closed_form(min(1.0, 2.0 * side) ** spec.n)
        return MeasureEstimate.closed_form(coprime_dist_cdf(spec.q)(side) ** spec.n)
    if not spec.coprime:
        return product_region_measure_plain(spec.n, spec.delta)
    return product_region_measure_coprime(spec.q, spec.n, spec.delta, tol)


# ---------------------------------------------------------------------------
# exact truncated unions in dimension 1

INTERVAL_BUDGET = 5_000_000


def _rational_slice_intervals(q: int, delta: Fraction, coprime: bool) -> list[tuple[Fraction, Fraction]]:
    if delta <= 0:
        return []
    out = []
    if coprime:
        res = coprime_residues(q).tolist()
        centers = [r - q for r in res] + res + [r + q for r in res]
        centers = [c for c in centers if -delta < c < q + delta]
    else:
        centers = list(range(0, q + 1))
    one = Fraction(1)
    for c in centers:
        lo = max(Fraction(0), Fraction(c - delta, q))
        hi = min(one, Fraction(c + delta, q))
        if hi > lo:
            out.append((lo, hi))
    return out


def _rational_union_measure(intervals: list[tuple[Fraction, Fraction]]) -> Fraction:
    total = Fraction(0)
    cursor = None
    for lo, hi in sorted(intervals):
        if cursor is None or lo > cursor:
            total += hi - lo
            cursor = hi
        elif hi > cursor:
            total += hi - cursor
            cursor = hi
    return total


def truncated_union_1d(
    f: ApproxFunction,
    Q0: int,
    Q: int,
    coprime: bool = False,
    budget: int = INTERVAL_BUDGET,
    exact: bool | None = None,
) -> MeasureEstimate:
    """Exact measure of the union of 1-D slices for Q0 <= q <= Q.

    Rational table families are swept in exact rational arithmetic when
    ``exact`` is true (the default for such families); everything else uses
    floats with a merge epsilon of 1e-15.  Sweeps whose interval count would
    exceed ``budget`` raise ResourceBudgetError.
    """
    if not 1 <= Q0 <= Q:
        raise ValueError("need 1 <= Q0 <= Q")
    qs = np.arange(Q0, Q + 1, dtype=np.int64)
    psis = f.values(qs)
    if not np.all(np.isfinite(psis)):
        raise OverflowError("family evaluates to +inf inside the truncation range")
    if exact is None:
        exact = isinstance(f, TablePsi) and f.is_rational
    table = default_phi_table(Q)
    counts = np.where(psis > 0, table.values[Q0 : Q + 1] if coprime else qs + 1, 0)
    if int(np.sum(counts)) > budget:
        raise ResourceBudgetError(
            f"sweep would build more than budget={budget} intervals; raise the budget explicitly"
        )
    if exact:
        intervals: list[tuple[Fraction, Fraction]] = []
        for q in range(Q0, Q + 1):
            dq = f.value_fraction(q)
            if dq is None:
                raise ValueError("exact sweep requires a rational-valued family")
            intervals.extend(_rational_slice_intervals(q, dq, coprime))
        return MeasureEstimate.exact(float(_rational_union_measure(intervals)))
    all_starts = []
    all_ends = []
    for q, dq in zip(qs.tolist(), psis.tolist()):
        if dq <= 0.0:
            continue
        s, e = _slice_raw_intervals(q, dq, coprime)
        all_starts.append(s)
        all_ends.append(e)
    if not all_starts:
        return MeasureEstimate.exact(0.0)
    starts = np.clip(np.concatenate(all_starts), 0.0, 1.0)
    ends = np.clip(np.concatenate(all_ends), 0.0, 1.0)
    return MeasureEstimate.exact(min(1.0, union_measure_raw(starts, ends)))
