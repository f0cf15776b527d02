"""Deterministic Monte Carlo estimation of truncated limsup sets.

Determinism contract
--------------------
Sample i's point in [0,1)^n is a pure function of (seed, i).  Any partition
of the sample-index range across workers therefore aggregates to identical
results, and re-runs with the same seed reproduce bit-identically; worker
count affects throughput only.

Generator: ``splitmix64-v1``.  Draw k of a stream is
``mix64(seed + (k+1) * 0x9E3779B97F4A7C15)`` with the SplitMix64 finalizer;
coordinate j of sample i consumes draw k = i*dim + j, and doubles take the
top 53 bits of the 64-bit word.  Estimates record the generator id and seed.

Performance note: coprime membership uses the plain distances as a filter
(``||qx||' >= ||qx||`` coordinatewise), resolves rounded numerators with a
vectorized gcd, and falls back to the exact outward coprime search only for
the rare rows where the rounded numerator shares a factor with q.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .arith import dist_nearest, dist_nearest_coprime, nearest_coprime_distance
from .errors import ResourceBudgetError
from .measure import MeasureEstimate
from .psi import ApproxFunction, family_from_spec

__all__ = [
    "ExperimentConfig",
    "GENERATOR_ID",
    "estimate_pairwise_intersection",
    "estimate_union_measure",
    "linear_forms_count",
    "membership",
    "mix64",
    "sample_points",
    "solution_count",
    "solution_counts",
]

GENERATOR_ID = "splitmix64-v1"

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit word (scalar reference path)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def sample_points(seed: int, start: int, stop: int, dim: int) -> np.ndarray:
    """Points for sample indices [start, stop), shape (stop-start, dim)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if stop < start:
        raise ValueError("empty or negative index range")
    idx = np.arange(start, stop, dtype=np.uint64)
    seed_u = np.uint64(seed & _MASK64)
    out = np.empty((stop - start, dim), dtype=np.float64)
    for j in range(dim):
        counter = idx * np.uint64(dim) + np.uint64(j + 1)
        state = seed_u + counter * np.uint64(_GOLDEN)
        out[:, j] = (_mix64_array(state) >> np.uint64(11)) * 2.0**-53
    return out


# ---------------------------------------------------------------------------
# membership


def membership(
    x: Sequence[float],
    q: int,
    f: ApproxFunction,
    mode: str = "product",
    coprime: bool = False,
    strict: bool = True,
) -> bool:
    """Strict-inequality membership of x in the q-slice (non-strict optional)."""
    psi_q = f(q)
    if not math.isfinite(psi_q):
        raise ValueError(f"psi({q}) must be finite for membership tests")
    dist = dist_nearest_coprime if coprime else dist_nearest
    if mode == "product":
        agg = 1.0
        for xi in x:
            agg *= dist(q, xi)
    elif mode == "max":
        agg = max(dist(q, xi) for xi in x) ** len(x)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return agg < psi_q if strict else agg <= psi_q


def _plain_distances(z: np.ndarray) -> np.ndarray:
    """Distances of each entry of z to the nearest integer, z preserved."""
    d = np.floor(z)
    np.subtract(z, d, out=d)
    upper = np.subtract(1.0, d)
    np.minimum(d, upper, out=d)
    return d


def _aggregate(d: np.ndarray, mode: str) -> np.ndarray:
    if mode == "product":
        n = d.shape[1]
        if n == 1:
            return d[:, 0]
        agg = d[:, 0] * d[:, 1]
        for j in range(2, n):
            agg *= d[:, j]
        return agg
    return np.max(d, axis=1) ** d.shape[1]


def _member_rows(
    z: np.ndarray, q, psi, mode: str, coprime: bool, strict: bool
) -> np.ndarray:
    """Membership for rows of z = q*x products; q and psi scalar or per-row.

    Plain distances come straight from z; the coprime variant fixes up only
    the candidate rows that pass the plain filter.
    """
    d = _plain_distances(z)
    agg = _aggregate(d, mode)
    member = agg < psi if strict else agg <= psi
    if not coprime or not member.any():
        return member
    # plain distances only filter; resolve candidates against coprime numerators
    rows = np.flatnonzero(member)
    p = np.rint(z[rows]).astype(np.int64)
    q_rows = q[rows][:, None] if isinstance(q, np.ndarray) else np.int64(q)
    good = np.gcd(p, q_rows) == 1
    all_good = good.all(axis=1)
    out = np.zeros_like(member)
    out[rows[all_good]] = True
    mixed = rows[~all_good]
    mixed_good = good[~all_good]
    for ridx, r in enumerate(mixed):
        qi = int(q[r]) if isinstance(q, np.ndarray) else int(q)
        pv = float(psi[r]) if isinstance(psi, np.ndarray) else float(psi)
        dd = d[r].copy()
        for jcol in np.flatnonzero(~mixed_good[ridx]):
            dd[jcol] = nearest_coprime_distance(float(z[r, jcol]), qi)
        agg_r = float(np.prod(dd)) if mode == "product" else float(np.max(dd)) ** dd.size
        out[r] = agg_r < pv if strict else agg_r <= pv
    return out


def _membership_bulk(
    xs: np.ndarray, q: int, psi_q: float, mode: str, coprime: bool, strict: bool = True
) -> np.ndarray:
    """Vectorized membership of many points in one q-slice."""
    if psi_q <= 0.0 and strict:
        return np.zeros(xs.shape[0], dtype=bool)
    return _member_rows(float(q) * xs, q, psi_q, mode, coprime, strict)


# ---------------------------------------------------------------------------
# experiment configuration


def _geometric_grid(Q0: int, Q: int, ratio: float = 2.0) -> tuple[int, ...]:
    grid = []
    g = Q0
    while g < Q:
        grid.append(int(g))
        g = max(int(g) + 1, int(round(g * ratio)))
    grid.append(Q)
    return tuple(sorted(set(grid)))


@dataclass(frozen=True)
class ExperimentConfig:
    """A self-describing union-measure experiment."""

    family: ApproxFunction
    n: int
    Q: int
    samples: int
    seed: int
    mode: str = "product"
    coprime: bool = False
    Q0: int = 1
    q_grid: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 1 <= self.Q0 <= self.Q:
            raise ValueError("need 1 <= Q0 <= Q")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.mode not in ("product", "max"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.q_grid is not None:
            grid = tuple(int(g) for g in self.q_grid)
            if list(grid) != sorted(grid):
                raise ValueError("q_grid must be sorted")
            if grid and (grid[0] < self.Q0 or grid[-1] > self.Q):
                raise ValueError("q_grid must lie within [Q0, Q]")
            object.__setattr__(self, "q_grid", grid)

    @property
    def checkpoints(self) -> tuple[int, ...]:
        if self.q_grid:
            return self.q_grid
        return _geometric_grid(self.Q0, self.Q)

    def to_dict(self) -> dict:
        return {
            "family": self.family.spec_dict(),
            "n": self.n,
            "mode": self.mode,
            "coprime": self.coprime,
            "Q0": self.Q0,
            "Q": self.Q,
            "samples": self.samples,
            "seed": self.seed,
            "q_grid": list(self.q_grid) if self.q_grid else None,
            "generator": GENERATOR_ID,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        grid = d.get("q_grid")
        return cls(
            family=family_from_spec(d["family"]),
            n=int(d["n"]),
            mode=d.get("mode", "product"),
            coprime=bool(d.get("coprime", False)),
            Q0=int(d.get("Q0", 1)),
            Q=int(d["Q"]),
            samples=int(d["samples"]),
            seed=int(d["seed"]),
            q_grid=tuple(grid) if grid else None,
        )

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# estimators


def _scan_chunk(
    seed: int,
    start: int,
    stop: int,
    n: int,
    qs: np.ndarray,
    psis: np.ndarray,
    mode: str,
    coprime: bool,
) -> np.ndarray:
    """First hitting q per sample in [start, stop); 0 when never a member."""
    xs = sample_points(seed, start, stop, n)
    first_hit = np.zeros(stop - start, dtype=np.int64)
    orig = np.arange(stop - start)
    for q, psi_q in zip(qs.tolist(), psis.tolist()):
        if psi_q <= 0.0:
            continue
        member = _membership_bulk(xs, q, psi_q, mode, coprime)
        if member.any():
            first_hit[orig[member]] = q
            keep = ~member
            xs = xs[keep]
            orig = orig[keep]
            if orig.size == 0:
                break
    return first_hit


def _chunk_bounds(samples: int, workers: int) -> list[tuple[int, int]]:
    bounds = [samples * w // workers for w in range(workers + 1)]
    return [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def estimate_union_measure(
    cfg: ExperimentConfig, workers: int = 1
) -> list[tuple[int, MeasureEstimate]]:
    """Union-measure estimates at each checkpoint of cfg.

    Each sample records the smallest q in [Q0, Q] whose slice contains it;
    checkpoint estimates are hit fractions with 95% confidence intervals.
    With psi identically zero on the range the union is empty by the strict
    inequality, reported as exact zeros.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    qs = np.arange(cfg.Q0, cfg.Q + 1, dtype=np.int64)
    psis = cfg.family.values(qs)
    if not np.all(np.isfinite(psis)):
        raise ValueError("family must evaluate finite on [Q0, Q]")
    if not np.any(psis > 0.0):
        return [(qc, MeasureEstimate.exact(0.0)) for qc in cfg.checkpoints]
    chunks = _chunk_bounds(cfg.samples, workers)

    def run(bound: tuple[int, int]) -> np.ndarray:
        return _scan_chunk(cfg.seed, bound[0], bound[1], cfg.n, qs, psis, cfg.mode, cfg.coprime)

    if workers == 1:
        parts = [run(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    first_hit = np.concatenate(parts)
    out = []
    for qc in cfg.checkpoints:
        hits = int(np.count_nonzero((first_hit > 0) & (first_hit <= qc)))
        out.append((qc, MeasureEstimate.monte_carlo(hits, cfg.samples, cfg.seed, GENERATOR_ID)))
    return out


def estimate_pairwise_intersection(
    q: int,
    r: int,
    f: ApproxFunction,
    n: int,
    mode: str = "product",
    coprime: bool = False,
    samples: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> MeasureEstimate:
    """Monte Carlo measure of the intersection of the q- and r-slices."""
    psi_q, psi_r = f(q), f(r)
    if not (math.isfinite(psi_q) and math.isfinite(psi_r)):
        raise ValueError("psi must be finite at q and r")
    chunks = _chunk_bounds(samples, workers)

    def run(bound: tuple[int, int]) -> int:
        xs = sample_points(seed, bound[0], bound[1], n)
        member = _membership_bulk(xs, q, psi_q, mode, coprime)
        if r != q:
            member &= _membership_bulk(xs, r, psi_r, mode, coprime)
        return int(np.count_nonzero(member))

    if workers == 1:
        hits = sum(run(c) for c in chunks)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run, chunks))
    return MeasureEstimate.monte_carlo(hits, samples, seed, GENERATOR_ID)


def solution_count(
    x: Sequence[float],
    f: ApproxFunction,
    Q: int,
    mode: str = "product",
    coprime: bool = False,
    strict: bool = True,
) -> int:
    """#{q <= Q : x is in the q-slice}; the finite truncation counter."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    xv = np.asarray(x, dtype=np.float64)
    qs = np.arange(1, Q + 1, dtype=np.int64)
    psis = f.values(qs)
    if not np.all(np.isfinite(psis)):
        raise ValueError("family must evaluate finite on [1, Q]")
    z = qs[:, None].astype(np.float64) * xv[None, :]
    member = _member_rows(z, qs, psis, mode, coprime, strict)
    return int(np.count_nonzero(member))


def solution_counts(
    x: Sequence[float],
    f: ApproxFunction,
    grid: Sequence[int],
    mode: str = "product",
    coprime: bool = False,
    strict: bool = True,
) -> list[tuple[int, int]]:
    """solution_count at each checkpoint of grid, from one membership pass."""
    grid = sorted(set(int(g) for g in grid))
    if not grid or grid[0] < 1:
        raise ValueError("grid checkpoints must be >= 1")
    Q = grid[-1]
    xv = np.asarray(x, dtype=np.float64)
    qs = np.arange(1, Q + 1, dtype=np.int64)
    psis = f.values(qs)
    if not np.all(np.isfinite(psis)):
        raise ValueError("family must evaluate finite on [1, Q]")
    z = qs[:, None].astype(np.float64) * xv[None, :]
    member = _member_rows(z, qs, psis, mode, coprime, strict)
    cum = np.cumsum(member)
    return [(g, int(cum[g - 1])) for g in grid]


def linear_forms_count(
    X,
    Psi: ApproxFunction | Callable,
    Qbound: int,
    coprime: bool = False,
    budget: int = 200_000,
) -> int:
    """Solutions of the linear-forms inequality with integer vectors |q|_inf <= Qbound.

    X is an m x n matrix over [0,1]; q runs over nonzero integer row vectors;
    each q is counted once with the numerator vector p chosen per coordinate
    to minimize |(qX)_i + p_i|.  With ``coprime`` the p_i are constrained to
    gcd(p_i, g) = 1 where g is the gcd of the components of q.  When Psi is
    an ApproxFunction it is applied to the sup norm of q.
    """
    import itertools

    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be an m x n matrix")
    m, n = X.shape
    total = (2 * Qbound + 1) ** m - 1
    if total > budget:
        raise ResourceBudgetError(
            f"enumeration of {total} vectors exceeds budget={budget}; raise it explicitly"
        )
    if isinstance(Psi, ApproxFunction):
        psi_of = lambda qv: Psi(int(np.max(np.abs(qv))))
    else:
        psi_of = lambda qv: float(Psi(tuple(int(c) for c in qv)))
    count = 0
    for q_tuple in itertools.product(range(-Qbound, Qbound + 1), repeat=m):
        if not any(q_tuple):
            continue
        qv = np.array(q_tuple, dtype=np.float64)
        y = qv @ X
        if coprime:
            g = 0
            for c in q_tuple:
                g = math.gcd(g, abs(c))
            prod = 1.0
            for yi in y:
                prod *= nearest_coprime_distance(float(yi), g)
        else:
            prod = 1.0
            for yi in y:
                prod *= abs(yi - round(yi))
        if prod < psi_of(qv):
            count += 1
    return count
