"""Approximating-function families and divergence-sum criteria.

Family conventions
------------------
* ``power_log(c, a, b)`` evaluates ``c * q**(-a) / log(q + 1)**b``.  The log
  sits on ``q + 1`` so the family itself is finite at q = 1; this is a family
  convention only.  Criterion weights stay literal: ``log(q)**(n-1)`` really
  is 0 at q = 1 for n >= 2, and is the empty product 1 when n = 1.
* All logarithms are natural.
* Division conventions for conditional families: ``a/0 = +inf`` for a > 0 and
  ``0/0 = 0``.
* Divergence of a series is metadata attached to a family, never inferred
  from finite partial sums.  Closed-form families carry computed metadata;
  table and derived families report "unknown".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .arith import default_phi_table, dist_nearest, euler_phi, is_prime, padic_abs
from .errors import UndefinedRatioError

__all__ = [
    "ApproxFunction",
    "CONVERGENT",
    "DIVERGENT",
    "SumCriterion",
    "SupportPredicate",
    "UNKNOWN",
    "WeightFn",
    "adversarial_primorial",
    "classify",
    "cond1_ratio",
    "cond1_scan",
    "conditional_psi",
    "family_from_spec",
    "indicator_support",
    "padic_weighted_psi",
    "partial_sum",
    "partial_sum_scan",
    "power_log",
    "psi_eval",
    "table_psi",
]

DIVERGENT = "known-divergent"
CONVERGENT = "known-convergent"
UNKNOWN = "unknown"

CRITERION_KINDS = ("plain", "log_weighted", "phi_log_weighted", "phi_plain")


@dataclass(frozen=True)
class SumCriterion:
    """One of the four divergence-sum criteria, at dimension n.

    kind:
      plain              sum psi(q)
      log_weighted       sum psi(q) * log(q)**(n-1)
      phi_log_weighted   sum (phi(q)/q)**n * psi(q) * log(q)**(n-1)
      phi_plain          sum (phi(q)/q)**n * psi(q)
    """

    kind: str
    n: int = 1

    def __post_init__(self):
        if self.kind not in CRITERION_KINDS:
            raise ValueError(f"unknown criterion kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("criterion dimension n must be >= 1")

    @property
    def log_exponent(self) -> int:
        return self.n - 1 if self.kind in ("log_weighted", "phi_log_weighted") else 0

    @property
    def uses_phi(self) -> bool:
        return self.kind in ("phi_log_weighted", "phi_plain")


class ApproxFunction:
    """Base for approximating functions psi: N -> [0, +inf].

    Instances are immutable value objects.  Scalar evaluation is
    ``f(q)``; ``f.values(qs)`` evaluates a whole int array at once.
    """

    def __call__(self, q: int) -> float:
        raise NotImplementedError

    def values(self, qs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def divergence(self, criterion: SumCriterion) -> str:
        return UNKNOWN

    def spec_dict(self) -> dict:
        raise NotImplementedError

    # exact rational evaluation; None when the family is not rational-valued
    def value_fraction(self, q: int) -> Fraction | None:
        return None


@dataclass(frozen=True)
class PowerLog(ApproxFunction):
    c: float
    a: float
    b: float

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("power_log coefficient c must be >= 0")

    def __call__(self, q: int) -> float:
        if q < 1:
            raise ValueError("q must be >= 1")
        return self.c * q ** (-self.a) * math.log(q + 1.0) ** (-self.b)

    def values(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.float64)
        return self.c * qs ** (-self.a) * np.log(qs + 1.0) ** (-self.b)

    def divergence(self, criterion: SumCriterion) -> str:
        # The summand is ~ c * q**(-a) * log(q)**(e) with e = n-1-b for the
        # log-weighted kinds.  The phi factor has a positive mean value, so by
        # partial summation it does not change convergence for these regular
        # families; the integral test settles the rest.
        if self.c == 0:
            return CONVERGENT
        e = criterion.log_exponent - self.b
        if self.a < 1:
            return DIVERGENT
        if self.a > 1:
            return CONVERGENT
        return DIVERGENT if e >= -1 else CONVERGENT

    def spec_dict(self) -> dict:
        return {"family": "power_log", "c": self.c, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class TablePsi(ApproxFunction):
    entries: tuple

    def __post_init__(self):
        for v in self.entries:
            if not isinstance(v, (int, float, Fraction)):
                raise ValueError("table entries must be numbers")
            if v < 0:
                raise ValueError("table entries must be >= 0")

    def __call__(self, q: int) -> float:
        if q < 1:
            raise ValueError("q must be >= 1")
        return float(self.entries[q - 1]) if q <= len(self.entries) else 0.0

    def values(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.int64)
        table = np.array([float(v) for v in self.entries] + [0.0])
        idx = np.where(qs <= len(self.entries), qs - 1, len(self.entries))
        return table[idx]

    @property
    def is_rational(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.entries)

    def value_fraction(self, q: int) -> Fraction | None:
        if not self.is_rational:
            return None
        return Fraction(self.entries[q - 1]) if q <= len(self.entries) else Fraction(0)

    def spec_dict(self) -> dict:
        vals = [str(v) if isinstance(v, Fraction) else v for v in self.entries]
        return {"family": "table", "values": vals}


def _first_primes(k: int) -> list[int]:
    out = []
    p = 2
    while len(out) < k:
        if is_prime(p):
            out.append(p)
        p += 1
    return out


@dataclass(frozen=True)
class SupportPredicate:
    """Named support predicate for indicator families."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in ("multiples_of", "primorial_multiples", "phi_ratio_below"):
            raise ValueError(f"unknown support predicate {self.kind!r}")
        if self.kind in ("multiples_of", "primorial_multiples") and int(self.param) < 1:
            raise ValueError("modulus parameter must be >= 1")

    @property
    def modulus(self) -> int:
        if self.kind == "multiples_of":
            return int(self.param)
        if self.kind == "primorial_multiples":
            m = 1
            for p in _first_primes(int(self.param)):
                m *= p
            return m
        raise ValueError("predicate has no modulus")

    def matches(self, q: int) -> bool:
        if self.kind == "phi_ratio_below":
            return euler_phi(q) / q < self.param
        return q % self.modulus == 0

    def mask(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.int64)
        if self.kind == "phi_ratio_below":
            table = default_phi_table(int(qs.max()) if qs.size else 1)
            return table.values[qs] / qs < self.param
        return qs % self.modulus == 0

    def spec_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param}


@dataclass(frozen=True)
class IndicatorSupport(ApproxFunction):
    base: ApproxFunction
    support: SupportPredicate

    def __call__(self, q: int) -> float:
        return self.base(q) if self.support.matches(q) else 0.0

    def values(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.int64)
        return np.where(self.support.mask(qs), self.base.values(qs), 0.0)

    def spec_dict(self) -> dict:
        return {
            "family": "indicator_support",
            "base": self.base.spec_dict(),
            "support": self.support.spec_dict(),
        }


@dataclass(frozen=True)
class ConditionalPsi(ApproxFunction):
    """base(q) / prod ||q * x_i|| with a/0 = +inf for a > 0 and 0/0 = 0."""

    base: ApproxFunction
    anchors: tuple

    def __post_init__(self):
        if not self.anchors:
            raise ValueError("conditional family needs at least one anchor")

    def __call__(self, q: int) -> float:
        d = 1.0
        for x in self.anchors:
            d *= dist_nearest(q, x)
        b = self.base(q)
        if d > 0.0:
            return b / d
        return math.inf if b > 0.0 else 0.0

    def values(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.int64)
        d = np.ones(qs.shape, dtype=np.float64)
        for x in self.anchors:
            y = np.mod(qs * float(x), 1.0)
            d *= np.minimum(y, 1.0 - y)
        b = self.base.values(qs)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(d > 0.0, b / np.where(d > 0.0, d, 1.0), np.where(b > 0.0, np.inf, 0.0))
        return out

    def spec_dict(self) -> dict:
        return {
            "family": "conditional",
            "base": self.base.spec_dict(),
            "anchors": list(self.anchors),
        }


@dataclass(frozen=True)
class WeightFn:
    """Positive weight applied to a p-adic absolute value.

    kind "power": f(t) = t**exponent; kind "const": f(t) = value > 0.
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in ("power", "const"):
            raise ValueError(f"unknown weight function kind {self.kind!r}")
        if self.kind == "const" and self.param <= 0:
            raise ValueError("constant weight must be positive")

    def __call__(self, t: float) -> float:
        if self.kind == "const":
            return self.param
        return float(t) ** self.param

    def spec_dict(self) -> dict:
        return {"kind": self.kind, "param": self.param}


def _padic_abs_array(qs: np.ndarray, p: int) -> np.ndarray:
    """|q|_p over an int array (floats)."""
    out = np.ones(qs.shape, dtype=np.float64)
    rem = qs.astype(np.int64).copy()
    divisible = rem % p == 0
    while divisible.any():
        out[divisible] /= p
        rem[divisible] //= p
        divisible &= rem % p == 0
    return out


@dataclass(frozen=True)
class PadicWeightedPsi(ApproxFunction):
    """base(q) / prod_i f_i(|q|_{p_i}), the effective function of the weighted inequality."""

    base: ApproxFunction
    primes: tuple
    weights: tuple

    def __post_init__(self):
        if len(self.primes) != len(self.weights):
            raise ValueError("primes and weights must pair up")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be distinct")
        for p in self.primes:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")

    def __call__(self, q: int) -> float:
        w = 1.0
        for p, fn in zip(self.primes, self.weights):
            w *= fn(float(padic_abs(q, p)))
        return self.base(q) / w

    def values(self, qs: np.ndarray) -> np.ndarray:
        qs = np.asarray(qs, dtype=np.int64)
        w = np.ones(qs.shape, dtype=np.float64)
        for p, fn in zip(self.primes, self.weights):
            t = _padic_abs_array(qs, p)
            if fn.kind == "const":
                w *= fn.param
            else:
                w *= t**fn.param
        return self.base.values(qs) / w

    def spec_dict(self) -> dict:
        return {
            "family": "padic_weighted",
            "base": self.base.spec_dict(),
            "primes": list(self.primes),
            "weights": [w.spec_dict() for w in self.weights],
        }


# ---------------------------------------------------------------------------
# constructors


def power_log(c: float, a: float, b: float) -> PowerLog:
    """psi(q) = c * q**(-a) / log(q+1)**b."""
    return PowerLog(float(c), float(a), float(b))


def table_psi(values: Sequence) -> TablePsi:
    """Explicit table, 1-indexed; q beyond the table evaluates to 0."""
    return TablePsi(tuple(values))


def indicator_support(base: ApproxFunction, kind: str, param: float) -> IndicatorSupport:
    return IndicatorSupport(base, SupportPredicate(kind, param))


def conditional_psi(base: ApproxFunction, anchors: Sequence[float]) -> ConditionalPsi:
    return ConditionalPsi(base, tuple(float(x) for x in anchors))


def padic_weighted_psi(
    base: ApproxFunction,
    primes: Sequence[int],
    weights: Sequence[WeightFn | tuple],
) -> PadicWeightedPsi:
    wfs = tuple(w if isinstance(w, WeightFn) else WeightFn(*w) for w in weights)
    return PadicWeightedPsi(base, tuple(int(p) for p in primes), wfs)


def adversarial_primorial(k: int = 4, c: float = 1.0, a: float = 1.0, b: float = 0.0) -> IndicatorSupport:
    """Family supported only on multiples of the k-th primorial.

    Heuristic stress case: on the support, phi(q)/q is at most the primorial's
    own ratio, which drives the phi-weighted sums far below the unweighted
    ones.  Divergence metadata stays "unknown" by design.
    """
    return indicator_support(power_log(c, a, b), "primorial_multiples", k)


def psi_eval(f: ApproxFunction, q: int) -> float:
    """Value of the family at q (may be +inf for conditional families)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return f(q)


# ---------------------------------------------------------------------------
# partial sums and the limsup-ratio condition


def _summand(f: ApproxFunction, criterion: SumCriterion, Q: int) -> np.ndarray:
    qs = np.arange(1, Q + 1, dtype=np.int64)
    vals = f.values(qs)
    if not np.all(np.isfinite(vals)):
        raise OverflowError("family evaluates to +inf inside the summation range")
    out = vals
    e = criterion.log_exponent
    if e > 0:
        out = out * np.log(qs.astype(np.float64)) ** e
    if criterion.uses_phi:
        ratio = default_phi_table(Q).values[1 : Q + 1] / qs
        out = out * ratio**criterion.n
    return out


def partial_sum(f: ApproxFunction, criterion: SumCriterion, Q: int) -> float:
    """Sum of the criterion's summand for q = 1..Q (natural logs)."""
    if Q < 1:
        raise ValueError("Q must be >= 1")
    return float(np.sum(_summand(f, criterion, Q)))


def partial_sum_scan(
    f: ApproxFunction, criterion: SumCriterion, grid: Sequence[int]
) -> list[tuple[int, float]]:
    """Partial sums at each grid checkpoint, one vectorized pass."""
    grid = sorted(set(int(g) for g in grid))
    if not grid or grid[0] < 1:
        raise ValueError("grid checkpoints must be >= 1")
    cs = np.cumsum(_summand(f, criterion, grid[-1]))
    return [(g, float(cs[g - 1])) for g in grid]


def cond1_ratio(f: ApproxFunction, n: int, Q: int) -> float:
    """Ratio of the phi-log-weighted to the log-weighted partial sum at Q."""
    num = partial_sum(f, SumCriterion("phi_log_weighted", n), Q)
    den = partial_sum(f, SumCriterion("log_weighted", n), Q)
    if den == 0.0:
        raise UndefinedRatioError(f"log-weighted partial sum is zero at Q={Q}")
    return num / den


def cond1_scan(f: ApproxFunction, n: int, grid: Sequence[int]) -> tuple[list[tuple[int, float]], float]:
    """Ratio at each checkpoint plus the running maximum (limsup proxy).

    Checkpoints with a zero denominator are skipped.
    """
    grid = sorted(set(int(g) for g in grid))
    if not grid or grid[0] < 1:
        raise ValueError("grid checkpoints must be >= 1")
    Q = grid[-1]
    num = np.cumsum(_summand(f, SumCriterion("phi_log_weighted", n), Q))
    den = np.cumsum(_summand(f, SumCriterion("log_weighted", n), Q))
    points = [(g, float(num[g - 1] / den[g - 1])) for g in grid if den[g - 1] > 0.0]
    if not points:
        raise UndefinedRatioError("log-weighted partial sum is zero on the whole grid")
    return points, max(r for _, r in points)


def classify(f: ApproxFunction, criterion: SumCriterion) -> str:
    """Stored divergence metadata for the family under the criterion."""
    return f.divergence(criterion)


# ---------------------------------------------------------------------------
# config serialization


def family_from_spec(d: dict) -> ApproxFunction:
    """Rebuild a family from its spec dict (the experiment-config format)."""
    kind = d.get("family")
    if kind == "power_log":
        return power_log(d["c"], d["a"], d["b"])
    if kind == "table":
        vals = [Fraction(v) if isinstance(v, str) else v for v in d["values"]]
        return table_psi(vals)
    if kind == "indicator_support":
        sup = d["support"]
        return indicator_support(family_from_spec(d["base"]), sup["kind"], sup["param"])
    if kind == "conditional":
        return conditional_psi(family_from_spec(d["base"]), d["anchors"])
    if kind == "padic_weighted":
        weights = [WeightFn(w["kind"], w["param"]) for w in d["weights"]]
        return padic_weighted_psi(family_from_spec(d["base"]), d["primes"], weights)
    raise ValueError(f"unknown family name {kind!r}")
