"""Number-theoretic kernel: totient sieve, integer distances, coprime structure.

Conventions used throughout the package:

* ``dist_nearest(q, x)`` is the distance from ``q*x`` to the nearest integer,
  always in ``[0, 1/2]``.
* ``dist_nearest_coprime(q, x)`` restricts the nearest integer to those
  coprime to ``q``; it can exceed ``1/2`` (up to half the largest run of
  non-coprime residues).
* Residues coprime to ``q`` are taken in ``[0, q)`` and their cyclic gaps sum
  to ``q``, so the gap table carries exactly the geometry of coprime
  fractions on the unit circle.
"""

from __future__ import annotations

import math
import threading
from fractions import Fraction

import numpy as np

__all__ = [
    "PhiTable",
    "coprime_gaps",
    "coprime_residues",
    "default_phi_table",
    "dist_nearest",
    "dist_nearest_coprime",
    "euler_phi",
    "gap_multiset",
    "is_prime",
    "nearest_coprime_distance",
    "padic_abs",
    "prime_factors",
    "primes_up_to",
    "radical",
]


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending (classic boolean sieve)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


class PhiTable:
    """Sieved Euler phi values for 1 <= q <= limit.

    The table is immutable after construction and safe to share across
    threads; builders below keep a process-wide cached instance.
    """

    def __init__(self, limit: int):
        if limit < 1:
            raise ValueError("PhiTable limit must be >= 1")
        self.limit = int(limit)
        values = np.arange(self.limit + 1, dtype=np.int64)
        for p in primes_up_to(self.limit):
            values[p::p] -= values[p::p] // p
        values[0] = 0
        self.values = values
        self.values.setflags(write=False)

    def phi(self, q: int) -> int:
        if not 1 <= q <= self.limit:
            raise IndexError(f"q={q} outside table range [1, {self.limit}]")
        return int(self.values[q])

    def ratio(self, qs: np.ndarray) -> np.ndarray:
        """phi(q)/q for an integer array of q values within the table."""
        qs = np.asarray(qs, dtype=np.int64)
        if qs.size and (qs.min() < 1 or qs.max() > self.limit):
            raise IndexError("q values outside table range")
        return self.values[qs] / qs


_table_lock = threading.Lock()
_default_table: PhiTable | None = None


def default_phi_table(limit: int = 10_000) -> PhiTable:
    """Shared phi table, grown on demand (never shrunk)."""
    global _default_table
    with _table_lock:
        if _default_table is None or _default_table.limit < limit:
            _default_table = PhiTable(limit)
        return _default_table


def prime_factors(q: int) -> list[int]:
    """Distinct prime factors of q >= 1 by trial division, ascending."""
    if q < 1:
        raise ValueError("q must be >= 1")
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def radical(q: int) -> int:
    """Product of the distinct primes dividing q (1 for q=1)."""
    r = 1
    for p in prime_factors(q):
        r *= p
    return r


def euler_phi(q: int, table: PhiTable | None = None) -> int:
    """Euler phi of q >= 1; table-backed when possible, else trial division."""
    if q < 1:
        raise ValueError("euler_phi requires q >= 1")
    if table is not None and q <= table.limit:
        return table.phi(q)
    if table is None:
        cached = _default_table
        if cached is not None and q <= cached.limit:
            return cached.phi(q)
    v = q
    for p in prime_factors(q):
        v = v // p * (p - 1)
    return v


def dist_nearest(q: int, x: float) -> float:
    """Distance from q*x to the nearest integer, in [0, 1/2]."""
    if q < 1:
        raise ValueError("q must be >= 1")
    y = math.fmod(q * x, 1.0)
    if y < 0.0:
        y += 1.0
    return min(y, 1.0 - y)


def nearest_coprime_distance(y: float, modulus: int) -> float:
    """min |y - p| over integers p with gcd(p, modulus) = 1.

    Candidates are scanned outward from round(y) in order of increasing
    distance; the scan provably terminates within ``modulus`` steps because
    every window of ``modulus`` consecutive integers contains a unit.
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    p0 = round(y)
    delta = y - p0
    if math.gcd(p0, modulus) == 1:
        return abs(delta)
    # near side first: |delta -+ k| = k - |delta| before k + |delta|
    near = 1 if delta > 0 else -1
    for k in range(1, modulus + 1):
        if math.gcd(p0 + near * k, modulus) == 1:
            return k - abs(delta)
        if math.gcd(p0 - near * k, modulus) == 1:
            return k + abs(delta)
    raise RuntimeError("no coprime integer found within the proven bound")


def dist_nearest_coprime(q: int, x: float) -> float:
    """Distance from q*x to the nearest integer coprime to q (>= dist_nearest)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    return nearest_coprime_distance(q * x, q)


def coprime_residues(q: int) -> np.ndarray:
    """Sorted residues r in [0, q) with gcd(r, q) = 1."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if q == 1:
        return np.zeros(1, dtype=np.int64)
    mask = np.ones(q, dtype=bool)
    for p in prime_factors(q):
        mask[::p] = False
    return np.flatnonzero(mask).astype(np.int64)


def coprime_gaps(q: int) -> list[tuple[int, int]]:
    """(residue, gap to next coprime residue) pairs, cyclic, gaps summing to q."""
    res = coprime_residues(q)
    if res.size == 1:
        return [(int(res[0]), q)]
    gaps = np.empty(res.size, dtype=np.int64)
    gaps[:-1] = np.diff(res)
    gaps[-1] = res[0] + q - res[-1]
    return list(zip(res.tolist(), gaps.tolist()))


def gap_multiset(q: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct cyclic gap lengths between coprime residues, with counts."""
    res = coprime_residues(q)
    if res.size == 1:
        return np.array([q], dtype=np.int64), np.array([1], dtype=np.int64)
    gaps = np.empty(res.size, dtype=np.int64)
    gaps[:-1] = np.diff(res)
    gaps[-1] = res[0] + q - res[-1]
    return np.unique(gaps, return_counts=True)


def padic_abs(q: int, p: int) -> Fraction:
    """p-adic absolute value |q|_p = p**(-v) with p**v the exact power dividing q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if not is_prime(p):
        raise ValueError(f"p={p} is not prime")
    v = 0
    n = q
    while n % p == 0:
        v += 1
        n //= p
    return Fraction(1, p**v)
