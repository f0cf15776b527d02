"""Exact fiber-triviality analysis on finite discrete product spaces.

Everything here runs in exact rational arithmetic: triviality (null or full)
is an exact zero/one comparison of Fractions, never a tolerance.  Atoms of
weight zero are first-class citizens; they are the only way "almost every"
can differ from "every" in this finite setting, and the test suite feeds
them in deliberately.

The headline check is the biconditional: a product set is trivial for the
product measure exactly when almost every row fiber is trivial AND almost
every column fiber is trivial.  Neither one-sided statement suffices, and
``cross_fibering_check`` reports both fiber fractions so callers can
exhibit the non-reversibility witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

__all__ = [
    "DiscreteSpace",
    "FiberReport",
    "ProductDecomposition",
    "ProductSet",
    "Triviality",
    "all_member_matrices",
    "cross_fibering_check",
    "decompose",
    "fiber_x",
    "fiber_y",
    "product_measure",
]


def _as_fraction(v) -> Fraction:
    if isinstance(v, float):
        raise ValueError("weights must be exact rationals (int, Fraction, or 'a/b' string)")
    return Fraction(v)


@dataclass(frozen=True)
class DiscreteSpace:
    """Finite atom list with exact nonnegative rational weights summing to 1."""

    atoms: tuple
    weights: tuple

    def __post_init__(self):
        weights = tuple(_as_fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(self.atoms) != len(weights):
            raise ValueError("atoms and weights must have equal length")
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atoms must be distinct")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be >= 0")
        if sum(weights) != 1:
            raise ValueError(f"weights must sum to exactly 1, got {sum(weights)}")

    @classmethod
    def uniform(cls, k: int) -> "DiscreteSpace":
        return cls(tuple(range(k)), tuple(Fraction(1, k) for _ in range(k)))

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, atom) -> int:
        try:
            return self.atoms.index(atom)
        except ValueError:
            raise ValueError(f"unknown atom {atom!r}") from None

    def measure(self, flags: Sequence[bool]) -> Fraction:
        return sum((w for w, f in zip(self.weights, flags) if f), Fraction(0))


@dataclass(frozen=True)
class Triviality:
    """Null / Full / Nontrivial classification with the exact measure."""

    kind: str
    measure: Fraction

    @classmethod
    def of(cls, measure: Fraction) -> "Triviality":
        if measure == 0:
            return cls("Null", measure)
        if measure == 1:
            return cls("Full", measure)
        return cls("Nontrivial", measure)

    @property
    def trivial(self) -> bool:
        return self.kind != "Nontrivial"


class ProductSet:
    """Subset of X x Y given by a boolean membership matrix."""

    def __init__(self, X: DiscreteSpace, Y: DiscreteSpace, member):
        member = np.asarray(member, dtype=bool)
        if member.shape != (len(X), len(Y)):
            raise ValueError(
                f"membership matrix shape {member.shape} does not match ({len(X)}, {len(Y)})"
            )
        self.X = X
        self.Y = Y
        self.member = member
        self.member.setflags(write=False)

    @classmethod
    def full(cls, X: DiscreteSpace, Y: DiscreteSpace) -> "ProductSet":
        return cls(X, Y, np.ones((len(X), len(Y)), dtype=bool))

    @classmethod
    def empty(cls, X: DiscreteSpace, Y: DiscreteSpace) -> "ProductSet":
        return cls(X, Y, np.zeros((len(X), len(Y)), dtype=bool))


def fiber_x(S: ProductSet, x) -> tuple:
    """The fiber of S through x, as a tuple of Y atoms."""
    row = S.member[S.X.index(x)]
    return tuple(a for a, m in zip(S.Y.atoms, row) if m)


def fiber_y(S: ProductSet, y) -> tuple:
    """The fiber of S through y, as a tuple of X atoms."""
    col = S.member[:, S.Y.index(y)]
    return tuple(a for a, m in zip(S.X.atoms, col) if m)


def _row_measures(S: ProductSet) -> list[Fraction]:
    return [S.Y.measure(S.member[i]) for i in range(len(S.X))]


def _col_measures(S: ProductSet) -> list[Fraction]:
    return [S.X.measure(S.member[:, j]) for j in range(len(S.Y))]


def product_measure(S: ProductSet) -> Fraction:
    """(mu x nu)(S), computed in both iteration orders; they must agree exactly."""
    by_rows = sum(
        (wx * nu for wx, nu in zip(S.X.weights, _row_measures(S))), Fraction(0)
    )
    by_cols = sum(
        (wy * mu for wy, mu in zip(S.Y.weights, _col_measures(S))), Fraction(0)
    )
    if by_rows != by_cols:
        raise AssertionError(
            "iterated integrals disagree; exact arithmetic invariant violated"
        )
    return by_rows


@dataclass(frozen=True)
class FiberReport:
    left: Triviality
    right_x: Fraction
    right_y: Fraction
    equivalence_holds: bool


def cross_fibering_check(S: ProductSet) -> FiberReport:
    """Both sides of the fibering biconditional, evaluated exactly.

    right_x is the mu-mass of atoms whose row fiber is nu-trivial, right_y
    the nu-mass of atoms whose column fiber is mu-trivial.  The equivalence
    must hold for every input; a False value signals a bug, not a valid
    mathematical outcome.
    """
    rows = _row_measures(S)
    cols = _col_measures(S)
    by_rows = sum((wx * nu for wx, nu in zip(S.X.weights, rows)), Fraction(0))
    by_cols = sum((wy * mu for wy, mu in zip(S.Y.weights, cols)), Fraction(0))
    if by_rows != by_cols:
        raise AssertionError(
            "iterated integrals disagree; exact arithmetic invariant violated"
        )
    left = Triviality.of(by_rows)
    right_x = sum(
        (wx for wx, nu in zip(S.X.weights, rows) if nu == 0 or nu == 1),
        Fraction(0),
    )
    right_y = sum(
        (wy for wy, mu in zip(S.Y.weights, cols) if mu == 0 or mu == 1),
        Fraction(0),
    )
    holds = left.trivial == (right_x == 1 and right_y == 1)
    return FiberReport(left, right_x, right_y, holds)


@dataclass(frozen=True)
class ProductDecomposition:
    """Atom classes by fiber triviality plus the witness rectangle M = X0 x Y1.

    witness_by_rows and witness_by_cols are the two iterated-integral
    evaluations of (mu x nu)(S intersect M); they agree exactly, and the
    classical contradiction appears as the impossibility of all four classes
    X0, X1, Y0, Y1 carrying positive mass while every fiber is trivial.
    """

    X0: tuple
    X1: tuple
    Xnt: tuple
    Y0: tuple
    Y1: tuple
    Ynt: tuple
    witness_by_rows: Fraction
    witness_by_cols: Fraction


def decompose(S: ProductSet) -> ProductDecomposition:
    rows = _row_measures(S)
    cols = _col_measures(S)
    x0 = [i for i, m in enumerate(rows) if m == 0]
    x1 = [i for i, m in enumerate(rows) if m == 1]
    xnt = [i for i, m in enumerate(rows) if 0 < m < 1]
    y0 = [j for j, m in enumerate(cols) if m == 0]
    y1 = [j for j, m in enumerate(cols) if m == 1]
    ynt = [j for j, m in enumerate(cols) if 0 < m < 1]
    x0_flags = np.zeros(len(S.X), dtype=bool)
    x0_flags[x0] = True
    # integrate over columns of Y1: mu(S^y intersect X0)
    by_cols = sum(
        (S.Y.weights[j] * S.X.measure(S.member[:, j] & x0_flags) for j in y1),
        Fraction(0),
    )
    y1_flags = np.zeros(len(S.Y), dtype=bool)
    y1_flags[y1] = True
    # integrate over rows of X0: nu(S_x intersect Y1)
    by_rows = sum(
        (S.X.weights[i] * S.Y.measure(S.member[i] & y1_flags) for i in x0),
        Fraction(0),
    )
    if by_rows != by_cols:
        raise AssertionError("witness rectangle evaluations disagree")
    atoms_x, atoms_y = S.X.atoms, S.Y.atoms
    return ProductDecomposition(
        X0=tuple(atoms_x[i] for i in x0),
        X1=tuple(atoms_x[i] for i in x1),
        Xnt=tuple(atoms_x[i] for i in xnt),
        Y0=tuple(atoms_y[j] for j in y0),
        Y1=tuple(atoms_y[j] for j in y1),
        Ynt=tuple(atoms_y[j] for j in ynt),
        witness_by_rows=by_rows,
        witness_by_cols=by_cols,
    )


def all_member_matrices(nx: int, ny: int) -> Iterator[np.ndarray]:
    """All 2**(nx*ny) boolean membership matrices, in a fixed order."""
    for bits in itertools.product((False, True), repeat=nx * ny):
        yield np.array(bits, dtype=bool).reshape(nx, ny)
