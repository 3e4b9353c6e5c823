"""Exact evaluation of finitely additive set functions on window sets.

Every measure here is an evaluator of cylinders supported on coordinates
>= 0, extended to finite unions by summing over disjoint word cells.  All
values are exact rationals; no floating point enters any value path.

The graded family attached to a base measure phi is phi_m = phi . S^m for
m <= 0, evaluated through :func:`eval_shifted`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import symbolic
from .errors import (
    GradingViolationError,
    NegativeCoordinateError,
    NotIrreducibleError,
    NotStochasticError,
    RejectedInputError,
)

Rational = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class CylinderMeasure:
    """Base class: a finitely additive set function on window sets over
    coordinates >= 0, defined through its value on single-word cylinders."""

    nonnegative = True
    symbols = 0

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        raise NotImplementedError


class MarkovMeasure(CylinderMeasure):
    """Markov chain measure: an initial distribution pushed through a
    stochastic matrix, evaluated on cylinders by the usual path product."""

    def __init__(self, pi, a):
        self.pi = tuple(_as_fraction(x) for x in pi)
        self.a = tuple(tuple(_as_fraction(x) for x in row) for row in a)
        n = len(self.pi)
        if n < 1 or len(self.a) != n or any(len(row) != n for row in self.a):
            raise RejectedInputError("matrix and initial vector sizes disagree")
        if any(x < 0 for x in self.pi) or sum(self.pi) != 1:
            raise RejectedInputError("initial vector is not a distribution")
        for row in self.a:
            if any(x < 0 for x in row):
                raise RejectedInputError("negative transition probability")
            if sum(row) != 1:
                raise NotStochasticError("matrix row does not sum to one")
        self.symbols = n
        self._marginals = {0: self.pi}

    def __repr__(self):
        return f"MarkovMeasure(pi={self.pi}, a={self.a})"

    def _marginal(self, lo: int) -> tuple[Fraction, ...]:
        if lo not in self._marginals:
            prev = self._marginal(lo - 1)
            n = len(prev)
            cur = tuple(
                sum((prev[i] * self.a[i][j] for i in range(n)), ZERO) for j in range(n)
            )
            self._marginals[lo] = cur
        return self._marginals[lo]

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        value = self._marginal(lo)[word[0]]
        for k in range(len(word) - 1):
            value *= self.a[word[k]][word[k + 1]]
        return value


class DiracMeasure(CylinderMeasure):
    """Point mass at an eventually-periodic two-sided sequence.

    The point is period[j % len(period)] at coordinate j, overridden by the
    finitely many exceptions, so membership in any finite-window set is
    decidable.
    """

    def __init__(self, symbols: int, period, exceptions=()):
        self.symbols = int(symbols)
        self.period = tuple(period)
        self.exceptions = tuple(sorted((int(j), int(s)) for j, s in exceptions))
        if not self.period:
            raise RejectedInputError("period must be nonempty")
        bad = [s for s in self.period if not 0 <= s < self.symbols]
        bad += [s for _, s in self.exceptions if not 0 <= s < self.symbols]
        if bad:
            raise RejectedInputError(f"symbols {bad} outside the alphabet")

    def __repr__(self):
        return f"DiracMeasure({self.symbols}, {self.period}, {self.exceptions})"

    def point_at(self, j: int) -> int:
        for k, s in self.exceptions:
            if k == j:
                return s
        return self.period[j % len(self.period)]

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        for offset, symbol in enumerate(word):
            if self.point_at(lo + offset) != symbol:
                return ZERO
        return ONE


class BernoulliMeasure(CylinderMeasure):
    """Product measure with one fixed symbol distribution per coordinate."""

    def __init__(self, p):
        self.p = tuple(_as_fraction(x) for x in p)
        if any(x < 0 for x in self.p) or sum(self.p) != 1:
            raise RejectedInputError("weights are not a distribution")
        self.symbols = len(self.p)

    def __repr__(self):
        return f"BernoulliMeasure({self.p})"

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        value = ONE
        for symbol in word:
            value *= self.p[symbol]
        return value


class CesaroMeasure(CylinderMeasure):
    """Average of the first n+1 backward shift images of a base measure.

    Evaluating at a set with min coordinate >= 0 only ever evaluates the
    base on sets with min coordinate >= 0, so the average stays inside the
    base algebra.
    """

    def __init__(self, base: CylinderMeasure, n: int):
        if n < 1:
            raise RejectedInputError("average length must be positive")
        self.base = base
        self.n = int(n)
        self.symbols = base.symbols
        self.nonnegative = base.nonnegative

    def __repr__(self):
        return f"CesaroMeasure({self.base!r}, {self.n})"

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        total = sum((self.base.cell_value(lo + j, word) for j in range(self.n + 1)), ZERO)
        return total / (self.n + 1)


class ConvexMeasure(CylinderMeasure):
    """Convex combination of measures over the same alphabet."""

    def __init__(self, weights, parts):
        self.weights = tuple(_as_fraction(x) for x in weights)
        self.parts = tuple(parts)
        if len(self.weights) != len(self.parts) or not self.parts:
            raise RejectedInputError("weights and parts disagree")
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            raise RejectedInputError("weights are not convex")
        sizes = {p.symbols for p in self.parts}
        if len(sizes) != 1:
            raise RejectedInputError("parts live over different alphabets")
        self.symbols = self.parts[0].symbols
        self.nonnegative = all(p.nonnegative for p in self.parts)

    def __repr__(self):
        return f"ConvexMeasure({self.weights}, {self.parts})"

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        return sum(
            (w * p.cell_value(lo, word) for w, p in zip(self.weights, self.parts)), ZERO
        )


class SignedDiffMeasure(CylinderMeasure):
    """psi - c * phi with c >= 0; the one kind that may evaluate negative."""

    nonnegative = False

    def __init__(self, psi: CylinderMeasure, c, phi: CylinderMeasure):
        self.psi = psi
        self.c = _as_fraction(c)
        self.phi = phi
        if self.c < 0:
            raise RejectedInputError("scale must be nonnegative")
        if psi.symbols != phi.symbols:
            raise RejectedInputError("parts live over different alphabets")
        self.symbols = psi.symbols

    def __repr__(self):
        return f"SignedDiffMeasure({self.psi!r}, {self.c}, {self.phi!r})"

    def cell_value(self, lo: int, word: tuple[int, ...]) -> Fraction:
        return self.psi.cell_value(lo, word) - self.c * self.phi.cell_value(lo, word)


def cesaro(mu: CylinderMeasure, n: int) -> CylinderMeasure:
    """The running average of mu over its first n+1 backward shifts."""
    return CesaroMeasure(mu, n)


def eval0(mu: CylinderMeasure, s: symbolic.WindowSet) -> Fraction:
    """Value of the base set function on a window set over coordinates >= 0.

    Computed by summing the disjoint word cells of the canonical form; the
    empty set gets 0 and the full space the measure's total mass.
    """
    if mu.symbols != s.n:
        raise RejectedInputError("set and measure alphabets disagree")
    key = s.canonical_key()
    if key == ("empty",):
        return ZERO
    if key == ("full",):
        return sum((mu.cell_value(0, (b,)) for b in range(s.n)), ZERO)
    lo = key[0]
    if lo < 0:
        raise NegativeCoordinateError(
            f"set depends on coordinate {lo} below the base algebra"
        )
    return sum((mu.cell_value(lo, word) for word in s.iter_words()), ZERO)


def eval_shifted(mu: CylinderMeasure, m: int, s: symbolic.WindowSet) -> Fraction:
    """Value of the grade-m member of the shifted family, phi . S^m.

    Requires m <= 0 and the set determined on coordinates >= m.
    """
    if m > 0:
        raise RejectedInputError("grades are nonpositive")
    if s.is_degenerate:
        return eval0(mu, s)
    if s.min_coordinate() < m:
        raise GradingViolationError(
            f"set depends on coordinate {s.min_coordinate()} below grade {m}"
        )
    return eval0(mu, symbolic.shift(s, m))


def _reachable(a: Sequence[Sequence[Fraction]], start: int, transpose: bool) -> set[int]:
    n = len(a)
    seen = {start}
    frontier = [start]
    while frontier:
        i = frontier.pop()
        for j in range(n):
            edge = a[j][i] if transpose else a[i][j]
            if edge > 0 and j not in seen:
                seen.add(j)
                frontier.append(j)
    return seen


def stationary_distribution(a: Sequence[Sequence]) -> tuple[Fraction, ...]:
    """The unique probability vector fixed by an irreducible stochastic
    matrix, found by exact Gaussian elimination."""
    a = [[_as_fraction(x) for x in row] for row in a]
    n = len(a)
    if any(len(row) != n for row in a):
        raise RejectedInputError("matrix is not square")
    for row in a:
        if any(x < 0 for x in row):
            raise RejectedInputError("negative transition probability")
        if sum(row) != 1:
            raise NotStochasticError("matrix row does not sum to one")
    if len(_reachable(a, 0, False)) != n or len(_reachable(a, 0, True)) != n:
        raise NotIrreducibleError("transition matrix is not irreducible")
    # unknowns pi_0..pi_{n-1}: (A^T - I) pi = 0 with the last equation
    # replaced by sum(pi) = 1.
    rows = []
    for j in range(n - 1):
        rows.append([a[i][j] - (1 if i == j else 0) for i in range(n)] + [ZERO])
    rows.append([ONE] * n + [ONE])
    for col in range(n):
        pivot = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = 1 / rows[col][col]
        rows[col] = [x * inv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [x - factor * y for x, y in zip(rows[r], rows[col])]
    pi = tuple(rows[r][n] for r in range(n))
    assert sum(pi) == 1
    return pi


def stationary_markov(a: Sequence[Sequence]) -> MarkovMeasure:
    """Markov measure started from the stationary vector of ``a``."""
    pi = stationary_distribution(a)
    return MarkovMeasure(pi, tuple(tuple(_as_fraction(x) for x in row) for row in a))
