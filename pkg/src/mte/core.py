"""Exact arithmetic, k-ary outcome spaces, distributions and quantiles.

All probabilities are :class:`fractions.Fraction` values. Nothing in this
module rounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    BadBand,
    BadDimension,
    BadK,
    EmptyVector,
    NotASimplexPoint,
    OutcomeOutOfRange,
)

Rational = Fraction
RationalLike = Union[int, Fraction, str]

MAX_K = 64
MAX_N = 10**7

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def as_rational(value: RationalLike) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: they would silently carry binary rounding error
    into quantities that are supposed to be exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, _RationalABC)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def check_k(k: int) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise BadK(f"k must be an integer, got {k!r}")
    if k < 2:
        raise BadK(f"k must be at least 2, got {k}")
    if k > MAX_K:
        raise BadK(f"k must be at most {MAX_K}, got {k}")
    return int(k)


@dataclass(frozen=True)
class OutcomeSpace:
    """Outcomes ``{0, ..., k-1}`` and individual effects ``{-(k-1), ..., k-1}``."""

    k: int

    def __post_init__(self):
        check_k(self.k)

    @property
    def outcomes(self) -> range:
        return range(self.k)

    @property
    def ite_values(self) -> range:
        return range(-(self.k - 1), self.k)

    def __contains__(self, value) -> bool:
        return value in self.outcomes


@dataclass(frozen=True)
class Marginal:
    """A point of the probability simplex over ``k`` outcome values."""

    k: int
    p: tuple[Fraction, ...]

    def __post_init__(self):
        check_k(self.k)
        if len(self.p) != self.k:
            raise BadDimension(f"expected {self.k} probabilities, got {len(self.p)}")
        for j, value in enumerate(self.p):
            if not isinstance(value, Fraction):
                raise TypeError(f"p[{j}] is not a Fraction")
            if value < 0:
                raise NotASimplexPoint(f"p[{j}] = {value} is negative")
        total = sum(self.p, ZERO)
        if total != 1:
            raise NotASimplexPoint(f"probabilities sum to {total}, not 1")

    def __getitem__(self, j: int) -> Fraction:
        return self.p[j]

    def __iter__(self):
        return iter(self.p)

    def __len__(self) -> int:
        return self.k

    @property
    def denominator(self) -> int:
        """Least common denominator of the entries."""
        return math.lcm(*(v.denominator for v in self.p))


def make_marginal(k: int, values: Sequence[RationalLike]) -> Marginal:
    values = list(values)
    if len(values) != k:
        raise BadDimension(f"expected {k} probabilities, got {len(values)}")
    return Marginal(k, tuple(as_rational(v) for v in values))


def point_mass(k: int, x: int) -> Marginal:
    if not 0 <= x < k:
        raise OutcomeOutOfRange(f"outcome {x} is outside 0..{k - 1}")
    return Marginal(k, tuple(ONE if j == x else ZERO for j in range(k)))


@dataclass(frozen=True)
class Joint:
    """Joint law of (treatment, control) outcomes; ``m[x][y] = P[a=x, b=y]``."""

    k: int
    m: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        check_k(self.k)
        if len(self.m) != self.k or any(len(row) != self.k for row in self.m):
            raise BadDimension(f"joint must be a {self.k}x{self.k} matrix")
        total = ZERO
        for x, row in enumerate(self.m):
            for y, value in enumerate(row):
                if not isinstance(value, Fraction):
                    raise TypeError(f"m[{x}][{y}] is not a Fraction")
                if value < 0:
                    raise NotASimplexPoint(f"m[{x}][{y}] = {value} is negative")
                total += value
        if total != 1:
            raise NotASimplexPoint(f"joint entries sum to {total}, not 1")

    def __getitem__(self, x: int) -> tuple[Fraction, ...]:
        return self.m[x]

    def cells(self) -> Iterable[tuple[int, int, Fraction]]:
        for x, row in enumerate(self.m):
            for y, value in enumerate(row):
                yield x, y, value

    @property
    def denominator(self) -> int:
        return math.lcm(*(v.denominator for row in self.m for v in row))


def make_joint(k: int, rows: Sequence[Sequence[RationalLike]]) -> Joint:
    rows = [list(row) for row in rows]
    if len(rows) != k or any(len(row) != k for row in rows):
        raise BadDimension(f"joint must be a {k}x{k} matrix")
    return Joint(k, tuple(tuple(as_rational(v) for v in row) for row in rows))


def marginals_of(j: Joint) -> tuple[Marginal, Marginal]:
    """Row sums (treatment marginal) and column sums (control marginal)."""
    rows = tuple(sum(row, ZERO) for row in j.m)
    cols = tuple(sum((j.m[x][y] for x in range(j.k)), ZERO) for y in range(j.k))
    return Marginal(j.k, rows), Marginal(j.k, cols)


@dataclass(frozen=True)
class OutcomeVectorPair:
    """Full potential-outcome table of ``n`` units. Simulation only."""

    k: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        check_k(self.k)
        a = np.asarray(self.a, dtype=np.int64)
        b = np.asarray(self.b, dtype=np.int64)
        if a.ndim != 1 or a.shape != b.shape:
            raise BadDimension("a and b must be 1-d vectors of equal length")
        if a.size == 0:
            raise EmptyVector("outcome vectors must be non-empty")
        if a.size > MAX_N:
            raise BadDimension(f"n must be at most {MAX_N}")
        for name, v in (("a", a), ("b", b)):
            if v.min() < 0 or v.max() >= self.k:
                raise OutcomeOutOfRange(f"{name} has outcomes outside 0..{self.k - 1}")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return int(self.a.size)

    def ite(self) -> np.ndarray:
        return self.a - self.b


def _count_below(r, v: np.ndarray, inclusive: bool) -> int:
    # v is integer-valued, so v < r iff v < ceil(r) and v <= r iff v <= floor(r).
    r = as_rational(r) if not isinstance(r, (int, np.integer)) else int(r)
    if inclusive:
        return int(np.count_nonzero(v <= math.floor(r)))
    return int(np.count_nonzero(v < math.ceil(r)))


def _as_vector(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise EmptyVector("quantiles need a non-empty vector")
    return arr


def q_lower_vec(r, v) -> Fraction:
    """Fraction of entries of ``v`` strictly below ``r``."""
    arr = _as_vector(v)
    return Fraction(_count_below(r, arr, inclusive=False), arr.size)


def q_upper_vec(r, v) -> Fraction:
    """Fraction of entries of ``v`` at most ``r``."""
    arr = _as_vector(v)
    return Fraction(_count_below(r, arr, inclusive=True), arr.size)


def in_quantile_band(r, v, lo: RationalLike, hi: RationalLike) -> bool:
    """True iff ``r`` is an ``lo``-to-``hi`` quantile of ``v``.

    That is, the rank interval ``[q_lower, q_upper]`` of ``r`` in ``v``
    meets ``[lo, hi]``.
    """
    lo, hi = as_rational(lo), as_rational(hi)
    if not 0 <= lo <= hi <= 1:
        raise BadBand(f"need 0 <= lo <= hi <= 1, got lo={lo}, hi={hi}")
    arr = _as_vector(v)
    ql = Fraction(_count_below(r, arr, inclusive=False), arr.size)
    qu = Fraction(_count_below(r, arr, inclusive=True), arr.size)
    return max(lo, ql) <= min(hi, qu)


def q_lower_joint(r, j: Joint) -> Fraction:
    """Mass of cells with ``x - y < r``."""
    r = as_rational(r)
    return sum((v for x, y, v in j.cells() if x - y < r), ZERO)


def q_upper_joint(r, j: Joint) -> Fraction:
    """Mass of cells with ``x - y <= r``."""
    r = as_rational(r)
    return sum((v for x, y, v in j.cells() if x - y <= r), ZERO)


def vector_median(v) -> int:
    """Lower median of an integer vector (the middle element of the sort)."""
    arr = np.sort(_as_vector(v))
    return int(arr[(arr.size - 1) // 2])
