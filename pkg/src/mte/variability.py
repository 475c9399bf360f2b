"""Variability of an estimate and the minimum median width of two marginals.

For an estimate ``r`` and marginals ``eta_a`` (treatment) and ``eta_b``
(control), the variability is the pair

* ``nu_lower(r)``: the largest mass any coupling can put on ``x - y < r``;
* ``nu_upper(r)``: the smallest mass any coupling can put on ``x - y <= r``.

Both are computed exactly by a greedy fill of the coupling matrix. The
lower component fills columns from ``y = k-1`` down to ``0`` and, inside a
column, rows from the highest admissible ``x`` down to ``0``; each cell
takes as much as the residual row and column budgets allow and whichever
budget runs out is frozen. The upper component reuses the same routine on
the transposed problem, since ``1{x - y > r} = 1{y - x < -r}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .core import HALF, ZERO, Joint, Marginal
from .errors import DimensionMismatch, ROutOfRange


@dataclass(frozen=True)
class VariabilityPair:
    r: int
    nu_lower: Fraction
    nu_upper: Fraction


@dataclass(frozen=True)
class WidthEntry:
    r: int
    nu_lower: Fraction
    nu_upper: Fraction
    width: Fraction


@dataclass(frozen=True)
class WidthReport:
    """Widths of every candidate estimate plus the minimiser."""

    k: int
    entries: tuple[WidthEntry, ...]
    argmin_r: int
    min_width: Fraction

    def entry(self, r: int) -> WidthEntry:
        return self.entries[r + self.k - 1]

    def width(self, r: int) -> Fraction:
        return self.entry(r).width


@dataclass
class GreedyFillState:
    """Partial coupling built by the greedy fill, with residual budgets."""

    k: int
    entries: list[list[Fraction]]
    row_residual: list[Fraction]
    col_residual: list[Fraction]
    row_frozen: list[bool] = field(default_factory=list)
    col_frozen: list[bool] = field(default_factory=list)

    @classmethod
    def empty(cls, eta_a: Marginal, eta_b: Marginal) -> "GreedyFillState":
        k = eta_a.k
        return cls(
            k=k,
            entries=[[ZERO] * k for _ in range(k)],
            row_residual=list(eta_a.p),
            col_residual=list(eta_b.p),
            row_frozen=[v == 0 for v in eta_a.p],
            col_frozen=[v == 0 for v in eta_b.p],
        )

    def fill(self, x: int, y: int) -> Fraction:
        """Raise cell (x, y) until its row or column budget is exhausted."""
        if self.row_frozen[x] or self.col_frozen[y]:
            return ZERO
        amount = min(self.row_residual[x], self.col_residual[y])
        self.entries[x][y] += amount
        self.row_residual[x] -= amount
        self.col_residual[y] -= amount
        # both freeze on a tie
        if self.row_residual[x] == 0:
            self.row_frozen[x] = True
        if self.col_residual[y] == 0:
            self.col_frozen[y] = True
        return amount

    @property
    def mass(self) -> Fraction:
        return sum((v for row in self.entries for v in row), ZERO)


def _check(r, eta_a: Marginal, eta_b: Marginal) -> int:
    if eta_a.k != eta_b.k:
        raise DimensionMismatch(f"marginals have k={eta_a.k} and k={eta_b.k}")
    k = eta_a.k
    if isinstance(r, Fraction) and r.denominator == 1:
        r = r.numerator
    elif isinstance(r, np.integer):
        r = int(r)
    if isinstance(r, bool) or not isinstance(r, int):
        raise ROutOfRange(f"r must be an integer effect value, got {r!r}")
    if not -(k - 1) <= r <= k - 1:
        raise ROutOfRange(f"r={r} is outside {-(k - 1)}..{k - 1}")
    return r


def greedy_fill_lower(r: int, eta_a: Marginal, eta_b: Marginal) -> GreedyFillState:
    """Greedy maximiser of the mass on cells ``x - y < r``."""
    r = _check(r, eta_a, eta_b)
    k = eta_a.k
    state = GreedyFillState.empty(eta_a, eta_b)
    for y in range(k - 1, -1, -1):
        for x in range(min(y + r - 1, k - 1), -1, -1):
            if state.col_frozen[y]:
                break
            state.fill(x, y)
    return state


def variability_lower(r: int, eta_a: Marginal, eta_b: Marginal) -> Fraction:
    return greedy_fill_lower(r, eta_a, eta_b).mass


def variability_upper(r: int, eta_a: Marginal, eta_b: Marginal) -> Fraction:
    r = _check(r, eta_a, eta_b)
    return 1 - variability_lower(-r, eta_b, eta_a)


def variability(r: int, eta_a: Marginal, eta_b: Marginal) -> VariabilityPair:
    r = _check(r, eta_a, eta_b)
    return VariabilityPair(r, variability_lower(r, eta_a, eta_b), variability_upper(r, eta_a, eta_b))


def positive_part(x: Fraction) -> Fraction:
    return x if x > 0 else ZERO


def width_from_pair(nu_lower: Fraction, nu_upper: Fraction) -> Fraction:
    return max(positive_part(nu_lower - HALF), positive_part(HALF - nu_upper))


def width_of_r(r: int, eta_a: Marginal, eta_b: Marginal) -> Fraction:
    pair = variability(r, eta_a, eta_b)
    return width_from_pair(pair.nu_lower, pair.nu_upper)


def _tie_key(r: int) -> tuple[int, int]:
    # smallest |r| first, then the nonnegative one of a +-r pair
    return abs(r), 0 if r >= 0 else 1


def min_median_width(eta_a: Marginal, eta_b: Marginal) -> WidthReport:
    """Widths for all ``2k-1`` estimates, the minimum and its minimiser.

    Ties are broken towards the estimate closest to zero, preferring the
    nonnegative one.
    """
    if eta_a.k != eta_b.k:
        raise DimensionMismatch(f"marginals have k={eta_a.k} and k={eta_b.k}")
    k = eta_a.k
    entries = []
    for r in range(-(k - 1), k):
        pair = variability(r, eta_a, eta_b)
        entries.append(
            WidthEntry(r, pair.nu_lower, pair.nu_upper, width_from_pair(pair.nu_lower, pair.nu_upper))
        )
    min_width = min(e.width for e in entries)
    argmin_r = min((e.r for e in entries if e.width == min_width), key=_tie_key)
    return WidthReport(k, tuple(entries), argmin_r, min_width)


def _northwest_corner(state: GreedyFillState) -> None:
    x = y = 0
    k = state.k
    while x < k and y < k:
        if state.row_residual[x] == 0:
            x += 1
            continue
        if state.col_residual[y] == 0:
            y += 1
            continue
        amount = min(state.row_residual[x], state.col_residual[y])
        state.entries[x][y] += amount
        state.row_residual[x] -= amount
        state.col_residual[y] -= amount


def witness_joint_lower(r: int, eta_a: Marginal, eta_b: Marginal) -> Joint:
    """A coupling of (eta_a, eta_b) whose mass on ``x - y < r`` is maximal.

    The greedy fill is completed by a northwest-corner sweep over the
    leftover budgets. Optimality of the greedy part means the sweep can add
    nothing to the region.
    """
    state = greedy_fill_lower(r, eta_a, eta_b)
    _northwest_corner(state)
    return Joint(state.k, tuple(tuple(row) for row in state.entries))


def witness_joint_upper(r: int, eta_a: Marginal, eta_b: Marginal) -> Joint:
    """A coupling whose mass on ``x - y <= r`` is minimal."""
    r = _check(r, eta_a, eta_b)
    transposed = witness_joint_lower(-r, eta_b, eta_a)
    k = eta_a.k
    return Joint(k, tuple(tuple(transposed.m[y][x] for y in range(k)) for x in range(k)))
