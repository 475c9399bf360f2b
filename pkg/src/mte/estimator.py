"""Median estimation from Bernoulli-design responses.

Each unit is observed under exactly one arm. The estimator forms the
empirical marginals of the two arms, scores every candidate effect ``r``
by its width under those marginals, and returns the minimiser together
with the minimum width inflated by the slack ``2 k beta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .core import HALF, MAX_N, Marginal, as_rational, check_k
from .errors import BadBeta, BadDimension, EmptyGroup, OutcomeOutOfRange
from .variability import WidthReport, min_median_width

TREATMENT = "a"
CONTROL = "b"
GROUPS = (TREATMENT, CONTROL)


@dataclass(frozen=True)
class ResponseData:
    """Observed responses: unit ``i + 1`` is in ``treated[i]``'s arm with ``outcomes[i]``.

    Holding a single outcome per unit is what keeps the withheld potential
    outcome out of reach of the estimator.
    """

    k: int
    treated: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self):
        check_k(self.k)
        treated = np.asarray(self.treated, dtype=bool)
        outcomes = np.asarray(self.outcomes, dtype=np.int64)
        if treated.ndim != 1 or treated.shape != outcomes.shape:
            raise BadDimension("treated and outcomes must be 1-d and equally long")
        if treated.size > MAX_N:
            raise BadDimension(f"n must be at most {MAX_N}")
        if outcomes.size and (outcomes.min() < 0 or outcomes.max() >= self.k):
            bad = int(np.flatnonzero((outcomes < 0) | (outcomes >= self.k))[0])
            raise OutcomeOutOfRange(
                f"unit {bad + 1}: outcome {outcomes[bad]} is outside 0..{self.k - 1}"
            )
        treated.setflags(write=False)
        outcomes.setflags(write=False)
        object.__setattr__(self, "treated", treated)
        object.__setattr__(self, "outcomes", outcomes)

    @classmethod
    def from_records(cls, k: int, records: Iterable[tuple[int, str, int]]) -> "ResponseData":
        """Build from ``(unit, group, outcome)`` triples, units numbered 1..n."""
        rows = list(records)
        n = len(rows)
        treated = np.zeros(n, dtype=bool)
        outcomes = np.zeros(n, dtype=np.int64)
        seen = np.zeros(n, dtype=bool)
        for unit, group, outcome in rows:
            if not 1 <= unit <= n:
                raise BadDimension(f"unit {unit} is outside 1..{n}")
            if seen[unit - 1]:
                raise BadDimension(f"unit {unit} appears more than once")
            if group not in GROUPS:
                raise BadDimension(f"unit {unit}: group must be 'a' or 'b', got {group!r}")
            seen[unit - 1] = True
            treated[unit - 1] = group == TREATMENT
            outcomes[unit - 1] = outcome
        return cls(k, treated, outcomes)

    @property
    def n(self) -> int:
        return int(self.treated.size)

    @property
    def group_sizes(self) -> tuple[int, int]:
        n_a = int(np.count_nonzero(self.treated))
        return n_a, self.n - n_a

    def records(self) -> Iterable[tuple[int, str, int]]:
        for i, (t, y) in enumerate(zip(self.treated.tolist(), self.outcomes.tolist())):
            yield i + 1, TREATMENT if t else CONTROL, y


@dataclass(frozen=True)
class EstimateResult:
    m_hat: int
    epsilon: Fraction
    beta: Fraction
    delta: float
    width_report: WidthReport
    group_sizes: tuple[int, int]


def _empirical(k: int, outcomes: np.ndarray) -> Marginal:
    counts = np.bincount(outcomes, minlength=k).tolist()
    total = int(outcomes.size)
    return Marginal(k, tuple(Fraction(c, total) for c in counts))


def empirical_marginals(data: ResponseData) -> tuple[Marginal, Marginal]:
    """Arm-wise outcome frequencies, normalised by the realised arm sizes."""
    n_a, n_b = data.group_sizes
    if n_a == 0:
        raise EmptyGroup("no unit was assigned to treatment")
    if n_b == 0:
        raise EmptyGroup("no unit was assigned to control")
    rho_a = _empirical(data.k, data.outcomes[data.treated])
    rho_b = _empirical(data.k, data.outcomes[~data.treated])
    return rho_a, rho_b


def error_bound(k: int, beta, n: int) -> float:
    """``2 k exp(-2 beta^2 n)``, the failure probability of the estimator."""
    beta = float(beta)
    return 2 * k * math.exp(-2 * beta * beta * n)


def median_estimate(data: ResponseData, beta) -> EstimateResult:
    beta = as_rational(beta)
    if beta <= 0:
        raise BadBeta(f"beta must be positive, got {beta}")
    rho_a, rho_b = empirical_marginals(data)
    report = min_median_width(rho_a, rho_b)
    epsilon = min(HALF, report.min_width + 2 * data.k * beta)
    return EstimateResult(
        m_hat=report.argmin_r,
        epsilon=epsilon,
        beta=beta,
        delta=error_bound(data.k, beta, data.n),
        width_report=report,
        group_sizes=data.group_sizes,
    )
