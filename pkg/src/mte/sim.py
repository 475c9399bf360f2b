"""Sampling, hard instances and Monte Carlo harnesses.

Randomness comes from numpy's Philox counter-based generator seeded through
``SeedSequence``; trial ``t`` of an experiment with seed ``s`` uses the
spawned stream ``SeedSequence(s, spawn_key=(t,))``. Draws from rational
distributions are made by integer thresholding: a uniform integer in
``[0, D)`` is compared against the cumulative ``D``-scaled masses, so no
floating point enters the sampling.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .core import (
    HALF,
    MAX_N,
    Joint,
    Marginal,
    OutcomeVectorPair,
    as_rational,
    check_k,
    in_quantile_band,
    marginals_of,
)
from .errors import BadBeta, BadDimension, MarginalsDiffer, MTEError, NotIntegral
from .estimator import ResponseData, error_bound, median_estimate
from .variability import min_median_width

_MAX_SCALE = 2**62


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise MTEError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def _check_n(n: int, minimum: int = 1) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise BadDimension(f"n must be an integer, got {n!r}")
    if not minimum <= n <= MAX_N:
        raise BadDimension(f"n must lie in {minimum}..{MAX_N}, got {n}")
    return int(n)


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Philox generator for ``seed``, optionally on a spawned sub-stream."""
    seq = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(stream))
    return np.random.Generator(np.random.Philox(seq))


def _scaled_cumsum(probs, scale: int) -> np.ndarray:
    if scale > _MAX_SCALE:
        raise MTEError(f"common denominator {scale} is too large to sample exactly")
    return np.cumsum([int(p * scale) for p in probs], dtype=np.int64)


def _draw(rng: np.random.Generator, cumulative: np.ndarray, size: int) -> np.ndarray:
    u = rng.integers(0, int(cumulative[-1]), size=size, dtype=np.int64)
    return np.searchsorted(cumulative, u, side="right")


def sample_joint(j: Joint, n: int, seed: int) -> OutcomeVectorPair:
    """``n`` independent (treatment, control) pairs drawn from ``j``."""
    n = _check_n(n)
    rng = make_rng(seed)
    flat = [v for row in j.m for v in row]
    cells = _draw(rng, _scaled_cumsum(flat, j.denominator), n)
    return OutcomeVectorPair(j.k, cells // j.k, cells % j.k)


def typical_sample(j: Joint, n: int) -> OutcomeVectorPair:
    """Deterministic table whose cell frequencies are exactly ``j``.

    Cells are laid out in row-major blocks.
    """
    n = _check_n(n)
    a, b = [], []
    for x, y, p in j.cells():
        count = n * p
        if count.denominator != 1:
            raise NotIntegral(f"n * m[{x}][{y}] = {count} is not an integer")
        a.extend([x] * count.numerator)
        b.extend([y] * count.numerator)
    return OutcomeVectorPair(j.k, np.array(a), np.array(b))


def bernoulli_observe(pair: OutcomeVectorPair, seed: int) -> ResponseData:
    """Assign every unit to treatment or control with probability 1/2."""
    _check_n(pair.n, minimum=2)
    rng = make_rng(seed)
    treated = rng.integers(0, 2, size=pair.n).astype(bool)
    return ResponseData(pair.k, treated, np.where(treated, pair.a, pair.b))


def draw_trial(j: Joint, n: int, rng: np.random.Generator) -> tuple[OutcomeVectorPair, ResponseData]:
    """One Bernoulli-design experiment on ``n`` units drawn from ``j``.

    The assignment and the revealed outcome are drawn first, from the
    marginals alone; the withheld outcome is then drawn from the
    conditional law given the revealed one. The result has the law of
    :func:`sample_joint` followed by :func:`bernoulli_observe`, and for a
    fixed stream the observed data depend on ``j`` only through its
    marginals.
    """
    n = _check_n(n, minimum=2)
    k = j.k
    eta_a, eta_b = marginals_of(j)
    treated = rng.integers(0, 2, size=n).astype(bool)

    scale = math.lcm(eta_a.denominator, eta_b.denominator)
    cum_a = _scaled_cumsum(eta_a.p, scale)
    cum_b = _scaled_cumsum(eta_b.p, scale)
    u = rng.integers(0, scale, size=n, dtype=np.int64)
    revealed = np.where(
        treated,
        np.searchsorted(cum_a, u, side="right"),
        np.searchsorted(cum_b, u, side="right"),
    )

    big = j.denominator
    if big > _MAX_SCALE:
        raise MTEError(f"common denominator {big} is too large to sample exactly")
    cells = np.array([[int(v * big) for v in row] for row in j.m], dtype=np.int64)
    row_cum = np.cumsum(cells, axis=1)
    col_cum = np.cumsum(cells, axis=0).T
    high = np.where(treated, row_cum[revealed, -1], col_cum[revealed, -1])
    u2 = rng.integers(0, high, dtype=np.int64)
    withheld = np.empty(n, dtype=np.int64)
    for value in range(k):
        here = revealed == value
        rows = here & treated
        cols = here & ~treated
        withheld[rows] = np.searchsorted(row_cum[value], u2[rows], side="right")
        withheld[cols] = np.searchsorted(col_cum[value], u2[cols], side="right")

    a = np.where(treated, revealed, withheld)
    b = np.where(treated, withheld, revealed)
    return OutcomeVectorPair(k, a, b), ResponseData(k, treated, revealed)


def extremal_marginals(k: int) -> tuple[Marginal, Marginal]:
    """Marginals whose minimum median width meets the universal upper bound."""
    k = check_k(k)
    d = 2 * k - 1
    eta_a = tuple(Fraction(1 + (r > 0), d) for r in range(k))
    eta_b = tuple(Fraction(1 + (r < k - 1), d) for r in range(k))
    return Marginal(k, eta_a), Marginal(k, eta_b)


def psi(k: int) -> Fraction:
    """Largest possible minimum median width for k-ary outcomes."""
    k = check_k(k)
    return Fraction(2 * k - 3, 2 * (2 * k - 1))


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    seed: int
    m_hat: int
    epsilon: Fraction
    covered: bool
    n_a: int
    n_b: int


@dataclass(frozen=True)
class ExperimentReport:
    trials: int
    coverage_rate: float
    mean_epsilon: float
    delta_bound: float
    epsilon_star: Fraction
    width_lower_bound: float
    width_lower_bound_plus_tail: float
    records: tuple[TrialRecord, ...]
    config: dict[str, Any] = field(default_factory=dict)


def _check_beta(beta) -> Fraction:
    beta = as_rational(beta)
    if beta <= 0:
        raise BadBeta(f"beta must be positive, got {beta}")
    return beta


def coverage_experiment(j: Joint, n: int, beta, trials: int, seed: int) -> ExperimentReport:
    """Repeat the estimator on fresh designs and score it against the full table."""
    n = _check_n(n, minimum=2)
    beta = _check_beta(beta)
    seed = _check_seed(seed)
    if isinstance(trials, bool) or not isinstance(trials, (int, np.integer)) or trials < 1:
        raise MTEError(f"trials must be a positive integer, got {trials!r}")

    records = []
    for t in range(int(trials)):
        pair, data = draw_trial(j, n, make_rng(seed, t))
        est = median_estimate(data, beta)
        covered = in_quantile_band(est.m_hat, pair.ite(), HALF - est.epsilon, HALF + est.epsilon)
        n_a, n_b = est.group_sizes
        records.append(TrialRecord(t, seed, est.m_hat, est.epsilon, covered, n_a, n_b))

    k = j.k
    delta = error_bound(k, beta, n)
    epsilon_star = min_median_width(*marginals_of(j)).min_width
    tail = 2 * k * math.exp(-2 * float(beta) ** 2 * n)
    core_term = (float(epsilon_star) - float(beta)) * (1 - 2 * k * delta)
    return ExperimentReport(
        trials=len(records),
        coverage_rate=sum(r.covered for r in records) / len(records),
        mean_epsilon=math.fsum(float(r.epsilon) for r in records) / len(records),
        delta_bound=delta,
        epsilon_star=epsilon_star,
        width_lower_bound=core_term - tail,
        width_lower_bound_plus_tail=core_term + tail,
        records=tuple(records),
        config={"joint": j, "n": n, "beta": beta, "trials": int(trials), "seed": seed},
    )


def output_law(report: ExperimentReport) -> Counter:
    """Empirical distribution (as counts) of the (m_hat, epsilon) outputs."""
    return Counter((r.m_hat, r.epsilon) for r in report.records)


def tv_distance(first: Counter, second: Counter) -> Fraction:
    n1, n2 = sum(first.values()), sum(second.values())
    support = set(first) | set(second)
    return sum(
        (abs(Fraction(first[s], n1) - Fraction(second[s], n2)) for s in support), Fraction(0)
    ) / 2


@dataclass(frozen=True)
class IndistinguishabilityReport:
    first: ExperimentReport
    second: ExperimentReport
    tv_distance: Fraction
    tv_distance_m_hat: Fraction
    mean_epsilon_gap: float


def indistinguishability_experiment(
    j1: Joint, j2: Joint, n: int, beta, trials: int, seed: int
) -> IndistinguishabilityReport:
    """Run both joints on paired seeds and compare the estimator's output laws."""
    if j1.k != j2.k or marginals_of(j1) != marginals_of(j2):
        raise MarginalsDiffer("the two joints must share both marginals")
    first = coverage_experiment(j1, n, beta, trials, seed)
    second = coverage_experiment(j2, n, beta, trials, seed)
    law1, law2 = output_law(first), output_law(second)
    m1 = Counter(r.m_hat for r in first.records)
    m2 = Counter(r.m_hat for r in second.records)
    return IndistinguishabilityReport(
        first=first,
        second=second,
        tv_distance=tv_distance(law1, law2),
        tv_distance_m_hat=tv_distance(m1, m2),
        mean_epsilon_gap=abs(first.mean_epsilon - second.mean_epsilon),
    )
