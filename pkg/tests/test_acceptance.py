"""Exit criteria. Each test prints one PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py``.
"""

import random
import time
from fractions import Fraction as F

import pytest

from mte.cli import run
from mte.core import make_joint, q_lower_joint, q_lower_vec, q_upper_joint, q_upper_vec, vector_median
from mte.oracle import oracle_variability
from mte.sim import (
    coverage_experiment,
    extremal_marginals,
    indistinguishability_experiment,
    psi,
    typical_sample,
)
from mte.variability import min_median_width, variability, variability_lower, width_of_r

from conftest import ACCEPTANCE_LINES, marginal_corpus, random_joint

CORPUS_SIZE = 500
CORPUS_KS = range(2, 7)
SIM_BETA = F(1, 20)

MU1 = make_joint(2, [["1/3", 0], ["1/3", "1/3"]])
MU2 = make_joint(2, [[0, "1/3"], ["2/3", 0]])


@pytest.fixture
def verdict(request, pytestconfig):
    """Call with (ok, detail); records the line and fails the test if not ok."""

    def _verdict(ok: bool, detail: str):
        line = f"[{'PASS' if ok else 'FAIL'}] {request.node.name}: {detail}"
        pytestconfig.stash.setdefault(ACCEPTANCE_LINES, []).append(line)
        print(line)
        assert ok, line

    return _verdict


@pytest.fixture(scope="module")
def corpus():
    return {k: marginal_corpus(k, CORPUS_SIZE, seed=2024) for k in CORPUS_KS}


def test_criterion_1_running_example_widths(verdict):
    start = time.perf_counter()
    a, b = extremal_marginals(2)
    assert (a.p, b.p) == ((F(1, 3), F(2, 3)), (F(2, 3), F(1, 3)))
    widths = [width_of_r(r, a, b) for r in (-1, 0, 1)]
    report = min_median_width(a, b)
    elapsed = time.perf_counter() - start
    ok = widths == [F(1, 2), F(1, 6), F(1, 6)] and report.min_width == F(1, 6) and elapsed < 1
    verdict(ok, f"widths={[str(w) for w in widths]} min_width={report.min_width} ({elapsed * 1e3:.1f} ms)")


def test_criterion_2_psi_tightness(verdict):
    start = time.perf_counter()
    bad = [k for k in range(2, 13) if min_median_width(*extremal_marginals(k)).min_width != psi(k)]
    bad += [k for k in range(2, 13) if psi(k) != F(2 * k - 3, 2 * (2 * k - 1))]
    elapsed = time.perf_counter() - start
    verdict(not bad and elapsed < 1, f"k=2..12 exact, mismatches={bad} ({elapsed:.3f} s)")


def test_criterion_3_greedy_equals_oracle(verdict, corpus):
    start = time.perf_counter()
    mismatches = 0
    over_bound = 0
    checked = 0
    for k, pairs in corpus.items():
        for a, b in pairs:
            for r in range(-(k - 1), k):
                greedy = variability(r, a, b)
                exact = oracle_variability(r, a, b)
                checked += 1
                if (greedy.nu_lower, greedy.nu_upper) != (exact.nu_lower, exact.nu_upper):
                    mismatches += 1
            if min_median_width(a, b).min_width > psi(k):
                over_bound += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and over_bound == 0 and elapsed < 60
    verdict(
        ok,
        f"{checked} (instance, r) checks over {CORPUS_SIZE} pairs x k=2..6: "
        f"{mismatches} mismatches, {over_bound} above psi_k ({elapsed:.1f} s)",
    )


def test_criterion_4_complementation(verdict, corpus):
    failures = 0
    for k, pairs in corpus.items():
        for a, b in pairs:
            for r in range(-(k - 1), k):
                if variability(r, a, b).nu_upper != 1 - variability_lower(-r, b, a):
                    failures += 1
    verdict(failures == 0, f"nu_upper(r,a,b) == 1 - nu_lower(-r,b,a) on corpus; failures={failures}")


def test_criterion_5_monotone_and_boundaries(verdict, corpus):
    failures = 0
    for k, pairs in corpus.items():
        for a, b in pairs:
            seq = [variability(r, a, b) for r in range(-(k - 1), k)]
            if seq[0].nu_lower != 0 or seq[-1].nu_upper != 1:
                failures += 1
            for lo, hi in zip(seq, seq[1:]):
                if lo.nu_lower > hi.nu_lower or lo.nu_upper > hi.nu_upper:
                    failures += 1
    verdict(failures == 0, f"nondecreasing in r, nu_lower(-(k-1))=0, nu_upper(k-1)=1; failures={failures}")


def test_criterion_6_typical_samples(verdict):
    rng = random.Random(6)
    joints = [(MU1, 3), (MU2, 3)]
    for _ in range(100):
        j = random_joint(rng, rng.randint(2, 5))
        joints.append((j, j.denominator * rng.randint(1, 4)))
    failures = 0
    for j, n in joints:
        v = typical_sample(j, n).ite()
        for r in range(-j.k, j.k + 1):
            if q_lower_joint(r, j) != q_lower_vec(r, v) or q_upper_joint(r, j) != q_upper_vec(r, v):
                failures += 1
    mte1 = vector_median(typical_sample(MU1, 3).ite())
    mte2 = vector_median(typical_sample(MU2, 3).ite())
    ok = failures == 0 and mte1 == 0 and mte2 == 1
    verdict(ok, f"{len(joints)} joints, quantile mismatches={failures}, MTE(mu1)={mte1}, MTE(mu2)={mte2}")


def test_criterion_7_estimator_coverage(verdict):
    start = time.perf_counter()
    report = coverage_experiment(MU2, 10_000, SIM_BETA, 200, seed=0)
    elapsed = time.perf_counter() - start
    lo, hi = 1 / 6, 1 / 6 + 4 * 0.05 + 0.05
    ok = (
        report.coverage_rate == 1.0
        and lo <= report.mean_epsilon <= hi
        and report.mean_epsilon >= float(report.epsilon_star) - 0.05
        and report.delta_bound < 1e-21
        and elapsed < 30
    )
    verdict(
        ok,
        f"coverage={report.coverage_rate} mean_eps={report.mean_epsilon:.4f} in [{lo:.4f}, {hi:.4f}] "
        f"eps*={report.epsilon_star} delta={report.delta_bound:.2e} ({elapsed:.1f} s)",
    )


def test_criterion_8_indistinguishability(verdict):
    start = time.perf_counter()
    report = indistinguishability_experiment(MU1, MU2, 10_000, SIM_BETA, 500, seed=1)
    elapsed = time.perf_counter() - start
    ok = report.tv_distance < F(1, 10) and elapsed < 60
    verdict(
        ok,
        f"TV((m,eps) laws)={float(report.tv_distance):.4f} TV(m laws)={float(report.tv_distance_m_hat):.4f} "
        f"coverage mu1={report.first.coverage_rate} mu2={report.second.coverage_rate} ({elapsed:.1f} s)",
    )


def test_criterion_9_deterministic_simulate(verdict, tmp_path):
    j1, j2 = tmp_path / "mu1.json", tmp_path / "mu2.json"
    j1.write_text('{"k": 2, "m": [["1/3", "0"], ["1/3", "1/3"]]}')
    j2.write_text('{"k": 2, "m": [["0", "1/3"], ["2/3", "0"]]}')
    commands = {
        "coverage": ["simulate", "coverage", "--joint", str(j2), "--n", "2000", "--beta", "1/20",
                     "--trials", "20", "--seed", "77"],
        "indist": ["simulate", "indist", "--joint1", str(j1), "--joint2", str(j2), "--n", "2000",
                   "--beta", "1/20", "--trials", "20", "--seed", "78"],
    }
    identical = {}
    for name, argv in commands.items():
        blobs = []
        for i in range(2):
            out = tmp_path / f"{name}{i}.json"
            assert run([*argv, "--output", str(out)]) == 0
            blobs.append(out.read_bytes())
        identical[name] = blobs[0] == blobs[1]
    verdict(all(identical.values()), f"byte-identical reruns: {identical}")
