import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from mte.core import Joint, Marginal, make_joint, make_marginal

ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


def random_marginal(rng: random.Random, k: int, max_den: int = 12) -> Marginal:
    """Uniform random composition of a random denominator into k parts."""
    den = rng.randint(1, max_den)
    cuts = sorted(rng.randint(0, den) for _ in range(k - 1))
    parts = [b - a for a, b in zip([0, *cuts], [*cuts, den])]
    return Marginal(k, tuple(Fraction(p, den) for p in parts))


def marginal_corpus(k: int, count: int, seed: int = 0, max_den: int = 12):
    rng = random.Random(f"corpus-{k}-{seed}")
    return [(random_marginal(rng, k, max_den), random_marginal(rng, k, max_den)) for _ in range(count)]


def random_joint(rng: random.Random, k: int, max_den: int = 12) -> Joint:
    den = rng.randint(1, max_den)
    cuts = sorted(rng.randint(0, den) for _ in range(k * k - 1))
    parts = [b - a for a, b in zip([0, *cuts], [*cuts, den])]
    return Joint(k, tuple(tuple(Fraction(parts[x * k + y], den) for y in range(k)) for x in range(k)))


@st.composite
def marginals(draw, k: int, max_den: int = 12):
    den = draw(st.integers(1, max_den))
    cuts = sorted(draw(st.lists(st.integers(0, den), min_size=k - 1, max_size=k - 1)))
    parts = [b - a for a, b in zip([0, *cuts], [*cuts, den])]
    return Marginal(k, tuple(Fraction(p, den) for p in parts))


@st.composite
def marginal_pairs(draw, kmin: int = 2, kmax: int = 6):
    k = draw(st.integers(kmin, kmax))
    return draw(marginals(k)), draw(marginals(k))


@pytest.fixture
def mu_marginals():
    return make_marginal(2, ["1/3", "2/3"]), make_marginal(2, ["2/3", "1/3"])


@pytest.fixture
def mu1():
    return make_joint(2, [["1/3", 0], ["1/3", "1/3"]])


@pytest.fixture
def mu2():
    return make_joint(2, [[0, "1/3"], ["2/3", 0]])
