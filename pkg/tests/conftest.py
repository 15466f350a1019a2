import numpy as np
import pytest

from seektime import StochasticMatrix, validate_stochastic


def make_chain(entries, labels=None) -> StochasticMatrix:
    return validate_stochastic(np.asarray(entries, dtype=float), labels)


def cycle_chain(n: int) -> StochasticMatrix:
    entries = np.zeros((n, n))
    for i in range(n):
        entries[i, (i + 1) % n] = 1.0
    return make_chain(entries)


def uniform_chain(n: int) -> StochasticMatrix:
    return make_chain(np.full((n, n), 1.0 / n))


def random_chain(rng: np.random.Generator, n: int) -> StochasticMatrix:
    return make_chain(rng.dirichlet(np.ones(n), size=n))


@pytest.fixture
def two_state() -> StochasticMatrix:
    # leave probability 0.2 from a, 0.4 from b: w = (2/3, 1/3), K = 5/3
    return make_chain([[0.8, 0.2], [0.4, 0.6]], labels=("a", "b"))


@pytest.fixture
def uniform2() -> StochasticMatrix:
    return uniform_chain(2)


@pytest.fixture
def cycle3() -> StochasticMatrix:
    return cycle_chain(3)


@pytest.fixture
def single_state() -> StochasticMatrix:
    return make_chain([[1.0]])
