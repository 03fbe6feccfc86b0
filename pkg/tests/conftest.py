"""Shared deterministic generators for the test suite."""

import numpy as np
import pytest

from freecontract.measures import AtomicMeasure, HermitianSpec, make_measure
from freecontract.rng import stream


def random_measure(rng: np.random.Generator, n_min: int = 2, n_max: int = 8,
                   spread: float = 2.0, min_gap: float = 1e-3) -> AtomicMeasure:
    m = int(rng.integers(n_min, n_max + 1))
    pos = np.sort(rng.normal(0.0, spread, m))
    while m > 1 and np.min(np.diff(pos)) < min_gap:
        pos = np.sort(rng.normal(0.0, spread, m))
    wts = rng.dirichlet(np.ones(m))
    return make_measure(list(zip(pos, wts)))


def random_nonneg_spec(rng: np.random.Generator, k_max: int = 10) -> HermitianSpec:
    m = int(rng.integers(2, 6))
    vals = np.sort(rng.uniform(0.0, 3.0, m))
    while np.min(np.diff(vals)) < 1e-3:
        vals = np.sort(rng.uniform(0.0, 3.0, m))
    mult = rng.integers(1, 4, m)
    return HermitianSpec(int(mult.sum()), vals, mult.astype(int))


@pytest.fixture
def bernoulli() -> AtomicMeasure:
    return make_measure([(-1.0, 0.5), (1.0, 0.5)])


@pytest.fixture
def bernoulli_spec() -> HermitianSpec:
    return HermitianSpec(2, np.array([-1.0, 1.0]), np.array([1, 1]))


@pytest.fixture
def shifted_spec() -> HermitianSpec:
    # eigenvalues {0, 2} with equal weight: the symmetric two-point spectrum
    # shifted to be nonnegative
    return HermitianSpec(2, np.array([0.0, 2.0]), np.array([1, 1]))


def seeded(seed: int, index: int = 0) -> np.random.Generator:
    return stream(seed, index)
