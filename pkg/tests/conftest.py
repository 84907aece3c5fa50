import numpy as np
import pytest

from pfds import datasets, mdscore
from pfds.trajectory import LambdaSchedule, run_trajectory


def random_problem(rng, n, low=0.5, high=1.5, weighted=False):
    a = rng.uniform(low, high, size=(n, n))
    delta = np.triu(a, 1) + np.triu(a, 1).T
    w = None
    if weighted:
        b = rng.uniform(0.5, 2.0, size=(n, n))
        w = np.triu(b, 1) + np.triu(b, 1).T
    return mdscore.MdsProblem(delta, w)


def distinct_config(rng, n, k):
    while True:
        z = rng.normal(size=(n, k))
        d = mdscore.distances(z)
        if np.min(d[~np.eye(n, dtype=bool)]) > 1e-3:
            return z


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def simplex10_run():
    problem = mdscore.normalize(datasets.simplex(10))
    return problem, run_trajectory(problem, LambdaSchedule.parse("lin:0:1:101"), p=2)


@pytest.fixture(scope="session")
def parties_run():
    problem = mdscore.normalize(datasets.parties())
    return problem, run_trajectory(problem, LambdaSchedule.parse("lin:0:1:101"), p=2)
