import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pfds import datasets, mdscore
from pfds.diagnostics import check_uni
from pfds.errors import ValidationError
from pfds.mdscore import MdsProblem
from pfds.oracle1d import (
    best_coords_for_order,
    count_local_minima_1d,
    global_min_1d,
)

from conftest import random_problem


def brute_force(problem):
    """All n! orders, minimizer by least squares on V x = u, stress by pair loop."""
    n = problem.n
    w, delta = problem.weights, problem.dissim
    v = mdscore.build_v(problem)
    best, strict = math.inf, 0
    for perm in itertools.permutations(range(n)):
        rank = [0] * n
        for pos, i in enumerate(perm):
            rank[i] = pos
        u = np.array([sum(w[i][j] * delta[i][j] * (1 if rank[i] > rank[j] else -1)
                          for j in range(n) if j != i) for i in range(n)])
        x = np.linalg.lstsq(v, u, rcond=None)[0]
        s = sum(w[i][j] * (delta[i][j] - abs(x[i] - x[j])) ** 2
                for i in range(n) for j in range(i + 1, n)) / 2
        best = min(best, s)
        if all(x[perm[k]] < x[perm[k + 1]] for k in range(n - 1)):
            strict += 1
    return best, strict // 2


class TestBestCoords:
    def test_simplex3(self):
        x, s = best_coords_for_order(datasets.simplex(3), [0, 1, 2])
        np.testing.assert_allclose(x, [-2 / 3, 0, 2 / 3], atol=1e-15)
        assert s == pytest.approx(1 / 6, abs=1e-15)

    def test_reversed(self, rng):
        p = random_problem(rng, 6)
        order = rng.permutation(6)
        x, s = best_coords_for_order(p, order)
        xr, sr = best_coords_for_order(p, order[::-1])
        np.testing.assert_allclose(xr, -x, atol=1e-13)
        assert s == sr

    def test_n2(self):
        x, s = best_coords_for_order(datasets.MdsProblem(np.array([[0, 1.0], [1.0, 0]])), [0, 1])
        np.testing.assert_allclose(x, [-0.5, 0.5])
        assert s == 0.0

    def test_not_permutation(self):
        with pytest.raises(ValidationError, match="permutation"):
            best_coords_for_order(datasets.simplex(3), [0, 0, 1])

    def test_stress_consistent(self, rng):
        p = random_problem(rng, 5, weighted=True)
        x, s = best_coords_for_order(p, [4, 2, 0, 1, 3])
        assert s == pytest.approx(mdscore.stress(p, mdscore.distances(x)), abs=1e-14)


class TestGlobal:
    def test_simplex3(self):
        res = global_min_1d(datasets.simplex(3))
        assert res.best_stress == pytest.approx(1 / 6, abs=1e-15)
        assert res.enumerated == 3

    def test_enumerates_half(self, rng):
        assert global_min_1d(random_problem(rng, 6)).enumerated == math.factorial(6) // 2

    def test_guard(self):
        with pytest.raises(ValidationError, match="instance too large for exhaustive oracle"):
            global_min_1d(datasets.simplex(11))

    def test_guard_adjustable(self):
        assert global_min_1d(datasets.simplex(5), max_n=5).enumerated == 60

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(3, 6), st.booleans())
    def test_matches_brute_force(self, seed, n, weighted):
        p = random_problem(np.random.default_rng(seed), n, weighted=weighted)
        best, strict = brute_force(p)
        res = global_min_1d(p, count_local_minima=True)
        assert res.best_stress == pytest.approx(best, abs=1e-12)
        assert res.local_min_count == strict
        assert res.local_min_count_with_reflections == 2 * strict
        assert res.best_stress <= min(
            best_coords_for_order(p, o)[1] for o in itertools.permutations(range(n))
        ) + 1e-15

    def test_workers_deterministic(self, rng):
        p = random_problem(rng, 7)
        a = global_min_1d(p, count_local_minima=True, workers=1)
        b = global_min_1d(p, count_local_minima=True, workers=4)
        assert a.best_stress == b.best_stress and a.best_order == b.best_order
        assert a.local_min_count == b.local_min_count

    def test_env_threads(self, rng, monkeypatch):
        p = random_problem(rng, 6)
        monkeypatch.setenv("PFDS_THREADS", "3")
        assert global_min_1d(p).best_stress == global_min_1d(p, workers=1).best_stress

    def test_best_is_local_min(self, rng):
        p = random_problem(rng, 7)
        res = global_min_1d(p)
        _, dev = check_uni(p, res.best_x)
        assert dev <= 1e-12


class TestCensus:
    def test_n2(self):
        c = count_local_minima_1d(datasets.MdsProblem(np.array([[0, 1.0], [1.0, 0]])))
        assert c.count == 1

    def test_simplex3(self):
        c = count_local_minima_1d(datasets.simplex(3))
        assert c.count == 3 and c.count_with_reflections == 6 and c.tied_orders == 0

    def test_ties_reported(self):
        # d01 = d02 = 1, d12 = 3: orders (0,1,2) and (0,2,1) put two points on top
        # of each other, only (1,0,2) is a strict local minimum
        d = np.array([[0, 1, 1], [1, 0, 3], [1, 3, 0.0]])
        c = count_local_minima_1d(MdsProblem(d))
        assert (c.count, c.tied_orders, c.enumerated) == (1, 2, 3)

    def test_local_minima_pass_check_uni(self, rng):
        p = random_problem(rng, 6)
        for order in itertools.permutations(range(6)):
            if order[0] > order[-1]:
                continue
            x, _ = best_coords_for_order(p, order)
            if np.all(np.diff(x[list(order)]) > 0):
                assert check_uni(p, x)[1] <= 1e-12
