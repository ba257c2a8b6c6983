import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ngauss import sampling
from ngauss.copula_emp import (RankMatrix, checkerboard_sample, copula_diagonal,
                               empirical_copula, rank_matrix)
from ngauss.errors import InputError
from oracles import ks_critical, ks_distance_uniform


def _gauss_ranks(n, rho, seed):
    corr = np.array([[1.0, rho], [rho, 1.0]])
    return rank_matrix(sampling.sample_copula(sampling.GaussianCopula(corr), n, seed))


class TestRankMatrix:
    def test_examples(self):
        r = rank_matrix(np.array([[3.0, 1.0], [1.0, 2.0], [2.0, 3.0]]))
        np.testing.assert_array_equal(r.ranks, [[3, 1], [1, 2], [2, 3]])

    def test_stable_ties(self):
        np.testing.assert_array_equal(rank_matrix(np.array([[5.0], [5.0]])).ranks, [[1], [2]])

    def test_rejects_non_permutation(self):
        with pytest.raises(InputError):
            RankMatrix(np.array([[1], [1]]))

    def test_rejects_non_finite(self):
        with pytest.raises(InputError):
            rank_matrix(np.array([[1.0], [np.nan]]))

    def test_monotone_invariance(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(50, 3))
        y = np.column_stack([np.exp(x[:, 0]), x[:, 1] ** 3, 2 * x[:, 2] - 7])
        assert np.array_equal(rank_matrix(x).ranks, rank_matrix(y).ranks)


class TestEmpiricalCopula:
    def test_top_corner(self):
        assert empirical_copula(_gauss_ranks(100, 0.3, 0), [1.0, 1.0]) == 1.0

    def test_comonotone_diagonal(self):
        x = np.arange(20.0)
        r = rank_matrix(np.column_stack([x, x]))
        for u in np.linspace(0, 1, 41):
            assert empirical_copula(r, [u, u]) == pytest.approx(np.ceil(u * 20 - 1e-9) / 20)

    def test_hand_count(self):
        r = RankMatrix(np.array([[1, 2], [2, 1], [3, 3]]))
        assert empirical_copula(r, [2 / 3, 2 / 3]) == pytest.approx(2 / 3)
        assert empirical_copula(r, [1 / 3, 2 / 3]) == pytest.approx(1 / 3)
        assert empirical_copula(r, [1 / 3, 1 / 3]) == 0.0

    @pytest.mark.parametrize("rho,p", [(0.0, 2), (0.7, 2), (-0.6, 2), (0.5, 3)])
    def test_frechet_bounds(self, rho, p):
        corr = np.full((p, p), rho) + (1 - rho) * np.eye(p)
        u = sampling.sample_copula(sampling.GaussianCopula(corr), 200, 3)
        r = rank_matrix(u)
        grid = np.array(list(itertools.product(np.arange(0, 1.0001, 0.05), repeat=p)))
        c = empirical_copula(r, grid)
        lower = np.maximum(grid.sum(axis=1) - (p - 1), 0) - 1 / r.n
        upper = grid.min(axis=1) + 1 / r.n
        assert np.all(c >= lower - 1e-12) and np.all(c <= upper + 1e-12)

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=2),
           st.integers(0, 1), st.floats(0, 1))
    def test_monotone_in_each_coordinate(self, u, j, bump):
        r = _gauss_ranks(40, 0.4, 5)
        v = list(u)
        v[j] = min(1.0, v[j] + bump)
        assert empirical_copula(r, v) >= empirical_copula(r, u)


class TestDiagonal:
    def test_matches_pointwise(self):
        r = _gauss_ranks(300, 0.5, 2)
        t, c = copula_diagonal(r, 21)
        np.testing.assert_allclose(c, empirical_copula(r, np.column_stack([t, t])))
        assert c[-1] == 1.0 and c[0] == 0.0

    def test_independent_is_t_squared(self):
        t, c = copula_diagonal(_gauss_ranks(100_000, 0.0, 4), 101)
        assert np.max(np.abs(c - t ** 2)) < 0.01

    def test_grid_validation(self):
        with pytest.raises(InputError):
            copula_diagonal(_gauss_ranks(10, 0.0, 0), 1)


class TestCheckerboard:
    def test_comonotone(self):
        x = np.arange(50.0)
        r = rank_matrix(np.column_stack([x, x, x]))
        u = np.random.default_rng(0).uniform(size=(200, 3))
        v = checkerboard_sample(r, u)
        assert np.all(np.abs(v - v[:, :1]) <= 1 / 50 + 1e-12)

    def test_single_cell_is_identity(self):
        r = RankMatrix(np.array([[1, 1]]))
        np.testing.assert_array_equal(checkerboard_sample(r, [0.3, 0.8]), [0.3, 0.8])

    def test_uniform_marginals(self):
        r = _gauss_ranks(500, 0.6, 6)
        u = np.random.default_rng(7).uniform(size=(100_000, 2))
        v = checkerboard_sample(r, u)
        for j in range(2):
            assert ks_distance_uniform(v[:, j]) < ks_critical(100_000, 0.01)

    def test_reproduces_copula(self):
        r = _gauss_ranks(300, 0.6, 8)
        u = np.random.default_rng(9).uniform(size=(100_000, 2))
        rv = rank_matrix(checkerboard_sample(r, u))
        g = np.arange(0, 1.0001, 0.1)
        grid = np.array(list(itertools.product(g, g)))
        gap = np.max(np.abs(empirical_copula(rv, grid) - empirical_copula(r, grid)))
        assert gap < 0.02

    def test_other_pivot(self):
        x = np.arange(30.0)
        r = rank_matrix(np.column_stack([x, -x]))
        v = checkerboard_sample(r, np.array([[0.5, 0.2]]), pivot=1)
        assert v[0, 1] == 0.2
        assert abs(v[0, 0] - 0.8) <= 1 / 30

    @pytest.mark.parametrize("u", [[0.0, 0.5], [0.5, 1.0]])
    def test_open_interval(self, u):
        with pytest.raises(InputError):
            checkerboard_sample(_gauss_ranks(10, 0.0, 0), u)
