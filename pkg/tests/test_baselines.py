import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from ngauss import baselines, sampling
from ngauss.errors import DomainError, FitError, InputError
from ngauss.evaluate import max_abs_cross_correlation, royston_mvn_test, shapiro_wilk
from ngauss.marginal import fit_marginal, gaussianize


class TestTransforms:
    @pytest.mark.parametrize("u", [0.3, 1.0, 7.5])
    def test_box_cox_identity(self, u):
        assert baselines.box_cox(u, 1.0) == pytest.approx(u - 1)

    def test_box_cox_examples(self):
        assert baselines.box_cox(math.e, 0.0) == pytest.approx(1.0)
        assert baselines.box_cox(4.0, 0.5) == pytest.approx(2.0)

    def test_box_cox_continuous_at_zero(self):
        assert baselines.box_cox(3.0, 1e-12) == pytest.approx(math.log(3.0), rel=1e-9)

    @given(st.floats(-2, 2))
    def test_box_cox_increasing(self, lam):
        grid = np.linspace(0.01, 20, 400)
        assert np.all(np.diff(baselines.box_cox(grid, lam)) > 0)

    def test_box_cox_domain(self):
        with pytest.raises(DomainError):
            baselines.box_cox(0.0, 1.0)

    def test_manly(self):
        assert baselines.manly(2.5, 0.0) == 2.5
        assert baselines.manly(0.0, 0.7) == 0.0
        assert baselines.manly(1.0, 1.0) == pytest.approx(math.e - 1)

    def test_generalized(self):
        assert baselines.generalized_box_cox(2.0, 0.0, 1.0, 0.3) == pytest.approx(
            baselines.box_cox(2.0, 0.3))
        assert baselines.generalized_box_cox(3.0, 1.0, 2.0, 0.0) == 0.0
        assert baselines.generalized_box_cox(5.0, 1.0, 2.0, 2.0) == pytest.approx(1.5)
        with pytest.raises(DomainError):
            baselines.generalized_box_cox(1.0, 1.0, 2.0, 1.0)
        with pytest.raises(DomainError):
            baselines.generalized_box_cox(3.0, 1.0, 0.0, 1.0)

    def test_arcsinh(self):
        assert baselines.arcsinh_box_cox(2.0, 0.4, 0.0) == pytest.approx(
            baselines.box_cox(2.0, 0.4))
        for t in (-1.5, 0.0, 2.0):
            assert baselines.arcsinh_box_cox(1.0, 0.7, t) == 0.0
        assert baselines.arcsinh_box_cox(2.0, 1.0, 1.0) == pytest.approx(math.sinh(1.0))
        assert baselines.arcsinh_box_cox(2.0, 1.0, -1.0) == pytest.approx(math.asinh(-1.0))


class TestBcg:
    def test_lognormal_lambda(self):
        x = np.exp(sampling.sample_std_normal(5000, 1, 1))
        params = baselines.fit_bcg(x)
        assert -0.15 <= params.lam[0] <= 0.15

    def test_normal_lambda(self):
        x = sampling.sample_std_normal(5000, 1, 2) + 10.0
        params = baselines.fit_bcg(x)
        assert 0.7 <= params.lam[0] <= 1.3

    @pytest.mark.parametrize("seed", [3, 4])
    def test_matches_scipy_mle(self, seed):
        x = np.exp(0.5 * sampling.sample_std_normal(800, 1, seed)[:, 0]) + 0.2
        oracle = stats.boxcox_normmax(x, method="mle", brack=(-2.0, 2.0))
        assert baselines.fit_bcg(x[:, None]).lam[0] == pytest.approx(oracle, abs=1e-3)

    def test_argmax_over_grid(self):
        x = sampling.make_case_dataset(sampling.CaseSpec(2, 500, 2, 5))
        params = baselines.fit_bcg(x)
        best = baselines.boxcox_profile_loglik(x + params.shift, params.lam)
        grid = np.round(np.arange(-2, 2.0001, 0.1), 10)
        for a in grid:
            for b in grid:
                assert best >= baselines.boxcox_profile_loglik(x + params.shift, [a, b]) - 1e-6

    @given(st.integers(0, 10_000))
    def test_lambda_in_range(self, seed):
        x = sampling.make_case_dataset(sampling.CaseSpec(4, 60, 2, seed)) ** 3
        params = baselines.fit_bcg(x, lambda_range=(-0.5, 0.5), max_iters=5)
        assert np.all((params.lam >= -0.5) & (params.lam <= 0.5))

    def test_positivity_shift(self):
        x = sampling.sample_std_normal(300, 2, 6)
        params = baselines.fit_bcg(x)
        assert np.all(x + params.shift > 0)

    def test_whitening(self):
        n = 4000
        L = sampling.cholesky(sampling.ar_correlation(3))
        x = sampling.sample_std_normal(n, 3, 7) @ L.T + 20.0
        g = x - 1.0
        params = baselines.BoxCoxParams(np.ones(3), np.zeros(3), g.mean(axis=0),
                                        np.cov(g, rowvar=False, ddof=0))
        y = baselines.bcg_transform(params, x)
        assert np.max(np.abs(np.cov(y, rowvar=False, ddof=0) - np.eye(3))) < 5 / math.sqrt(n)
        np.testing.assert_allclose(baselines.whiten(baselines.whiten(y)),
                                   baselines.whiten(y), atol=1e-8)

    def test_lognormal_log_transform_passes_sw(self):
        passes = 0
        for seed in range(40):
            x = np.exp(sampling.sample_std_normal(200, 1, seed))
            g = np.log(x)
            params = baselines.BoxCoxParams(np.zeros(1), np.zeros(1), g.mean(axis=0),
                                            np.atleast_2d(g.var()))
            y = baselines.bcg_transform(params, x)[:, 0]
            passes += shapiro_wilk(y)[1] > 0.01
        assert passes >= 0.95 * 40

    def test_degenerate(self):
        x = np.column_stack([np.arange(1.0, 11.0), 2 * np.arange(1.0, 11.0)])
        with pytest.raises(FitError):
            baselines.fit_bcg(x)

    def test_transform_domain(self):
        params = baselines.fit_bcg(np.exp(sampling.sample_std_normal(50, 1, 0)))
        with pytest.raises(DomainError):
            baselines.bcg_transform(params, np.array([[-1.0]]))


class TestRadial:
    def test_near_identity_on_normal(self):
        x = sampling.sample_std_normal(5000, 2, 1)
        w = baselines.whiten(x)
        y = baselines.radial_gaussianize(x)
        r = np.linalg.norm(w, axis=1)
        assert np.mean(np.abs(np.linalg.norm(y, axis=1) / r - 1)) < 0.05

    @given(st.integers(0, 10_000))
    def test_directions_and_monotone_radii(self, seed):
        x = sampling.make_case_dataset(sampling.CaseSpec(3, 80, 3, seed))
        w = baselines.whiten(x)
        y = baselines.radial_gaussianize(x)
        r = np.linalg.norm(w, axis=1)
        scale = np.linalg.norm(y, axis=1) / r
        assert np.all(scale >= 0)
        np.testing.assert_allclose(y, w * scale[:, None], rtol=1e-12, atol=1e-14)
        t = np.linalg.norm(y, axis=1)
        order = np.argsort(r, kind="stable")
        assert np.all(np.diff(t[order]) >= 0)

    def test_singular(self):
        x = np.column_stack([np.arange(10.0), np.arange(10.0)])
        with pytest.raises(FitError):
            baselines.radial_gaussianize(x)

    def test_too_few_rows(self):
        with pytest.raises(InputError):
            baselines.radial_gaussianize(np.zeros((2, 2)))

    @pytest.mark.slow
    def test_case3_beats_bcg(self):
        wins = 0
        for seed in range(50):
            x = sampling.make_case_dataset(sampling.CaseSpec(3, 1000, 2, seed))
            p_rg = royston_mvn_test(baselines.radial_gaussianize(x))[1]
            params = baselines.fit_bcg(x)
            p_bcg = royston_mvn_test(baselines.bcg_transform(params, x))[1]
            wins += p_rg > p_bcg
        assert wins > 25


class TestRbig:
    def test_null_decorrelated(self):
        x = sampling.sample_std_normal(1000, 3, 1)
        y, _ = baselines.rbig(x, 5)
        assert max_abs_cross_correlation(y) < 3 / math.sqrt(1000)

    def test_rotations_orthogonal_and_marginal_grids(self):
        x = sampling.make_case_dataset(sampling.CaseSpec(4, 300, 3, 2))
        y, model = baselines.rbig(x, 8)
        assert model.iter_count == 8
        grid = np.sort(gaussianize(fit_marginal(np.arange(300.0)), np.arange(300.0)))
        cur = x
        for marginals, rot in model.iterations:
            assert np.max(np.abs(rot.T @ rot - np.eye(3))) < 1e-10
            g = np.column_stack([gaussianize(m, cur[:, i]) for i, m in enumerate(marginals)])
            for i in range(3):
                np.testing.assert_array_equal(np.sort(g[:, i]), grid)
            cur = g @ rot
        np.testing.assert_array_equal(cur, y)

    def test_inverse_approximate(self):
        x = sampling.make_case_dataset(sampling.CaseSpec(3, 400, 2, 3))
        y, model = baselines.rbig(x, 3)
        back = baselines.rbig_inverse(model, y)
        assert np.median(np.abs(back - x)) < 0.05

    def test_degenerate_reports_iteration(self):
        x = np.column_stack([np.arange(20.0), np.arange(20.0)])
        with pytest.raises(FitError, match="iteration 0"):
            baselines.rbig(x, 3)

    @pytest.mark.slow
    def test_case1_passes_royston(self):
        passes = 0
        for seed in range(50):
            x = sampling.make_case_dataset(sampling.CaseSpec(1, 1000, 2, seed))
            passes += royston_mvn_test(baselines.rbig(x, 30)[0])[1] > 0.01
        assert passes >= 45
