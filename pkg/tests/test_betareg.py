import math

import numpy as np
import pytest
from scipy import integrate

from foca import betareg as br
from foca.errors import DomainError, NotConverged, RankDeficient, SchemaError

TRUE_BETA = np.array([-0.44, 0.03, 0.02, 0.01, 0.02, -0.66, -2.5])


def naive_loglik(beta, phi, y, X):
    """Per-point summation with math.lgamma, independent of the vectorized path."""
    total = 0.0
    for yi, xi in zip(y, X):
        eta = sum(b * x for b, x in zip(beta, xi))
        mu = 1.0 / (1.0 + math.exp(-eta))
        a, b = mu * phi, (1 - mu) * phi
        total += (math.lgamma(phi) - math.lgamma(a) - math.lgamma(b)
                  + (a - 1) * math.log(yi) + (b - 1) * math.log(1 - yi))
    return total


def fd_gradient(beta, log_phi, data, h=1e-6):
    theta = np.append(beta, log_phi)
    g = np.empty_like(theta)
    for j in range(theta.size):
        up, dn = theta.copy(), theta.copy()
        up[j] += h
        dn[j] -= h
        g[j] = (br.log_likelihood(up[:-1], math.exp(up[-1]), data)
                - br.log_likelihood(dn[:-1], math.exp(dn[-1]), data)) / (2 * h)
    return g


@pytest.fixture(scope="module")
def sim2000():
    X = br.realistic_design(2000, seed=7)
    data = br.simulate(TRUE_BETA, 30.0, X, seed=8)
    return data, br.fit(data)


class TestDensity:
    def test_uniform(self):
        assert br.beta_log_density(0.5, 0.5, 2.0) == pytest.approx(0.0, abs=1e-15)

    def test_beta22(self):
        # Beta(2, 2) pdf = 6 y (1 - y), equal to 1.5 at 0.5
        assert br.beta_log_density(0.5, 0.5, 4.0) == pytest.approx(math.log(1.5), abs=1e-12)

    @pytest.mark.parametrize("y,mu,phi", [(0.0, 0.5, 2), (1.0, 0.5, 2), (0.5, 0.0, 2), (0.5, 1.0, 2), (0.5, 0.5, 0)])
    def test_domain(self, y, mu, phi):
        with pytest.raises(DomainError):
            br.beta_log_density(y, mu, phi)

    def test_normalizes(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            mu, phi = rng.uniform(0.05, 0.95), rng.uniform(1.0, 80.0)
            f = lambda y: math.exp(br.beta_log_density(y, mu, phi))
            total = sum(integrate.quad(f, lo, hi, limit=500, epsabs=1e-13, epsrel=1e-12)[0]
                        for lo, hi in ((0, 0.5), (0.5, 1)))
            assert total == pytest.approx(1.0, abs=1e-6)


class TestLogLikelihood:
    def test_uniform_single(self):
        data = br.BetaRegData([0.5], [[1.0]])
        assert br.log_likelihood([0.0], 2.0, data) == pytest.approx(0.0, abs=1e-15)

    def test_matches_naive_sum(self):
        rng = np.random.default_rng(11)
        X = np.column_stack([np.ones(50), rng.normal(size=(50, 2))])
        beta = np.array([0.2, -0.5, 0.3])
        data = br.simulate(beta, 12.0, X, seed=12)
        assert br.log_likelihood(beta, 12.0, data) == pytest.approx(
            naive_loglik(beta, 12.0, data.y, X), abs=1e-10)

    def test_duplicate_doubles_point(self):
        base = br.BetaRegData([0.3, 0.8], [[1.0], [1.0]])
        dup = br.BetaRegData([0.3, 0.8, 0.8], [[1.0], [1.0], [1.0]])
        l_base = br.log_likelihood([0.1], 5.0, base)
        l_point = br.log_likelihood([0.1], 5.0, br.BetaRegData([0.8], [[1.0]]))
        assert br.log_likelihood([0.1], 5.0, dup) == pytest.approx(l_base + l_point, abs=1e-12)


class TestScore:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        X = br.realistic_design(300, seed=6)
        data = br.simulate(TRUE_BETA, 30.0, X, seed=7)
        for _ in range(20):
            beta = TRUE_BETA + rng.normal(scale=[0.3, 0.005, 0.005, 0.005, 0.005, 0.3, 0.5])
            log_phi = math.log(rng.uniform(5, 60))
            g = br.score(beta, math.exp(log_phi), data)
            g_fd = fd_gradient(beta, log_phi, data)
            assert np.linalg.norm(g - g_fd) / np.linalg.norm(g_fd) < 1e-4

    def test_observed_information_matches_fd_of_score(self):
        X = br.realistic_design(200, seed=1)
        data = br.simulate(TRUE_BETA, 20.0, X, seed=2)
        theta = np.append(TRUE_BETA, math.log(20.0))
        H = br.observed_information(theta[:-1], 20.0, data)
        h = 1e-6
        for j in range(theta.size):
            up, dn = theta.copy(), theta.copy()
            up[j] += h
            dn[j] -= h
            col = -(br.score(up[:-1], math.exp(up[-1]), data)
                    - br.score(dn[:-1], math.exp(dn[-1]), data)) / (2 * h)
            np.testing.assert_allclose(H[:, j], col, rtol=1e-4, atol=1e-3 * np.abs(H).max() * 1e-3)


class TestFit:
    def test_recovers_truth(self, sim2000):
        data, fit = sim2000
        assert fit.converged
        assert np.all(np.abs(fit.beta_hat - TRUE_BETA) <= 3 * fit.se)
        assert abs(math.log(fit.phi_hat / 30.0)) <= 3 * fit.se_log_phi

    def test_gradient_zero_at_optimum(self, sim2000):
        data, fit = sim2000
        assert np.linalg.norm(br.score(fit.beta_hat, fit.phi_hat, data)) < 1e-6

    def test_likelihood_ascent(self, sim2000):
        _, fit = sim2000
        trace = np.array(fit.loglik_trace)
        assert np.all(np.diff(trace) >= -br.LL_NOISE * abs(fit.loglik))
        assert trace[-1] > trace[0]

    def test_symmetric_intercept_only(self):
        y = np.tile([0.3, 0.7], 20)
        fit = br.fit(br.BetaRegData(y, np.ones((40, 1))))
        assert fit.converged
        assert fit.beta_hat[0] == pytest.approx(0.0, abs=1e-10)
        assert np.allclose(fit.fitted(br.BetaRegData(y, np.ones((40, 1)))), 0.5)

    def test_permutation_invariance(self):
        X = br.realistic_design(400, seed=21)
        data = br.simulate(TRUE_BETA, 30.0, X, seed=22)
        perm = np.random.default_rng(0).permutation(data.n)
        a = br.fit(data)
        b = br.fit(br.BetaRegData(data.y[perm], data.X[perm]))
        np.testing.assert_allclose(a.beta_hat, b.beta_hat, rtol=0, atol=1e-10)
        assert a.phi_hat == pytest.approx(b.phi_hat, abs=1e-8)

    def test_consistency(self):
        def mean_abs_error(n):
            errs = []
            for s in range(10):
                X = br.realistic_design(n, seed=100 + s)
                f = br.fit(br.simulate(TRUE_BETA, 30.0, X, seed=200 + s))
                errs.append(np.abs(f.beta_hat - TRUE_BETA))
            return np.mean(errs, axis=0)
        assert np.all(mean_abs_error(2000) < mean_abs_error(200))

    def test_rank_deficient(self):
        X = br.realistic_design(100, seed=1)
        X[:, 3] = X[:, 2]
        data = br.simulate(TRUE_BETA, 30.0, br.realistic_design(100, seed=1), seed=2)
        with pytest.raises(RankDeficient):
            br.fit(br.BetaRegData(data.y, X))

    def test_too_few_rows(self):
        with pytest.raises(RankDeficient):
            br.fit(br.BetaRegData([0.2, 0.5], np.ones((2, 1)) @ np.ones((1, 2))))

    def test_not_converged_is_flagged(self):
        X = br.realistic_design(200, seed=3)
        data = br.simulate(TRUE_BETA, 30.0, X, seed=4)
        with pytest.warns(RuntimeWarning):
            fit = br.fit(data, max_iter=1)
        assert not fit.converged
        with pytest.raises(NotConverged):
            br.require_converged(fit)

    def test_rejects_boundary_response(self):
        with pytest.raises(DomainError):
            br.BetaRegData([0.5, 1.0], np.ones((2, 1)))


class TestSimulate:
    def test_mean(self):
        data = br.simulate([math.log(0.7 / 0.3)], 20.0, np.ones((100_000, 1)), seed=1)
        assert abs(data.y.mean() - 0.7) < 0.005

    def test_variance(self):
        data = br.simulate([0.0], 10.0, np.ones((100_000, 1)), seed=2)
        assert data.y.var() == pytest.approx(0.25 / 11, rel=0.10)

    def test_deterministic(self):
        X = br.realistic_design(50, seed=1)
        a = br.simulate(TRUE_BETA, 30.0, X, seed=9)
        b = br.simulate(TRUE_BETA, 30.0, X, seed=9)
        np.testing.assert_array_equal(a.y, b.y)


class TestResiduals:
    def test_interpolated_point(self):
        y = 0.3
        fit = br.BetaRegFit(np.array([math.log(y / (1 - y))]), 5.0, np.array([1.0]), np.array([1.0]),
                            0.0, True, 0, names=("b1",))
        r = br.residuals(fit, br.BetaRegData([y], [[1.0]]))
        assert r.values[0] == pytest.approx(0.0, abs=1e-12)

    def test_mean_near_zero(self, sim2000):
        data, fit = sim2000
        r = br.residuals(fit, data)
        assert len(r.values) == data.n and np.all(np.isfinite(r.values))
        assert abs(r.mean) < 0.05
        assert r.pairs()[0][0] == 1


class TestWald:
    def _fit(self, beta, se):
        return br.BetaRegFit(np.array(beta, float), 1.0, np.array(se, float), np.zeros(len(beta)),
                             0.0, True, 0)

    def test_zero_estimate(self):
        assert br.wald_pvalues(self._fit([0.0], [0.3]))[0] == 1.0

    def test_196(self):
        # erfc(1.96 / sqrt 2) from mpmath: 0.04999579029644087
        assert br.wald_pvalues(self._fit([1.96], [1.0]))[0] == pytest.approx(0.05, abs=0.001)
        assert br.wald_pvalues(self._fit([-1.96], [1.0]))[0] == pytest.approx(0.04999579029644087, abs=1e-12)

    def test_calibration(self):
        rejections = 0
        for s in range(200):
            rng = np.random.default_rng(5000 + s)
            X = np.column_stack([np.ones(150), rng.normal(size=150)])
            data = br.simulate([0.3, 0.0], 15.0, X, seed=9000 + s)
            rejections += br.fit(data).p_values[1] < 0.05
        assert 0.01 <= rejections / 200 <= 0.12


class TestDatasetFile:
    def test_round_trip(self, tmp_path):
        X = br.realistic_design(20, seed=1)
        data = br.simulate(TRUE_BETA, 30.0, X, seed=1)
        path = tmp_path / "d.csv"
        br.write_dataset(data, path)
        back = br.load_dataset(path)
        np.testing.assert_array_equal(back.y, data.y)
        np.testing.assert_array_equal(back.X, data.X)

    def test_boundary_row_cited(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,cov_s,cov_c,cov_r,cov_cp,lexp,nl\n0.5,1,2,3,4,0,0\n1.0,1,2,3,4,1,0\n")
        with pytest.raises(DomainError, match="line 3"):
            br.load_dataset(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("y,a,b\n0.5,1,2\n")
        with pytest.raises(SchemaError):
            br.load_dataset(path)


def test_agrees_with_statsmodels():
    sm = pytest.importorskip("statsmodels.othermod.betareg")
    X = br.realistic_design(800, seed=4)
    data = br.simulate(TRUE_BETA, 30.0, X, seed=5)
    ours = br.fit(data)
    with np.errstate(all="ignore"):
        ref = sm.BetaModel(data.y, data.X).fit(disp=0, maxiter=500, method="bfgs")
    np.testing.assert_allclose(ours.beta_hat, ref.params[:-1], atol=1e-5)
    assert math.log(ours.phi_hat) == pytest.approx(ref.params[-1], abs=1e-5)
    np.testing.assert_allclose(ours.se, ref.bse[:-1], rtol=1e-4)
    assert ours.loglik >= ref.llf - 1e-8
