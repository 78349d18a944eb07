import math

import numpy as np
import pytest
from scipy import integrate

from torpam import moment_calculus as mc
from torpam.covariance import NoiseSpec
from torpam.errors import DalangViolation, DomainError, NumericsError
from torpam.heat_kernel import TWO_PI


class TestK1:
    def test_long_time_limit(self, spec_d1):
        assert mc.k1(1e3, spec_d1) == pytest.approx(
            spec_d1.rho / math.sqrt(TWO_PI), abs=1e-14)

    def test_nonincreasing_positive(self, spec_d1):
        s = np.geomspace(1e-4, 10, 200)
        vals = mc.k1(s, spec_d1)
        assert np.all(vals > 0)
        assert np.all(np.diff(vals) <= 1e-12)

    def test_power_upper_bound(self, spec_d1):
        # k1 <= rho (2pi)^{-1/2} + C_{a,b,d} s^{-b} at the default beta
        a, d = spec_d1.alpha, spec_d1.d
        beta = max(-a + d / 2, 0.0) + min(a + 1 - d / 2, 1.0) / 2
        from torpam.lattice import zeta_lattice

        c_ab = (beta**beta * math.exp(-beta) / math.sqrt(TWO_PI)
                * zeta_lattice(d, 2 * (a + beta)))
        s = np.geomspace(1e-3, 50, 100)
        bound = spec_d1.rho / math.sqrt(TWO_PI) + c_ab * s ** (-beta)
        assert np.all(mc.k1(s, spec_d1) <= bound * (1 + 1e-12))

    def test_integral_budget(self, spec_d1):
        from torpam.covariance import c_alpha_d

        t = 3.0
        assert mc.k1_integral(t, spec_d1) <= (
            spec_d1.rho * t / math.sqrt(TWO_PI) + c_alpha_d(spec_d1) + 1e-12)

    def test_small_s_path_consistency(self, spec_d1):
        # the heat-integral route must join the direct sum smoothly
        direct = mc.k1(1e-4, spec_d1, kmax=4096)
        rerouted = spec_d1.rho / math.sqrt(TWO_PI) + (
            mc._weighted_heat_sum_small_s(1e-4, spec_d1) / math.sqrt(TWO_PI))
        assert direct == pytest.approx(rerouted, rel=1e-9)

    def test_laplace_against_quadrature(self, spec_d1):
        gamma = 1.0

        def short(w):
            s = w * w
            return math.exp(-gamma * s) * mc.k1(s, spec_d1) * 2 * w

        a, _ = integrate.quad(short, 0, 1, epsabs=1e-12, epsrel=1e-12, limit=400)
        b, _ = integrate.quad(lambda s: math.exp(-gamma * s) * mc.k1(s, spec_d1),
                              1, np.inf, epsabs=1e-12, epsrel=1e-12)
        assert a + b == pytest.approx(mc.k1_laplace(gamma, spec_d1), abs=1e-8)

    def test_rejects_nonpositive(self, spec_d1):
        with pytest.raises(DomainError):
            mc.k1(0.0, spec_d1)


class TestK2:
    def test_scaling_exponent(self):
        spec = NoiseSpec(d=2, alpha=1.0, rho=0.0)
        assert mc.k2(2.0, spec) / mc.k2(1.0, spec) == pytest.approx(1.0)
        spec13 = NoiseSpec(d=1, alpha=0.3, rho=0.0)
        assert mc.k2(2.0, spec13) / mc.k2(1.0, spec13) == pytest.approx(2 ** (-0.2))

    @pytest.mark.parametrize("d,alpha", [(1, 0.3), (1, 0.45), (2, 0.5), (2, 0.9)])
    def test_constant_from_quadrature(self, d, alpha):
        assert mc.riesz_gaussian_constant(d, alpha) == pytest.approx(
            mc.riesz_gaussian_constant_closed(d, alpha), abs=1e-8)

    def test_laplace_constant(self):
        # int e^{-g s} C s^{a-d/2} ds = C Gamma(a+1-d/2) g^{-(a+1-d/2)}
        d, alpha, gamma = 1, 0.3, 1.7
        spec = NoiseSpec(d=d, alpha=alpha, rho=0.0)
        val, _ = integrate.quad(lambda s: math.exp(-gamma * s) * float(mc.k2(s, spec)),
                                0, np.inf, epsabs=1e-12, limit=300)
        pred = mc.k2_laplace_constant(d, alpha) * gamma ** (-(alpha + 1 - d / 2))
        assert val == pytest.approx(pred, rel=1e-9)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            mc.k2(-1.0, NoiseSpec(d=1, alpha=0.3))


class TestHnTable:
    def test_h0_and_start(self, spec_d1):
        tab = mc.hn_table(spec_d1, 3, np.linspace(0, 1, 101))
        assert np.all(tab.values[0] == 1.0)
        assert np.all(tab.values[1:, 0] == 0.0)

    def test_h1_closed_form(self, spec_d1):
        grid = np.linspace(0, 2, 201)
        tab = mc.hn_table(spec_d1, 1, grid)
        a, d = spec_d1.alpha, spec_d1.d
        c = mc.riesz_gaussian_constant(d, a)
        p = a - d / 2 + 1
        for i in (50, 100, 200):
            t = grid[i]
            exact = mc.k1_integral(t, spec_d1) + c * t**p / p + t
            assert tab.values[1][i] == pytest.approx(exact, rel=1e-7)

    def test_h2_against_brute_quadrature(self, spec_d1):
        grid = np.linspace(0, 1.0, 101)
        tab = mc.hn_table(spec_d1, 2, grid)
        a, d = spec_d1.alpha, spec_d1.d
        c = mc.riesz_gaussian_constant(d, a)
        p = a - d / 2 + 1

        def h1(t):
            if t <= 0:
                return 0.0
            return mc.k1_integral(t, spec_d1) + c * t**p / p + t

        def kfun(s):
            return float(mc.k1(s, spec_d1)) + float(mc.k2(s, spec_d1)) + 1.0

        t_test = 1.0
        head, _ = integrate.quad(lambda w: h1(t_test - w * w) * kfun(w * w) * 2 * w,
                                 1e-8, 1.0, epsabs=1e-9, limit=400)
        assert tab.values[2][-1] == pytest.approx(head, rel=1e-4)

    def test_rows_nondecreasing(self, spec_d1):
        tab = mc.hn_table(spec_d1, 5, np.linspace(0, 5, 251))
        for row in tab.values:
            assert np.all(np.diff(row) >= -1e-12)

    def test_refinement_convergence(self, spec_d1):
        coarse = mc.hn_table(spec_d1, 4, np.linspace(0, 10, 501))
        fine = mc.hn_table(spec_d1, 4, np.linspace(0, 10, 1001))
        sel = coarse.t_grid >= 0.5
        for n in range(1, 5):
            a = coarse.values[n][sel]
            b = fine.values[n][::2][sel]
            assert np.max(np.abs(a - b) / np.abs(b)) < 0.01

    def test_dalang_refusal(self):
        bad = NoiseSpec(d=3, alpha=0.5, rho=1.0)
        with pytest.raises(DalangViolation):
            mc.hn_table(bad, 2, np.linspace(0, 1, 11))

    def test_export(self, tmp_path, spec_d1):
        tab = mc.hn_table(spec_d1, 2, np.linspace(0, 1, 11))
        path = tmp_path / "hn.csv"
        tab.write_csv(path)
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        assert data.shape == (11, 4)
        assert tab.to_json().startswith("{")


class TestHLambda:
    def test_zero_coupling(self, spec_d1):
        assert mc.H_lambda(spec_d1, 1.0, lam=0.0) == 1.0
        assert mc.H_lambda(spec_d1, 0.0, lam=2.0) == 1.0

    def test_small_coupling_limit(self, spec_d1):
        assert mc.H_lambda(spec_d1, 1.0, lam=1e-8) == pytest.approx(1.0, abs=1e-10)

    def test_monotone_in_t_and_lambda(self, spec_d1):
        hs = mc.H_lambda(spec_d1, np.array([0.5, 1.0, 2.0, 5.0]), lam=1.0)
        assert np.all(np.diff(hs) > 0)
        assert mc.H_lambda(spec_d1, 1.0, lam=2.0) > mc.H_lambda(spec_d1, 1.0, lam=1.0)

    def test_matches_renewal_march(self, spec_d1):
        # independent route: solve H = 1 + lam^2 (k * H) by time marching
        lam2 = 1.0
        dt = 0.005
        n = 200
        grid = np.linspace(0, dt * n, n + 1)
        p_w, a_w = mc._pi_weights(spec_d1, grid.size, dt)
        h = np.ones(grid.size)
        for i in range(1, grid.size):
            conv = float(np.dot(p_w[1:i + 1][::-1], h[:i])) + p_w[0] * 0.0
            # solve the implicit node value: h_i = 1 + lam2*(P0*h_i + rest)
            rest = conv - a_w[i + 1] * h[0] if i + 1 < a_w.size else conv
            h[i] = (1.0 + lam2 * rest) / (1.0 - lam2 * p_w[0])
        series = mc.H_lambda(spec_d1, dt * n, lam=1.0, dt=dt)
        assert series == pytest.approx(h[-1], rel=1e-8)

    def test_series_term_ratio_decays(self, spec_d1):
        _, info = mc.H_lambda(spec_d1, 2.0, lam=1.0, full_output=True)
        assert float(np.max(info["last_ratio"])) < 1e-8

    def test_overflow_reported(self, spec_d1):
        with pytest.raises(NumericsError):
            mc.H_lambda(spec_d1, 50.0, lam=4.0)

    def test_growth_rate_below_gamma0(self, spec_d1):
        g = mc.gamma0(1.0, spec_d1)
        for t in (10.0, 50.0):
            rate = math.log(mc.H_lambda(spec_d1, t, lam=1.0)) / t
            assert rate <= g.gamma0 + 0.1


class TestGamma:
    def test_theta_decreasing(self, spec_d1):
        gs = np.geomspace(0.1, 100, 30)
        vals = [mc.theta_gamma(g, spec_d1) for g in gs]
        assert np.all(np.diff(vals) < 0)

    def test_residual(self, spec_d1):
        sol = mc.gamma0(2.0, spec_d1)
        assert sol.residual < 1e-9

    def test_monotone_in_lambda(self, spec_d1):
        roots = [mc.gamma0(l, spec_d1).gamma0 for l in (0.5, 1.0, 2.0, 4.0)]
        assert all(b > a for a, b in zip(roots, roots[1:]))

    def test_rate_exponent_fit(self, spec_d1):
        lams = np.geomspace(1e2, 1e4, 5)
        roots = np.array([mc.gamma0(l, spec_d1).gamma0 for l in lams])
        slope = np.polyfit(np.log(lams), np.log(roots), 1)[0]
        target = mc.gamma0_rate_exponent(spec_d1)
        assert abs(slope - target) <= 0.1 * target

    def test_zero_lambda_rejected(self, spec_d1):
        with pytest.raises(DomainError):
            mc.gamma0(0.0, spec_d1)

    def test_export(self, spec_d1):
        sol = mc.gamma0(1.0, spec_d1)
        assert '"gamma0"' in sol.to_json()


class TestBounds:
    def test_upper_bound_zero_coupling(self):
        from torpam.pam_solver import InitialMeasure

        spec = NoiseSpec(d=1, alpha=0.3, rho=1.0, lam=1e-9)
        mu = InitialMeasure.uniform(1.0)
        val = mc.p_moment_upper(1.0, [0.0], 2.0, mu, spec)
        assert val == pytest.approx(math.sqrt(2.0) / TWO_PI, rel=1e-6)

    def test_upper_bound_monotone_in_p(self, spec_d1):
        from torpam.pam_solver import InitialMeasure

        mu = InitialMeasure.uniform(1.0)
        b2 = mc.p_moment_upper(0.2, [0.0], 2.0, mu, spec_d1)
        b4 = mc.p_moment_upper(0.2, [0.0], 4.0, mu, spec_d1)
        assert np.isfinite(b2) and np.isfinite(b4)
        assert b4 >= b2

    def test_upper_bound_overflow_reports_inf(self, spec_d1):
        from torpam.pam_solver import InitialMeasure

        # H_{4 lambda sqrt(p)} passes e^709 here; the bound is still valid
        mu = InitialMeasure.uniform(1.0)
        assert mc.p_moment_upper(1.0, [0.0], 4.0, mu, spec_d1) == math.inf

    def test_upper_bound_rejects_small_p(self, spec_d1):
        from torpam.pam_solver import InitialMeasure

        with pytest.raises(DomainError):
            mc.p_moment_upper(0.5, [0.0], 1.5, InitialMeasure.uniform(), spec_d1)

    def test_lower_bound_formula_and_slope(self):
        from torpam.bridge import comparison_constants

        c_eps = comparison_constants(1.0)[0]
        c_f, c_mu, lam, d = 2.0, 1.0, 1.5, 1
        vals = [mc.lower_bound_second_moment(t, 1.0, c_f, c_mu, lam, d)
                for t in (5.0, 20.0)]
        expect5 = 0.5 * lam**-2 * c_eps * c_mu**2 * math.exp(c_f * 5.0 / 2)
        assert vals[0] == pytest.approx(expect5, rel=1e-12)
        slope = (math.log(vals[1]) - math.log(vals[0])) / 15.0
        assert slope == pytest.approx(c_f / 2.0, abs=1e-10)

    def test_holder_exponents(self):
        b1, b2 = mc.holder_exponents(0.3, 1)
        assert (b1, b2) == (pytest.approx(0.4), pytest.approx(0.8))
        with pytest.raises(DomainError):
            mc.holder_exponents(0.6, 1)
