import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from orthant_t2 import chi_kernel as ck
from orthant_t2 import extremal_bounds as eb
from orthant_t2.errors import DomainError

C = eb.SHARP_CONSTANT


def chi_moment_quadrature(r, j):
    num = quad(lambda s: s ** j * s ** (r - 1.0) * math.exp(-0.5 * s * s), 0, np.inf,
               epsabs=1e-13, epsrel=1e-12)[0]
    den = quad(lambda s: s ** (r - 1.0) * math.exp(-0.5 * s * s), 0, np.inf,
               epsabs=1e-13, epsrel=1e-12)[0]
    return num / den


def cubic_shift_objective(r, u):
    # F(t, u) = C_r gamma3(t) / (u - t)^3, the quantity W_r minimizes over t
    cr = ck.norm_const(r)
    return lambda t: cr * ck.gamma3(r, t) / (u - t) ** 3


class TestMuR:
    def test_values(self):
        assert eb.mu_r(1.0) == pytest.approx(2.0 * math.sqrt(2.0 / math.pi), rel=1e-12)
        assert eb.mu_r(2.0) == pytest.approx(1.5 * math.sqrt(math.pi / 2.0), rel=1e-12)

    def test_matches_quadrature(self):
        for r in (0.5, 1.0, 2.0, 5.5):
            oracle = chi_moment_quadrature(r, 3) / chi_moment_quadrature(r, 2)
            assert eb.mu_r(r) == pytest.approx(oracle, rel=1e-9)

    def test_bracket(self):
        for r in range(1, 51):
            m = eb.mu_r(float(r))
            assert math.sqrt(r + 1.0) < m < math.sqrt(r + 2.0)


class TestMuOfT:
    def test_at_origin(self):
        for r in (1.0, 2.0, 10.0):
            assert eb.mu_of_t(r, 0.0) == pytest.approx(eb.mu_r(r), rel=1e-10)

    def test_strictly_increasing(self):
        for r in (1.0, 5.0):
            ts = np.linspace(-3.0, 8.0, 50)
            vals = [eb.mu_of_t(r, float(t)) for t in ts]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_large_shift_behavior(self):
        # mu(t) - t decreases to 0 like 3/t
        t = 20.0
        gap = eb.mu_of_t(1.0, t) - t
        assert 0.0 < gap < 0.2
        assert gap == pytest.approx(3.0 / t, rel=0.15)


class TestMuInverse:
    def test_at_threshold(self):
        assert eb.mu_inverse(1.0, eb.mu_r(1.0)) == 0.0

    def test_roundtrip(self):
        assert eb.mu_of_t(1.0, eb.mu_inverse(1.0, 3.0)) == pytest.approx(3.0, abs=1e-8)
        assert eb.mu_of_t(5.0, eb.mu_inverse(5.0, 6.0)) == pytest.approx(6.0, abs=1e-8)

    def test_below_threshold_rejected(self):
        with pytest.raises(DomainError):
            eb.mu_inverse(1.0, 1.0)


class TestWBound:
    def test_continuity_at_threshold(self):
        for r in (1.0, 2.0, 5.0):
            m = eb.mu_r(r)
            assert eb.w_bound(r, m) == pytest.approx(r / (m * m), rel=1e-9)

    def test_minimality_probes(self):
        F = cubic_shift_objective(1.0, 4.0)
        w = eb.w_bound(1.0, 4.0)
        for t in (0.0, 1.0, 2.0, 3.0, 3.9):
            assert w <= F(t) + 1e-15

    def test_equals_grid_minimum(self):
        # independent minimization of F(t, u), never touching mu_inverse
        for r, u in ((1.0, 3.0), (2.0, 4.0), (5.0, 5.0), (1.0, 7.0)):
            F = cubic_shift_objective(r, u)
            coarse = min(np.linspace(-1.0, u - 1e-3, 400), key=lambda t: F(float(t)))
            res = minimize_scalar(F, bounds=(max(-1.0, coarse - 0.5), min(u - 1e-9, coarse + 0.5)),
                                  method="bounded", options={"xatol": 1e-12})
            assert eb.w_bound(r, u) == pytest.approx(float(res.fun), rel=1e-8)

    def test_ratio_window_far_out(self):
        ratio = eb.w_bound(1.0, 10.0) / ck.survival(1.0, 10.0)
        assert 4.0 < ratio < C


class TestQBound:
    def test_regions(self):
        assert eb.q_bound(5.0, 1.0).q_value == 1.0
        assert eb.q_bound(5.0, 1.0).region == "UNIT"
        assert eb.q_bound(4.0, 2.0).q_value == 1.0
        rep = eb.q_bound(1.0, 1.5)
        assert rep.q_value == pytest.approx(1.0 / 1.5**2, rel=1e-12)
        assert rep.region == "QUADRATIC"
        assert eb.q_bound(1.0, 2.5).region == "CUBIC"

    def test_continuity_at_branch_points(self):
        for r in (1.0, 2.0, 5.0, 10.0):
            s = math.sqrt(r)
            assert eb.q_bound(r, s - 1e-9).q_value == pytest.approx(eb.q_bound(r, s + 1e-9).q_value, abs=1e-8)
            m = eb.mu_r(r)
            assert eb.q_bound(r, m - 1e-9).q_value == pytest.approx(eb.q_bound(r, m + 1e-9).q_value, abs=1e-8)

    def test_report_consistency(self):
        rep = eb.q_bound(3.0, 4.0)
        assert rep.lambda_ratio == pytest.approx(rep.q_value / rep.chi_tail, rel=1e-12)
        assert rep.eaton_bound == pytest.approx(C * rep.chi_tail, rel=1e-15)
        assert 0.0 < rep.q_value <= 1.0
        assert rep.q_value <= 3.0 / 16.0 + 1e-12

    def test_negative_u_rejected(self):
        with pytest.raises(DomainError):
            eb.q_bound(1.0, -0.5)

    def test_lambda_below_constant_everywhere(self):
        for r in (1.0, 2.0, 5.0, 10.0, 50.0):
            m = eb.mu_r(r)
            for u in np.linspace(0.0, m + 12.0, 120):
                assert eb.q_bound(r, float(u)).lambda_ratio < C

    def test_lambda_approaches_constant(self):
        for r in (1.0, 2.0, 5.0, 10.0, 50.0):
            assert eb.q_bound(r, eb.mu_r(r) + 12.0).lambda_ratio >= 0.9 * C


class TestJFunction:
    def test_limit_at_zero(self):
        assert eb.j_function(0.0) == 0.25
        assert eb.j_function(1e-13) == pytest.approx(0.25, rel=1e-12)

    def test_closed_form_at_three(self):
        assert eb.j_function(3.0) == pytest.approx((6.0 / 81.0) * (math.e**3 - 13.0), rel=1e-13)

    def test_series_identity(self):
        assert 2.0 / 9.0 + 2.0 / 3.0 + 2.0 + 3.0 * eb.j_function(3.0) == pytest.approx(C, abs=1e-12)

    def test_series_matches_closed_form_at_switch(self):
        for a in (0.0999, 0.1001, 0.05, 0.2):
            closed = 6.0 * (math.exp(a) - 1.0 - a - a * a / 2.0 - a**3 / 6.0) / a**4
            assert eb.j_function(a) == pytest.approx(closed, rel=1e-9)

    def test_strictly_increasing(self):
        grid = np.linspace(1e-3, 6.0, 200)
        vals = [eb.j_function(float(a)) for a in grid]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestAu:
    def test_below_three(self):
        for r in (1.0, 2.0, 5.0):
            lo = math.sqrt(max(r - 1.0, 0.0))
            for u in np.linspace(lo + 0.05, lo + 15.0, 80):
                assert eb.a_u(r, float(u)) < 3.0

    def test_far_value(self):
        assert 2.9 < eb.a_u(1.0, 10.0) < 3.0

    def test_monotone_on_cubic_range(self):
        for r in (1.0, 2.0, 5.0, 10.0):
            m = eb.mu_r(r)
            vals = [eb.a_u(r, float(u)) for u in np.linspace(m, m + 10.0, 150)]
            assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_domain(self):
        with pytest.raises(DomainError):
            eb.a_u(5.0, 1.0)


class TestLambdaEnvelope:
    def test_below_constant(self):
        for r in (1.0, 2.0, 5.0, 10.0):
            m = eb.mu_r(r)
            for u in np.linspace(m, m + 12.0, 100):
                assert eb.lambda_envelope(r, float(u)) < C

    def test_dominates_lambda(self):
        for r in (1.0, 2.0, 5.0, 10.0):
            m = eb.mu_r(r)
            for u in np.linspace(m, m + 12.0, 100):
                rep = eb.q_bound(r, float(u))
                assert rep.lambda_ratio < rep.lambda_envelope

    def test_tightens_far_out(self):
        assert C - eb.lambda_envelope(1.0, 15.0) < 0.05

    def test_domain(self):
        with pytest.raises(DomainError):
            eb.lambda_envelope(1.0, 1.0)


class TestLambdaMonotone:
    def test_reference_grid(self):
        assert eb.lambda_monotone_check([eb.mu_r(1.0), 2.0, 3.0, 5.0, 8.0])

    def test_single_point(self):
        assert eb.lambda_monotone_check([2.0])

    def test_value_at_eight(self):
        assert eb.q_bound(1.0, 8.0).lambda_ratio < C

    def test_unsorted_rejected(self):
        with pytest.raises(DomainError):
            eb.lambda_monotone_check([3.0, 2.0])
