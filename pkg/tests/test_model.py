"""Right-hand sides, Jacobians, nullcline maps, Dulac divergence."""

import math

import numpy as np
import pytest

from patchdyn import (
    DomainError,
    OdeParams,
    OriginalParams,
    ValidationError,
    dulac_divergence,
    h1,
    h2,
    jacobian_linear,
    jacobian_nonlinear,
    nondimensionalize,
    rhs_linear,
    rhs_nonlinear,
)
from patchdyn.model import h1_prime, h2_prime

from oracles import fd_jacobian, newton_2d, rhs_fn, rk4, sample_strict_params


class TestNondimensionalize:
    def test_unit_rates(self):
        p = nondimensionalize(OriginalParams(r=1, A=2, d=0.1, b=0.9, a=1, c=1, D=0.1))
        assert (p.m, p.e, p.h, p.delta, p.s) == (2.0, 0.1, 0.9, 0.1, 1.0)

    def test_mixed_rates(self):
        p = nondimensionalize(OriginalParams(r=2, A=1, d=0.2, b=1, a=1, c=2, D=0.5))
        assert (p.m, p.e, p.h, p.delta, p.s) == (2.0, 0.1, 0.25, 0.125, 0.5)

    def test_nonpositive_field_rejected(self):
        with pytest.raises(ValidationError):
            OriginalParams(r=1, A=0.0, d=0.1, b=0.9, a=1, c=1, D=0.1)

    def test_mortality_ratio_out_of_range_rejected(self):
        with pytest.raises(ValidationError):
            nondimensionalize(OriginalParams(r=0.5, A=2, d=1.0, b=0.9, a=1, c=1, D=0.1))

    def test_flow_conjugacy(self):
        # Integrating the dimensional system and rescaling (c*u/a, r*t) must
        # match integrating the reduced system directly.
        op = OriginalParams(r=2.0, A=1.0, d=0.2, b=1.0, a=1.0, c=2.0, D=0.5)
        p = nondimensionalize(op)

        def rhs_original(x):
            u, v = x
            return (
                u * (op.r * u / (op.A + u) - op.d - op.b * u) + op.D * u * (v - u),
                v * (op.a - op.c * v) + op.D * v * (u - v),
            )

        u0, v0 = 0.8, 0.3
        x0_reduced = (op.c * u0 / op.a, op.c * v0 / op.a)
        for tau in (10.0, 50.0):
            ref = rk4(rhs_original, (u0, v0), tau / op.r, dt=1e-3)
            red = rk4(rhs_fn("nonlinear", p), x0_reduced, tau, dt=1e-3)
            assert abs(op.c * ref[0] / op.a - red[0]) < 1e-6
            assert abs(op.c * ref[1] / op.a - red[1]) < 1e-6


class TestRhsNonlinear:
    def test_axis_u_zero(self):
        p = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)
        f1, _ = rhs_nonlinear(p, (0.0, 0.7))
        assert f1 == 0.0

    def test_hand_value(self):
        p = OdeParams(m=1.0, e=0.5, h=0.5, delta=0.0, s=1.0)
        assert rhs_nonlinear(p, (1.0, 1.0)) == (-0.5, 0.0)

    def test_residual_at_interior_equilibrium(self):
        p = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)
        root = newton_2d(rhs_fn("nonlinear", p), (0.49, 0.95))
        assert np.allclose(root, [0.48968624272055117, 0.9489686242720552], atol=1e-9)
        f1, f2 = rhs_nonlinear(p, (root[0], root[1]))
        assert max(abs(f1), abs(f2)) < 1e-8

    def test_axis_invariance_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = sample_strict_params(rng)
            v = rng.uniform(0.0, 3.0)
            u = rng.uniform(0.0, 3.0)
            assert rhs_nonlinear(p, (0.0, v))[0] == 0.0
            assert rhs_nonlinear(p, (u, 0.0))[1] == 0.0


class TestRhsLinear:
    def test_origin(self):
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=2.5, s=1.0, relaxed=True)
        assert rhs_linear(p, (0.0, 0.0)) == (0.0, 0.0)

    def test_hand_value(self):
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=2.5, s=1.0, relaxed=True)
        f1, f2 = rhs_linear(p, (1.0, 1.0))
        assert f1 == pytest.approx(1.0 / 3.0 - 3.0, abs=1e-15)
        assert f2 == 0.0

    def test_residual_at_nullcline_fixed_point(self):
        # Bisection on u - h1(h2(u)), independent of the library's solver.
        p = OdeParams(m=2.0, e=0.1, h=1.0, delta=0.2, s=1.0)

        def psi(u):
            return u - h1(p, h2(p, u))

        lo, hi = 1e-8, 1.0
        while psi(hi) > 0:
            hi *= 2
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if psi(mid) > 0:
                lo = mid
            else:
                hi = mid
        u_hat = 0.5 * (lo + hi)
        assert u_hat == pytest.approx(0.3507967180198178, abs=1e-10)
        f1, f2 = rhs_linear(p, (u_hat, h2(p, u_hat)))
        assert max(abs(f1), abs(f2)) < 1e-8

    def test_quasipositive_on_axes(self):
        # The u-axis is not invariant here: dispersal pushes inward.
        p = OdeParams(m=2.0, e=0.1, h=1.0, delta=0.2, s=1.0)
        assert rhs_linear(p, (0.0, 0.7))[0] == pytest.approx(p.delta * 0.7)
        assert rhs_linear(p, (0.4, 0.0))[1] == pytest.approx(p.delta * 0.4)


class TestJacobians:
    def test_origin_value(self):
        p = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)
        jac = jacobian_nonlinear(p, (0.0, 0.0))
        assert (jac.j11, jac.j12, jac.j21, jac.j22) == (-0.1, 0.0, 0.0, 0.9)

    def test_patch2_boundary_value(self):
        p = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)
        jac = jacobian_nonlinear(p, (0.0, 0.9))
        assert jac.j11 == pytest.approx(-0.01, abs=1e-15)  # B - e
        assert jac.j12 == 0.0
        assert jac.j21 == pytest.approx(0.09, abs=1e-15)  # B
        assert jac.j22 == pytest.approx(-0.9, abs=1e-15)  # -s

    def test_finite_difference_check_single_point(self):
        p = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)
        jac = jacobian_nonlinear(p, (0.3, 0.6))
        ref = fd_jacobian(rhs_fn("nonlinear", p), (0.3, 0.6), step=1e-5)
        assert np.allclose([[jac.j11, jac.j12], [jac.j21, jac.j22]], ref, atol=1e-6)

    @pytest.mark.parametrize("model", ["nonlinear", "linear"])
    def test_finite_difference_check_randomized(self, model):
        rng = np.random.default_rng(11)
        jac_fn = jacobian_nonlinear if model == "nonlinear" else jacobian_linear
        for _ in range(150):
            p = sample_strict_params(rng)
            x = (rng.uniform(0.05, 3.0), rng.uniform(0.05, 3.0))
            jac = jac_fn(p, x)
            ref = fd_jacobian(rhs_fn(model, p), x)
            scale = max(1.0, np.max(np.abs(ref)))
            assert np.max(np.abs(np.array([[jac.j11, jac.j12], [jac.j21, jac.j22]]) - ref)) < 1e-6 * scale

    def test_eigenvalues_complex_pair(self):
        from patchdyn import Matrix2

        mat = Matrix2(0.0, -1.0, 1.0, 0.0)
        lam1, lam2 = mat.eigenvalues()
        assert lam1 == -1j and lam2 == 1j


class TestNullclineMaps:
    def test_zeros_at_origin(self):
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=2.5, s=1.0, relaxed=True)
        assert h1(p, 0.0) == 0.0
        assert h2(p, 0.0) == 0.0

    def test_hand_value(self):
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=2.5, s=1.0, relaxed=True)
        assert h1(p, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_intersections_are_equilibria(self):
        # Simultaneous zeros of the linear model coincide with the
        # intersections of the two nullcline curves.
        cases = [
            OdeParams(m=2.0, e=0.1, h=1.0, delta=0.2, s=1.0),
            OdeParams(m=1.5, e=0.3, h=0.8, delta=0.4, s=1.2),
            OdeParams(m=3.0, e=0.5, h=1.2, delta=0.3, s=0.7),
        ]
        for p in cases:
            def psi(u, p=p):
                return u - h1(p, h2(p, u))

            lo, hi = 1e-8, 1.0
            while psi(hi) > 0:
                hi *= 2
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if psi(mid) > 0:
                    lo = mid
                else:
                    hi = mid
            u_star = 0.5 * (lo + hi)
            v_star = h2(p, u_star)
            root = newton_2d(rhs_fn("linear", p), (u_star, v_star))
            assert abs(root[0] - u_star) < 1e-8
            assert abs(root[1] - v_star) < 1e-8

    def test_monotone_convex_on_theorem_domains(self):
        # h2 is increasing and convex on u > 0 whenever m >= 1/h; h1 is
        # increasing and convex past its positive zero (everywhere once
        # delta > s).  Checked through divided differences.
        rng = np.random.default_rng(23)
        for _ in range(100):
            h_val = rng.uniform(0.3, 2.0)
            m = rng.uniform(1.0 / h_val, 3.0 / h_val)
            s = rng.uniform(0.2, 2.0)
            delta = rng.uniform(0.05, 1.0) * s
            p = OdeParams(m=m, e=rng.uniform(0.05, 0.9), h=h_val, delta=delta, s=s)
            us = np.linspace(1e-3, 5.0, 80)
            h2_vals = np.array([h2(p, u) for u in us])
            d1 = np.diff(h2_vals)
            d2 = np.diff(d1)
            assert np.all(d1 > 0)
            assert np.all(d2 > -1e-12)
            v_zero = (p.s - p.delta) / p.s
            vs = np.linspace(v_zero + 1e-3, v_zero + 5.0, 80)
            h1_vals = np.array([h1(p, v) for v in vs])
            assert np.all(np.diff(h1_vals) > 0)
            assert np.all(np.diff(np.diff(h1_vals)) > -1e-12)

    def test_prime_functions_match_fd(self):
        p = OdeParams(m=1.5, e=0.3, h=0.8, delta=0.4, s=1.2)
        for w in (0.2, 0.7, 1.9):
            fd1 = (h1(p, w + 1e-6) - h1(p, w - 1e-6)) / 2e-6
            fd2 = (h2(p, w + 1e-6) - h2(p, w - 1e-6)) / 2e-6
            assert h1_prime(p, w) == pytest.approx(fd1, rel=1e-7)
            assert h2_prime(p, w) == pytest.approx(fd2, rel=1e-7)


class TestDulacDivergence:
    def test_hand_value(self):
        # Frozen from the finite-difference divergence of (g*F1, g*F2) at
        # step 1e-6; equals (e-s)/(u^2 v^2) minus the positive remainder.
        p = OdeParams(m=1.0, e=0.5, h=1.0, delta=1.0, s=1.0)
        assert dulac_divergence(p, (1.0, 1.0)) == pytest.approx(-2.75, abs=1e-12)

    def test_negative_on_grid_in_rescue_regime(self):
        p = OdeParams(m=0.5, e=0.05, h=0.9, delta=0.1, s=0.9)
        for u in np.linspace(0.04, 2.0, 50):
            for v in np.linspace(0.04, 2.0, 50):
                assert dulac_divergence(p, (u, v)) < 0.0

    def test_matches_finite_difference_divergence(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            p = sample_strict_params(rng)
            u = rng.uniform(0.1, 3.0)
            v = rng.uniform(0.1, 3.0)

            def gf(x, p=p):
                f1, f2 = rhs_nonlinear(p, x)
                g = 1.0 / (x[0] ** 2 * x[1] ** 2)
                return (g * f1, g * f2)

            step = 1e-6
            div_fd = (gf((u + step, v))[0] - gf((u - step, v))[0]) / (2 * step) + (
                gf((u, v + step))[1] - gf((u, v - step))[1]
            ) / (2 * step)
            value = dulac_divergence(p, (u, v))
            assert abs(value - div_fd) < 1e-6 * max(1.0, abs(value))

    def test_domain_error_off_quadrant(self):
        p = OdeParams(m=1.0, e=0.5, h=1.0, delta=1.0, s=1.0)
        with pytest.raises(DomainError):
            dulac_divergence(p, (0.0, 1.0))
        with pytest.raises(DomainError):
            dulac_divergence(p, (1.0, -0.5))


class TestParamValidation:
    def test_strict_rejects_large_e(self):
        with pytest.raises(ValidationError):
            OdeParams(m=1.0, e=1.5, h=1.0, delta=0.1, s=1.0)

    def test_relaxed_allows_large_e(self):
        p = OdeParams(m=1.0, e=1.5, h=1.0, delta=0.1, s=1.0, relaxed=True)
        assert p.e == 1.5

    def test_delta_zero_allowed_negative_not(self):
        OdeParams(m=1.0, e=0.5, h=1.0, delta=0.0, s=1.0)
        with pytest.raises(ValidationError):
            OdeParams(m=1.0, e=0.5, h=1.0, delta=-0.1, s=1.0)

    def test_strict_gate_for_analysis(self):
        p = OdeParams(m=1.0, e=1.5, h=1.0, delta=0.1, s=1.0, relaxed=True)
        with pytest.raises(ValidationError):
            p.require_strict()
