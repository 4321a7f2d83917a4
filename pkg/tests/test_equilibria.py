"""Thresholds, closed-form equilibria, classification and regimes."""

import math
from dataclasses import replace

import numpy as np
import pytest

from patchdyn import (
    EquilibriumKind,
    GlobalVerdict,
    OdeParams,
    Stability,
    boundary_equilibria,
    classify_equilibrium,
    derived_thresholds,
    jacobian_nonlinear,
    linear_equilibria,
    positive_equilibria,
    regime_report,
    rhs_linear,
    rhs_nonlinear,
)

from oracles import (
    newton_2d,
    rhs_fn,
    sample_fold_params,
    sample_strict_params,
    scan_axis_roots,
    scan_positive_roots,
)

FIG2 = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)


def kinds(eqs):
    return [eq.kind for eq in eqs]


class TestDerivedThresholds:
    def test_reference_set(self):
        td = derived_thresholds(FIG2)
        assert td.B == pytest.approx(0.09, abs=2e-17)
        assert td.m0 == pytest.approx(0.467544467966, abs=1e-12)
        assert td.mstar == pytest.approx(0.818181818182, abs=1e-12)
        assert abs(td.disc1(td.m0)) < 1e-12
        assert abs(td.disc3(td.mstar)) < 1e-12

    def test_ordering_inequalities(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            p = sample_strict_params(rng)
            td = derived_thresholds(p)
            assert td.m0 < (1.0 - p.e) / (p.h + p.delta) < td.m1
            if td.mstar is not None:
                assert td.mstar < (1.0 + td.B - p.e) / (p.h + td.B) < td.m1star

    def test_decoupled_limit(self):
        p = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.0, s=0.9)
        td = derived_thresholds(p)
        assert td.B == 0.0
        assert td.mstar == td.m0

    def test_balanced_case_has_no_interior_fold(self):
        p = OdeParams(m=0.5, e=0.09, h=0.9, delta=0.1, s=0.9)
        td = derived_thresholds(p)
        assert abs(p.e - td.B) < 1e-9
        assert td.mstar is None and td.m1star is None
        assert 1.0 / (p.h + td.B) == pytest.approx(1.0101010101, abs=1e-9)


class TestBoundaryEquilibria:
    def test_two_axis_states(self):
        p = replace(FIG2, m=0.4)
        eqs = boundary_equilibria(p)
        assert kinds(eqs) == [
            EquilibriumKind.E0,
            EquilibriumKind.EV,
            EquilibriumKind.UBAR1,
            EquilibriumKind.UBAR2,
        ]
        ubar1, ubar2 = eqs[2], eqs[3]
        assert ubar1.u == pytest.approx(0.4, abs=1e-12)
        assert ubar2.u == pytest.approx(0.1, abs=1e-12)
        hd = p.h + p.delta
        for eq in (ubar1, ubar2):
            residual = hd * eq.u**2 + (p.m * hd + p.e - 1.0) * eq.u + p.m * p.e
            assert abs(residual) < 1e-10

    def test_double_root_at_fold(self):
        td = derived_thresholds(FIG2)
        p = replace(FIG2, m=td.m0)
        eqs = boundary_equilibria(p)
        assert kinds(eqs)[-1] == EquilibriumKind.UBAR3
        u3 = eqs[-1].u
        assert u3 == pytest.approx(0.216227766017, abs=1e-10)
        # Double root consistency: product of roots is m*e/(h+delta).
        assert u3 * u3 == pytest.approx(td.m0 * p.e / (p.h + p.delta), rel=1e-12)
        assert u3 == pytest.approx(math.sqrt(td.m0 * p.e), rel=1e-12)  # h+delta = 1 here

    def test_none_above_fold(self):
        p = replace(FIG2, m=0.6)
        eqs = boundary_equilibria(p)
        assert kinds(eqs) == [EquilibriumKind.E0, EquilibriumKind.EV]
        assert eqs[1].v == pytest.approx(0.9, abs=1e-15)


class TestPositiveEquilibria:
    def test_bistable_pair(self):
        eqs = positive_equilibria(FIG2)
        assert kinds(eqs) == [EquilibriumKind.E1, EquilibriumKind.E2]
        e1, e2 = eqs
        assert e1.u == pytest.approx(0.48968624272055117, abs=1e-12)
        assert e1.v == pytest.approx(0.9489686242720552, abs=1e-12)
        assert e2.u == pytest.approx(0.010313757279448863, abs=1e-12)
        assert e2.v == pytest.approx(0.9010313757279449, abs=1e-12)
        for eq in eqs:
            f1, f2 = rhs_nonlinear(FIG2, eq.point)
            assert max(abs(f1), abs(f2)) < 1e-10

    def test_balanced_case_closed_form(self):
        p = OdeParams(m=0.5, e=0.09, h=0.9, delta=0.1, s=0.9)
        eqs = positive_equilibria(p)
        assert kinds(eqs) == [EquilibriumKind.E1]
        assert eqs[0].u == pytest.approx(0.51010101010101, abs=1e-12)
        assert eqs[0].v == pytest.approx(0.9510101010101011, abs=1e-12)

    def test_balanced_case_above_threshold_empty(self):
        p = OdeParams(m=1.2, e=0.09, h=0.9, delta=0.1, s=0.9)
        assert positive_equilibria(p) == []

    def test_empty_above_fold(self):
        assert positive_equilibria(replace(FIG2, m=0.9)) == []

    def test_double_root_on_fold(self):
        td = derived_thresholds(FIG2)
        eqs = positive_equilibria(replace(FIG2, m=td.mstar))
        assert kinds(eqs) == [EquilibriumKind.E3]
        assert eqs[0].u == pytest.approx(1.0 / 11.0, rel=1e-12)

    def test_rescue_regime_single_root(self):
        p = OdeParams(m=2.0, e=0.05, h=0.9, delta=0.1, s=0.9)
        eqs = positive_equilibria(p)
        assert kinds(eqs) == [EquilibriumKind.E1]

    def test_count_law(self):
        rng = np.random.default_rng(17)
        for _ in range(400):
            p = sample_strict_params(rng)
            td = derived_thresholds(p)
            n = len(positive_equilibria(p))
            if p.e < td.B:
                assert n == 1
            elif td.mstar is None:
                assert n in (0, 1)
            else:
                assert n == (2 if p.m < td.mstar else 0) or abs(p.m - td.mstar) < 1e-9

    def test_ordering_and_range(self):
        rng = np.random.default_rng(19)
        found = 0
        while found < 120:
            p = sample_fold_params(rng)
            eqs = positive_equilibria(p)
            if len(eqs) != 2:
                continue
            found += 1
            td = derived_thresholds(p)
            u3_would_be = (1.0 + td.B - p.e - p.m * (p.h + td.B)) / (2.0 * (p.h + td.B))
            upper = (1.0 + td.B - p.e) / (p.h + td.B)
            assert eqs[1].u < u3_would_be < eqs[0].u
            assert 0.0 < eqs[1].u and eqs[0].u < upper

    def test_oracle_equivalence_sampled(self):
        rng = np.random.default_rng(29)
        for _ in range(150):
            p = sample_strict_params(rng)
            closed = positive_equilibria(p)
            scanned = scan_positive_roots(p)
            in_range = [eq for eq in closed if eq.u <= 10.0 and eq.v <= 10.0]
            for eq in in_range:
                root = newton_2d(rhs_fn("nonlinear", p), eq.point)
                assert abs(root[0] - eq.u) < 1e-10
                assert abs(root[1] - eq.v) < 1e-10
            for u_s, v_s in scanned:
                assert any(abs(eq.u - u_s) < 1e-6 for eq in in_range)
            us = sorted(eq.u for eq in in_range)
            if all(u > 0.005 for u in us) and (len(us) < 2 or us[1] - us[0] > 0.01):
                assert len(scanned) == len(in_range)
            axis_closed = [eq.u for eq in boundary_equilibria(p)
                           if eq.kind in (EquilibriumKind.UBAR1, EquilibriumKind.UBAR2,
                                          EquilibriumKind.UBAR3)]
            axis_scanned = scan_axis_roots(p)
            double_root = abs(p.m - derived_thresholds(p).m0) < 1e-7
            if not double_root:
                assert len(axis_closed) == len([u for u in axis_scanned if u <= 10.0])


class TestClassification:
    def test_origin_always_saddle(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            p = sample_strict_params(rng)
            eq = boundary_equilibria(p)[0]
            assert eq.stability is Stability.SADDLE

    def test_interior_saddle_has_negative_determinant(self):
        eqs = positive_equilibria(FIG2)
        e2 = eqs[1]
        assert e2.stability is Stability.SADDLE
        assert jacobian_nonlinear(FIG2, e2.point).det() < 0.0

    def test_balanced_patch2_state_node_at_threshold(self):
        p = OdeParams(m=0.5, e=0.09, h=0.9, delta=0.1, s=0.9)
        td = derived_thresholds(p)
        p_at = replace(p, m=1.0 / (p.h + td.B))
        ev = boundary_equilibria(p_at)[1]
        assert ev.stability is Stability.STABLE_NODE

    def test_balanced_patch2_state_sectors(self):
        p_above = OdeParams(m=1.5, e=0.09, h=0.9, delta=0.1, s=0.9)
        ev = boundary_equilibria(p_above)[1]
        assert ev.stability is Stability.ATTRACTING_SADDLE_NODE
        assert ev.sector == "parabolic-right"
        p_below = OdeParams(m=0.5, e=0.09, h=0.9, delta=0.1, s=0.9)
        ev = boundary_equilibria(p_below)[1]
        assert ev.stability is Stability.ATTRACTING_SADDLE_NODE
        assert ev.sector == "hyperbolic-right"

    def test_axis_pair_unstable(self):
        p = replace(FIG2, m=0.4)
        eqs = boundary_equilibria(p)
        assert eqs[2].stability is Stability.SADDLE
        assert eqs[3].stability is Stability.UNSTABLE_NODE
        for eq in eqs[2:]:
            assert max(lam.real for lam in eq.eigenvalues) > 0.0

    def test_fold_labels(self):
        td = derived_thresholds(FIG2)
        ubar3 = boundary_equilibria(replace(FIG2, m=td.m0))[-1]
        assert ubar3.stability is Stability.REPELLING_SADDLE_NODE
        e3 = positive_equilibria(replace(FIG2, m=td.mstar))[0]
        assert e3.stability is Stability.ATTRACTING_SADDLE_NODE

    def test_classify_reapplies(self):
        for eq in boundary_equilibria(FIG2) + positive_equilibria(FIG2):
            assert classify_equilibrium(FIG2, eq) is eq.stability

    def test_classify_rejects_stale_point(self):
        from patchdyn import InternalConsistencyError

        e1 = positive_equilibria(FIG2)[0]
        with pytest.raises(InternalConsistencyError):
            classify_equilibrium(replace(FIG2, m=0.9), e1)

    def test_eigenvalue_concordance_randomized(self):
        rng = np.random.default_rng(37)
        for _ in range(500):
            p = sample_strict_params(rng)
            for eq in boundary_equilibria(p) + positive_equilibria(p):
                re_parts = sorted(lam.real for lam in eq.eigenvalues)
                if eq.stability in (Stability.STABLE_NODE, Stability.STABLE_FOCUS):
                    assert re_parts[1] < 0.0
                elif eq.stability is Stability.SADDLE:
                    assert re_parts[0] < 0.0 < re_parts[1]
                elif eq.stability in (Stability.UNSTABLE_NODE, Stability.UNSTABLE_FOCUS):
                    assert re_parts[0] > 0.0


class TestRegimeReport:
    @pytest.mark.parametrize(
        "m,e,case,verdict",
        [
            (2.0, 0.05, "a", GlobalVerdict.E1_GAS),
            (0.3, 0.1, "e", GlobalVerdict.BISTABLE),
            (0.5, 0.1, "g", GlobalVerdict.BISTABLE),
            (0.9, 0.1, "i", GlobalVerdict.EV_GAS),
        ],
    )
    def test_cases(self, m, e, case, verdict):
        rep = regime_report(OdeParams(m=m, e=e, h=0.9, delta=0.1, s=0.9))
        assert rep.case == case
        assert rep.verdict is verdict

    def test_case_g_window_membership(self):
        rep = regime_report(FIG2)
        td = rep.derived
        assert td.m0 < FIG2.m < td.mstar
        assert rep.case == "g"
        assert rep.verdict is GlobalVerdict.BISTABLE

    def test_fold_cases(self):
        td = derived_thresholds(FIG2)
        assert regime_report(replace(FIG2, m=td.m0)).case == "f"
        assert regime_report(replace(FIG2, m=td.mstar)).case == "h"
        assert regime_report(replace(FIG2, m=td.mstar)).verdict is GlobalVerdict.UNDETERMINED

    def test_balanced_cases(self):
        base = OdeParams(m=0.5, e=0.09, h=0.9, delta=0.1, s=0.9)
        td = derived_thresholds(base)
        threshold = 1.0 / (base.h + td.B)
        assert regime_report(replace(base, m=1.5)).case == "b"
        assert regime_report(replace(base, m=threshold)).case == "c"
        assert regime_report(base).case == "d"
        assert regime_report(base).verdict is GlobalVerdict.E1_GAS
        assert regime_report(replace(base, m=threshold)).verdict is GlobalVerdict.UNDETERMINED


class TestLinearEquilibria:
    def test_no_coexistence_regime(self):
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=2.5, s=1.0, relaxed=True)
        rep = linear_equilibria(p)
        assert rep.verdict is GlobalVerdict.ORIGIN_GAS
        assert kinds(rep.equilibria) == [EquilibriumKind.ORIGIN]
        assert rep.equilibria[0].stability is Stability.STABLE_NODE

    def test_unique_coexistence_regime(self):
        p = OdeParams(m=2.0, e=0.1, h=1.0, delta=0.2, s=1.0)
        rep = linear_equilibria(p)
        assert rep.verdict is GlobalVerdict.EHAT_GAS  # delta < (s-e)/2 = 0.45
        origin, ehat = rep.equilibria
        assert origin.stability is Stability.SADDLE
        assert ehat.u == pytest.approx(0.3507967180198178, abs=1e-10)
        f1, f2 = rhs_linear(p, ehat.point)
        assert max(abs(f1), abs(f2)) < 1e-10

    def test_outside_both_theorems(self):
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=1.5, s=1.0, relaxed=True)
        rep = linear_equilibria(p)
        assert rep.verdict is GlobalVerdict.UNDETERMINED
        assert EquilibriumKind.ORIGIN in kinds(rep.equilibria)
        positives = [eq for eq in rep.equilibria if eq.kind is EquilibriumKind.EHAT]
        assert len(positives) == 1  # the nullclines still cross once here

    def test_coexistence_without_gas_certificate(self):
        p = OdeParams(m=2.0, e=0.1, h=1.0, delta=0.8, s=1.0)
        rep = linear_equilibria(p)  # delta > (s-e)/2, existence still certain
        assert rep.verdict is GlobalVerdict.UNDETERMINED
        assert len(rep.equilibria) == 2

    def test_fixed_point_bracket_failure_diagnosed(self):
        from patchdyn.equilibria import _linear_fixed_point
        from patchdyn import NumericError

        # In the no-coexistence regime the map has no positive fixed point,
        # so the bracket search must fail loudly, not hang or fabricate.
        p = OdeParams(m=2.0, e=2.0, h=1.0, delta=2.5, s=1.0, relaxed=True)
        with pytest.raises(NumericError, match="bracket"):
            _linear_fixed_point(p)

    def test_delta_zero_rejected(self):
        from patchdyn import DomainError

        p = OdeParams(m=2.0, e=0.1, h=1.0, delta=0.0, s=1.0)
        with pytest.raises(DomainError):
            linear_equilibria(p)
