"""Closed-form equilibria and stability regimes of both dispersal models.

The nonlinear model's steady states reduce to quadratics in the patch-1
density: one on the invariant axis ``v = 0`` and one on the interior line
``v = (s + delta*u)/(s + delta)``.  Both are solved in the
cancellation-free form (larger-magnitude root first, companion root from
the product of roots), and every equilibrium carries a theorem-derived
stability label cross-checked against numeric eigenvalues.

Case analysis is exact in the underlying theory, so floating-point inputs
get explicit equality bands: ``e`` counts as equal to the dispersal
composite ``B`` (and ``m`` as sitting on a fold) when within a relative
``1e-9``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import DomainError, InternalConsistencyError, NumericError
from .model import (
    Matrix2,
    h1,
    h2,
    jacobian_linear,
    jacobian_nonlinear,
    rhs_linear,
    rhs_nonlinear,
)
from .params import OdeParams

__all__ = [
    "EQUALITY_BAND",
    "DerivedQuantities",
    "EquilibriumKind",
    "Stability",
    "GlobalVerdict",
    "Equilibrium",
    "RegimeReport",
    "LinearReport",
    "derived_thresholds",
    "boundary_equilibria",
    "positive_equilibria",
    "classify_equilibrium",
    "regime_report",
    "linear_equilibria",
]

# Relative half-width of the bands that route inputs into degenerate branches.
EQUALITY_BAND = 1e-9


def _within_band(x: float, y: float) -> bool:
    return abs(x - y) <= EQUALITY_BAND * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class DerivedQuantities:
    """Threshold constants controlling existence of equilibria.

    ``B = s*delta/(s + delta)`` is the dispersal-growth composite; ``m0``
    and ``m1`` bracket the axis fold, ``mstar``/``m1star`` the interior
    fold.  The interior pair is ``None`` when ``e <= B`` (within band),
    where a positive equilibrium exists for every ``m``.
    """

    params: OdeParams
    B: float
    m0: float
    m1: float
    mstar: float | None
    m1star: float | None

    def disc1(self, m: float) -> float:
        """Discriminant of the axis-equilibrium quadratic at Allee constant ``m``."""
        p = self.params
        hd = p.h + p.delta
        return hd * hd * m * m - 2.0 * (1.0 + p.e) * hd * m + (1.0 - p.e) ** 2

    def disc3(self, m: float) -> float:
        """Discriminant of the interior-equilibrium quadratic at ``m``."""
        p = self.params
        hb = p.h + self.B
        eb = p.e - self.B
        return hb * hb * m * m - 2.0 * (eb + 1.0) * hb * m + (eb - 1.0) ** 2


def derived_thresholds(p: OdeParams) -> DerivedQuantities:
    """Compute ``B`` and the fold locations ``m0 < m1`` and ``mstar < m1star``."""
    p.require_strict()
    B = p.s * p.delta / (p.s + p.delta)
    sqrt_e = math.sqrt(p.e)
    hd = p.h + p.delta
    m0 = (1.0 - sqrt_e) ** 2 / hd
    m1 = (1.0 + sqrt_e) ** 2 / hd
    if p.e - B > EQUALITY_BAND * max(1.0, p.e):
        hb = p.h + B
        sqrt_eb = math.sqrt(p.e - B)
        mstar: float | None = (1.0 - sqrt_eb) ** 2 / hb
        m1star: float | None = (1.0 + sqrt_eb) ** 2 / hb
    else:
        mstar = None
        m1star = None
    return DerivedQuantities(params=p, B=B, m0=m0, m1=m1, mstar=mstar, m1star=m1star)


class EquilibriumKind(str, Enum):
    E0 = "E0"
    EV = "Ev"
    UBAR1 = "ubar1"
    UBAR2 = "ubar2"
    UBAR3 = "ubar3"
    E1 = "E1"
    E2 = "E2"
    E3 = "E3"
    ORIGIN = "O"
    EHAT = "Ehat"


class Stability(str, Enum):
    STABLE_NODE = "stable-node"
    STABLE_FOCUS = "stable-focus"
    SADDLE = "saddle"
    UNSTABLE_NODE = "unstable-node"
    UNSTABLE_FOCUS = "unstable-focus"
    ATTRACTING_SADDLE_NODE = "attracting-saddle-node"
    REPELLING_SADDLE_NODE = "repelling-saddle-node"
    DEGENERATE = "degenerate"

    @property
    def attracting(self) -> bool:
        return self in (
            Stability.STABLE_NODE,
            Stability.STABLE_FOCUS,
            Stability.ATTRACTING_SADDLE_NODE,
        )


class GlobalVerdict(str, Enum):
    EV_GAS = "Ev-GAS"
    E1_GAS = "E1-GAS"
    ORIGIN_GAS = "Origin-GAS"
    EHAT_GAS = "Ehat-GAS"
    BISTABLE = "bistable"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Equilibrium:
    """A steady state with its theorem-based label and eigenvalue pair."""

    u: float
    v: float
    kind: EquilibriumKind
    stability: Stability
    eigenvalues: tuple[complex, complex]
    sector: str | None = None

    @property
    def point(self) -> tuple[float, float]:
        return (self.u, self.v)


def _refine_sign_label(jac: Matrix2) -> Stability:
    """Stability purely from eigenvalue signs (used for numeric fallbacks)."""
    lam1, lam2 = jac.eigenvalues()
    if min(abs(lam1), abs(lam2)) <= 1e-9:
        return Stability.DEGENERATE
    if jac.det() < 0.0:
        return Stability.SADDLE
    if lam1.imag != 0.0:
        return Stability.STABLE_FOCUS if lam1.real < 0.0 else Stability.UNSTABLE_FOCUS
    return Stability.STABLE_NODE if lam2.real < 0.0 else Stability.UNSTABLE_NODE


def _check(condition: bool, message: str) -> None:
    if not condition:
        raise InternalConsistencyError(message)


def _classify_nonlinear(
    p: OdeParams, kind: EquilibriumKind, u: float, v: float
) -> tuple[Stability, tuple[complex, complex], str | None]:
    """Theorem-based label for a nonlinear-model equilibrium, eigenvalue-checked."""
    jac = jacobian_nonlinear(p, (u, v))
    eig = jac.eigenvalues()
    re_lo = min(eig[0].real, eig[1].real)
    re_hi = max(eig[0].real, eig[1].real)
    B = p.s * p.delta / (p.s + p.delta)
    sector: str | None = None

    if kind is EquilibriumKind.E0:
        label = Stability.SADDLE
        _check(jac.det() < 0.0, f"E0 should be a saddle, det={jac.det()!r}")
    elif kind is EquilibriumKind.EV:
        if _within_band(p.e, B):
            q = p.m * (p.h + B)
            if _within_band(q, 1.0):
                label = Stability.STABLE_NODE
            else:
                label = Stability.ATTRACTING_SADDLE_NODE
                sector = "parabolic-right" if q > 1.0 else "hyperbolic-right"
        elif p.e < B:
            label = Stability.SADDLE
            _check(jac.det() < 0.0, f"Ev should be a saddle for e<B, det={jac.det()!r}")
        else:
            label = Stability.STABLE_NODE
            _check(re_hi < 0.0, f"Ev should be stable for B<e<1, eig={eig!r}")
    elif kind is EquilibriumKind.UBAR1:
        label = Stability.SADDLE
        _check(jac.det() < 0.0, f"ubar1 should be a saddle, det={jac.det()!r}")
    elif kind is EquilibriumKind.UBAR2:
        label = Stability.UNSTABLE_NODE
        _check(re_lo > 0.0, f"ubar2 should be an unstable node, eig={eig!r}")
    elif kind is EquilibriumKind.UBAR3:
        label = Stability.REPELLING_SADDLE_NODE
        _check(re_hi > 0.0, f"ubar3 nonzero eigenvalue should be positive, eig={eig!r}")
    elif kind is EquilibriumKind.E1:
        lam1, lam2 = eig
        label = Stability.STABLE_NODE if lam1.imag == 0.0 else Stability.STABLE_FOCUS
        _check(re_hi < 0.0, f"E1 should be stable, eig={eig!r}")
    elif kind is EquilibriumKind.E2:
        label = Stability.SADDLE
        _check(jac.det() < 0.0, f"E2 should be a saddle, det={jac.det()!r}")
    elif kind is EquilibriumKind.E3:
        label = Stability.ATTRACTING_SADDLE_NODE
        _check(re_lo < 0.0, f"E3 nonzero eigenvalue should be negative, eig={eig!r}")
    else:
        raise DomainError(f"kind {kind!r} is not a nonlinear-model equilibrium")
    return label, eig, sector


def _make_nonlinear(p: OdeParams, kind: EquilibriumKind, u: float, v: float) -> Equilibrium:
    f1, f2 = rhs_nonlinear(p, (u, v))
    scale = max(1.0, abs(u), abs(v))
    _check(
        max(abs(f1), abs(f2)) <= 1e-8 * scale,
        f"{kind.value} residual too large: {(f1, f2)!r} at ({u!r}, {v!r})",
    )
    label, eig, sector = _classify_nonlinear(p, kind, u, v)
    return Equilibrium(u=u, v=v, kind=kind, stability=label, eigenvalues=eig, sector=sector)


def classify_equilibrium(p: OdeParams, eq: Equilibrium) -> Stability:
    """Re-derive the theorem-based stability label of ``eq`` under ``p``.

    Raises ``InternalConsistencyError`` if ``eq`` is not actually a steady
    state of ``p`` (stale point, wrong parameters) or if the label
    contradicts the sign pattern of the numeric eigenvalues (degenerate
    saddle-node branches excepted, where one eigenvalue vanishes by
    construction).
    """
    if eq.kind in (EquilibriumKind.ORIGIN, EquilibriumKind.EHAT):
        return _make_linear(p, eq.kind, eq.u, eq.v).stability
    return _make_nonlinear(p, eq.kind, eq.u, eq.v).stability


def _stable_quadratic_roots(a: float, b: float, c: float) -> tuple[float, float]:
    """Real roots of ``a x^2 + b x + c`` (descending), assuming a positive discriminant.

    The larger-magnitude root is formed without cancellation; the companion
    comes from the product of roots ``c/a``.
    """
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise NumericError(f"negative discriminant {disc!r} in quadratic solve")
    sign_b = 1.0 if b >= 0.0 else -1.0
    q = -0.5 * (b + sign_b * math.sqrt(disc))
    if q == 0.0:
        return 0.0, 0.0
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 >= r2 else (r2, r1)


def _interior_v(p: OdeParams, u: float) -> float:
    return (p.s + p.delta * u) / (p.s + p.delta)


def boundary_equilibria(p: OdeParams) -> list[Equilibrium]:
    """Equilibria on the coordinate axes of the nonlinear model.

    Always contains the origin and the patch-2-only state
    ``Ev = (0, s/(s+delta))``.  The ``v = 0`` axis carries two more states
    for ``m < m0`` which merge into a single double root at ``m = m0``
    (within band) and disappear above it.
    """
    p.require_strict()
    td = derived_thresholds(p)
    out = [
        _make_nonlinear(p, EquilibriumKind.E0, 0.0, 0.0),
        _make_nonlinear(p, EquilibriumKind.EV, 0.0, p.s / (p.s + p.delta)),
    ]
    hd = p.h + p.delta
    if _within_band(p.m, td.m0):
        u3 = (1.0 - p.e - p.m * hd) / (2.0 * hd)
        out.append(_make_nonlinear(p, EquilibriumKind.UBAR3, u3, 0.0))
    elif p.m < td.m0:
        u_hi, u_lo = _stable_quadratic_roots(hd, p.m * hd + p.e - 1.0, p.m * p.e)
        out.append(_make_nonlinear(p, EquilibriumKind.UBAR1, u_hi, 0.0))
        out.append(_make_nonlinear(p, EquilibriumKind.UBAR2, u_lo, 0.0))
    return out


def positive_equilibria(p: OdeParams) -> list[Equilibrium]:
    """Interior equilibria of the nonlinear model, per the existence trichotomy.

    ``e < B``: a single state ``E1`` for every ``m``.  ``e = B`` (band): a
    single state iff ``m < 1/(h+B)``.  ``B < e < 1``: two states below the
    fold ``mstar``, the double root ``E3`` on it (band), none above.
    """
    p.require_strict()
    td = derived_thresholds(p)
    B = td.B
    hb = p.h + B
    out: list[Equilibrium] = []
    if _within_band(p.e, B):
        u = (1.0 - p.m * hb) / hb
        if u > 0.0 and not _within_band(p.m * hb, 1.0):
            out.append(_make_nonlinear(p, EquilibriumKind.E1, u, _interior_v(p, u)))
    elif p.e < B:
        u_hi, u_lo = _stable_quadratic_roots(
            hb, p.m * hb + p.e - 1.0 - B, p.m * (p.e - B)
        )
        u = u_hi if u_hi > 0.0 else u_lo
        out.append(_make_nonlinear(p, EquilibriumKind.E1, u, _interior_v(p, u)))
    else:
        mstar = td.mstar
        assert mstar is not None
        if _within_band(p.m, mstar):
            u3 = (1.0 + B - p.e - p.m * hb) / (2.0 * hb)
            out.append(_make_nonlinear(p, EquilibriumKind.E3, u3, _interior_v(p, u3)))
        elif p.m < mstar:
            u_hi, u_lo = _stable_quadratic_roots(
                hb, p.m * hb + p.e - 1.0 - B, p.m * (p.e - B)
            )
            out.append(_make_nonlinear(p, EquilibriumKind.E1, u_hi, _interior_v(p, u_hi)))
            out.append(_make_nonlinear(p, EquilibriumKind.E2, u_lo, _interior_v(p, u_lo)))
    return out


_CASE_VERDICTS = {
    "a": GlobalVerdict.E1_GAS,
    "b": GlobalVerdict.UNDETERMINED,
    "c": GlobalVerdict.UNDETERMINED,
    "d": GlobalVerdict.E1_GAS,
    "e": GlobalVerdict.BISTABLE,
    "f": GlobalVerdict.BISTABLE,
    "g": GlobalVerdict.BISTABLE,
    "h": GlobalVerdict.UNDETERMINED,
    "i": GlobalVerdict.EV_GAS,
}


@dataclass(frozen=True)
class RegimeReport:
    """Which of the nine parameter regimes holds, with its dynamical verdict.

    Cases: (a) ``e < B``; (b)-(d) ``e = B`` with ``m(h+B)`` above / at /
    below one; (e)-(f) ``B < e < 1`` with ``m`` below / at the axis fold
    ``m0``; (g)-(i) ``m`` between the folds / at ``mstar`` / above it.
    """

    params: OdeParams
    derived: DerivedQuantities
    case: str
    equilibria: tuple[Equilibrium, ...]
    verdict: GlobalVerdict


def regime_report(p: OdeParams) -> RegimeReport:
    """Classify the parameter point into its regime and global verdict.

    A global-stability verdict is only emitted when the corresponding
    theorem's hypotheses hold exactly: ``Ev`` attracts everything for
    ``B < e < 1, m > mstar``; ``E1`` does for ``e < B`` or ``e = B`` with
    ``m(h+B) < 1``; both attractors coexist below the interior fold.  The
    remaining boundary cases are reported as undetermined.
    """
    p.require_strict()
    td = derived_thresholds(p)
    B = td.B
    if _within_band(p.e, B):
        q = p.m * (p.h + B)
        case = "c" if _within_band(q, 1.0) else ("b" if q > 1.0 else "d")
    elif p.e < B:
        case = "a"
    elif _within_band(p.m, td.m0):
        case = "f"
    elif p.m < td.m0:
        case = "e"
    else:
        mstar = td.mstar
        assert mstar is not None
        if _within_band(p.m, mstar):
            case = "h"
        elif p.m < mstar:
            case = "g"
        else:
            case = "i"
    eqs = tuple(boundary_equilibria(p) + positive_equilibria(p))
    return RegimeReport(
        params=p, derived=td, case=case, equilibria=eqs, verdict=_CASE_VERDICTS[case]
    )


def _classify_linear(
    p: OdeParams, kind: EquilibriumKind, u: float, v: float
) -> tuple[Stability, tuple[complex, complex], str | None]:
    jac = jacobian_linear(p, (u, v))
    return _refine_sign_label(jac), jac.eigenvalues(), None


def _make_linear(p: OdeParams, kind: EquilibriumKind, u: float, v: float) -> Equilibrium:
    f1, f2 = rhs_linear(p, (u, v))
    scale = max(1.0, abs(u), abs(v))
    _check(
        max(abs(f1), abs(f2)) <= 1e-8 * scale,
        f"{kind.value} residual too large: {(f1, f2)!r} at ({u!r}, {v!r})",
    )
    label, eig, sector = _classify_linear(p, kind, u, v)
    return Equilibrium(u=u, v=v, kind=kind, stability=label, eigenvalues=eig, sector=sector)


@dataclass(frozen=True)
class LinearReport:
    params: OdeParams
    equilibria: tuple[Equilibrium, ...]
    verdict: GlobalVerdict


def _linear_fixed_point(p: OdeParams) -> float:
    """Positive fixed point of ``u -> h1(h2(u))`` for the linear model.

    Damped iteration (weight 0.5) safeguarded by a bisection bracket on
    ``u - h1(h2(u))``, then polished by 2-D Newton on the vector field.
    """
    def psi(u: float) -> float:
        return u - h1(p, h2(p, u))

    lo = 1e-9
    if not psi(lo) > 0.0:
        raise NumericError(
            f"no bracket for the linear fixed point: psi({lo!r})={psi(lo)!r} <= 0"
        )
    hi = 1.0
    for _ in range(200):
        if psi(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise NumericError(
            f"linear fixed-point bracket not found below u={hi!r} "
            f"(psi({hi!r})={psi(hi)!r})"
        )
    x = 0.5 * (lo + hi)
    for _ in range(300):
        proposal = 0.5 * x + 0.5 * h1(p, h2(p, x))
        if not (lo < proposal < hi) or not math.isfinite(proposal):
            proposal = 0.5 * (lo + hi)
        if psi(proposal) > 0.0:
            lo = proposal
        else:
            hi = proposal
        x = proposal
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    # Newton polish on the full 2-D system.
    u, v = x, h2(p, x)
    for _ in range(50):
        f1, f2 = rhs_linear(p, (u, v))
        if max(abs(f1), abs(f2)) < 1e-14:
            break
        jac = jacobian_linear(p, (u, v))
        det = jac.det()
        if det == 0.0:
            break
        u -= (jac.j22 * f1 - jac.j12 * f2) / det
        v -= (-jac.j21 * f1 + jac.j11 * f2) / det
    f1, f2 = rhs_linear(p, (u, v))
    if max(abs(f1), abs(f2)) > 1e-10:
        raise NumericError(
            f"linear fixed point failed to converge: residual {(f1, f2)!r} at ({u!r}, {v!r})"
        )
    return u


def _enumerate_linear_roots(p: OdeParams, u_max: float = 10.0, n: int = 4000) -> list[float]:
    """Sign-change scan of ``u - h1(h2(u))`` on ``(0, u_max]`` with bisection."""
    def psi(u: float) -> float:
        return u - h1(p, h2(p, u))

    roots: list[float] = []
    step = u_max / n
    prev_u = step * 1e-3
    prev_val = psi(prev_u)
    for i in range(1, n + 1):
        cur_u = i * step
        cur_val = psi(cur_u)
        if prev_val == 0.0:
            roots.append(prev_u)
        elif prev_val * cur_val < 0.0:
            a, b = prev_u, cur_u
            fa = prev_val
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = psi(mid)
                if fa * fm <= 0.0:
                    b = mid
                else:
                    a, fa = mid, fm
                if b - a <= 1e-14 * max(1.0, b):
                    break
            roots.append(0.5 * (a + b))
        prev_u, prev_val = cur_u, cur_val
    # Keep only genuine interior states (the companion v must be positive).
    return [u for u in roots if u > 0.0 and h2(p, u) > 0.0]


def linear_equilibria(p: OdeParams) -> LinearReport:
    """Equilibria and global verdict for the linear-dispersal model.

    Two sufficient regimes are classified exactly: strong Allee with
    mortality above growth and dispersal past ``e*s/(e-s)`` leaves only a
    globally stable origin, while dispersal at or below ``s`` (still with
    ``m >= 1/h``) guarantees a unique interior state, globally stable for
    ``delta < (s-e)/2``.  Anything else is enumerated numerically and
    reported as undetermined.
    """
    if not p.delta > 0:
        raise DomainError("linear-model analysis requires delta > 0")
    origin_jac = jacobian_linear(p, (0.0, 0.0))
    if p.m >= 1.0 / p.h and p.e > p.s and p.delta > p.e * p.s / (p.e - p.s):
        origin = _make_linear(p, EquilibriumKind.ORIGIN, 0.0, 0.0)
        _check(
            origin.stability.attracting,
            f"origin should be stable in the no-coexistence regime, eig={origin.eigenvalues!r}",
        )
        return LinearReport(params=p, equilibria=(origin,), verdict=GlobalVerdict.ORIGIN_GAS)
    if p.m >= 1.0 / p.h and 0.0 < p.delta <= p.s:
        origin = _make_linear(p, EquilibriumKind.ORIGIN, 0.0, 0.0)
        _check(
            origin_jac.det() < 0.0,
            f"origin should be a saddle in the coexistence regime, det={origin_jac.det()!r}",
        )
        u_hat = _linear_fixed_point(p)
        ehat = _make_linear(p, EquilibriumKind.EHAT, u_hat, h2(p, u_hat))
        _check(
            ehat.stability.attracting,
            f"unique interior linear equilibrium should be stable, eig={ehat.eigenvalues!r}",
        )
        verdict = (
            GlobalVerdict.EHAT_GAS
            if p.delta < (p.s - p.e) / 2.0
            else GlobalVerdict.UNDETERMINED
        )
        return LinearReport(params=p, equilibria=(origin, ehat), verdict=verdict)
    # Outside both theorems: report what a bracketing scan finds.
    eqs = [
        Equilibrium(
            u=0.0,
            v=0.0,
            kind=EquilibriumKind.ORIGIN,
            stability=_refine_sign_label(origin_jac),
            eigenvalues=origin_jac.eigenvalues(),
        )
    ]
    for u in _enumerate_linear_roots(p):
        eqs.append(_make_linear(p, EquilibriumKind.EHAT, u, h2(p, u)))
    return LinearReport(params=p, equilibria=tuple(eqs), verdict=GlobalVerdict.UNDETERMINED)
