"""Fold detection with transversality certificates, sweeps and sensitivities.

The interior pair of equilibria collides at ``m = mstar`` and the axis
pair at ``m = m0``.  ``sotomayor_check`` assembles the two nondegeneracy
quantities of the saddle-node test numerically (null vectors from the
Jacobian, curvature from central second differences) and compares them to
their closed forms.  ``sweep_allee`` tabulates the equilibrium branches
over an Allee-constant range, and ``abundance_sensitivity`` differentiates
the steady total abundance with respect to the Allee constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .equilibria import (
    Equilibrium,
    EquilibriumKind,
    GlobalVerdict,
    boundary_equilibria,
    derived_thresholds,
    positive_equilibria,
    regime_report,
)
from .errors import DomainError, PreconditionError
from .model import jacobian_nonlinear, rhs_nonlinear
from .params import OdeParams

__all__ = [
    "SotomayorReport",
    "sotomayor_check",
    "SweepRow",
    "BifurcationDiagram",
    "sweep_allee",
    "SensitivityReport",
    "abundance_sensitivity",
]

_ZERO_EIG_TOL = 1e-8
_NONDEGENERACY_TOL = 1e-8


@dataclass(frozen=True)
class SotomayorReport:
    """Certificate data for a saddle-node bifurcation in the Allee constant.

    ``alpha`` and ``beta`` span the right/left null spaces of the Jacobian
    at the fold (first components normalized to one).  ``eta_fm`` is the
    left null vector against the parameter derivative of the vector field;
    ``eta_d2`` is the quadratic coefficient of the flow along the null
    direction, i.e. half the second directional derivative of
    ``beta . F`` along ``alpha``.  The fold is certified when both are
    bounded away from zero.
    """

    branch: str
    m: float
    point: tuple[float, float]
    alpha: tuple[float, float]
    beta: tuple[float, float]
    eigenvalues: tuple[complex, complex]
    eta_fm: float
    eta_d2: float
    eta_fm_closed: float
    eta_d2_closed: float
    certified: bool


def _null_vector(j11: float, j12: float, j21: float, j22: float) -> tuple[float, float]:
    """Right null vector of a (numerically) singular 2x2 matrix, alpha_1 = 1."""
    # Each row gives the null direction; take the better-conditioned one.
    if max(abs(j11), abs(j12)) >= max(abs(j21), abs(j22)):
        row = (j11, j12)
    else:
        row = (j21, j22)
    a, b = row
    if abs(b) < 1e-300:
        raise PreconditionError("null vector has vanishing first component")
    return (1.0, -a / b)


def sotomayor_check(p: OdeParams, branch: str = "interior") -> SotomayorReport:
    """Assemble the saddle-node certificate at the fold of the given branch.

    ``branch="interior"`` certifies the collision of the two interior
    equilibria at ``m = mstar`` (requires ``B < e < 1``); ``"boundary"``
    certifies the axis collision at ``m = m0``.  The Allee constant in
    ``p`` is ignored; the fold location is computed from the remaining
    parameters and recorded in the report.

    Raises:
        PreconditionError: if the requested fold does not exist, or the
            Jacobian there fails to show a zero eigenvalue within ``1e-8``.
    """
    td = derived_thresholds(p)
    hd = p.h + p.delta
    hb = p.h + td.B
    if branch == "interior":
        if td.mstar is None:
            raise PreconditionError(
                "interior fold requires B < e < 1; no mstar exists for "
                f"e={p.e!r}, B={td.B!r}"
            )
        m_fold = td.mstar
        u = (1.0 + td.B - p.e - m_fold * hb) / (2.0 * hb)
        x = (u, (p.s + p.delta * u) / (p.s + p.delta))
        eta_fm_closed = -(u * u) / (m_fold + u) ** 2
        eta_d2_closed = -math.sqrt(p.e - td.B) * hb
    elif branch == "boundary":
        m_fold = td.m0
        u = (1.0 - p.e - m_fold * hd) / (2.0 * hd)
        x = (u, 0.0)
        eta_fm_closed = -(u * u) / (m_fold + u) ** 2
        eta_d2_closed = -math.sqrt(p.e) * hd
    else:
        raise DomainError(f"unknown branch {branch!r}; expected 'interior' or 'boundary'")

    pf = replace(p, m=m_fold)
    jac = jacobian_nonlinear(pf, x)
    eig = jac.eigenvalues()
    zero_idx = 0 if abs(eig[0]) <= abs(eig[1]) else 1
    if abs(eig[zero_idx]) > _ZERO_EIG_TOL:
        raise PreconditionError(
            f"parameters are not at a saddle-node: smallest |eigenvalue| is "
            f"{abs(eig[zero_idx])!r} > {_ZERO_EIG_TOL}"
        )
    other = eig[1 - zero_idx].real
    expected_sign = -1.0 if branch == "interior" else 1.0
    if other * expected_sign <= 0.0:
        raise PreconditionError(
            f"nonzero eigenvalue {other!r} has the wrong sign for the {branch} fold"
        )

    alpha = _null_vector(jac.j11, jac.j12, jac.j21, jac.j22)
    beta = _null_vector(jac.j11, jac.j21, jac.j12, jac.j22)  # transpose

    # beta . dF/dm, with the analytic parameter derivative (-u^2/(m+u)^2, 0).
    eta_fm = beta[0] * (-(x[0] ** 2) / (m_fold + x[0]) ** 2)

    # Quadratic coefficient along alpha: central second differences at
    # steps h and h/2, Richardson-combined to kill the O(h^2) truncation.
    def directional_second(step: float) -> float:
        x_plus = (x[0] + step * alpha[0], x[1] + step * alpha[1])
        x_minus = (x[0] - step * alpha[0], x[1] - step * alpha[1])
        f_plus = rhs_nonlinear(pf, x_plus)
        f_mid = rhs_nonlinear(pf, x)
        f_minus = rhs_nonlinear(pf, x_minus)
        return sum(
            beta[i] * (f_plus[i] - 2.0 * f_mid[i] + f_minus[i]) / (step * step)
            for i in range(2)
        )

    step = 1e-4 * max(1.0, abs(x[0]), abs(x[1]))
    coarse = directional_second(step)
    fine = directional_second(0.5 * step)
    eta_d2 = 0.5 * (4.0 * fine - coarse) / 3.0

    certified = abs(eta_fm) > _NONDEGENERACY_TOL and abs(eta_d2) > _NONDEGENERACY_TOL
    return SotomayorReport(
        branch=branch,
        m=m_fold,
        point=x,
        alpha=alpha,
        beta=beta,
        eigenvalues=eig,
        eta_fm=eta_fm,
        eta_d2=eta_d2,
        eta_fm_closed=eta_fm_closed,
        eta_d2_closed=eta_d2_closed,
        certified=certified,
    )


@dataclass(frozen=True)
class SweepRow:
    m: float
    branch: str
    u: float
    v: float
    stability: str
    is_sn_marker: bool = False


@dataclass(frozen=True)
class BifurcationDiagram:
    """Equilibrium branches tabulated over an Allee-constant range."""

    params: OdeParams
    m_values: tuple[float, ...]
    rows: tuple[SweepRow, ...]
    sn_markers: tuple[SweepRow, ...]


def _rows_for(eqs: list[Equilibrium], m: float) -> list[SweepRow]:
    return [
        SweepRow(m=m, branch=eq.kind.value, u=eq.u, v=eq.v, stability=eq.stability.value)
        for eq in eqs
    ]


def sweep_allee(
    p: OdeParams,
    m_lo: float,
    m_hi: float,
    steps: int,
    include_boundary: bool = False,
) -> BifurcationDiagram:
    """Tabulate equilibria on a uniform grid of Allee constants.

    Each grid value is solved in closed form (no continuation is needed
    for quadratic branches).  A saddle-node marker row is recorded at
    every fold location that falls inside the range: always the interior
    fold ``mstar``, plus the axis fold ``m0`` when boundary branches are
    requested.
    """
    if not m_lo < m_hi:
        raise DomainError(f"need m_lo < m_hi, got {m_lo!r} >= {m_hi!r}")
    if steps < 2:
        raise DomainError(f"need steps >= 2, got {steps!r}")
    p.require_strict()
    td = derived_thresholds(p)
    span = m_hi - m_lo
    m_values = tuple(m_lo + span * i / (steps - 1) for i in range(steps))
    rows: list[SweepRow] = []
    for m in m_values:
        pm = replace(p, m=m)
        rows.extend(_rows_for(positive_equilibria(pm), m))
        if include_boundary:
            rows.extend(_rows_for(boundary_equilibria(pm), m))

    markers: list[SweepRow] = []

    def _fold_marker(m_fold: float, interior: bool) -> None:
        if not m_lo <= m_fold <= m_hi:
            return
        pm = replace(p, m=m_fold)
        eqs = positive_equilibria(pm) if interior else boundary_equilibria(pm)
        kind = EquilibriumKind.E3 if interior else EquilibriumKind.UBAR3
        for eq in eqs:
            if eq.kind is kind:
                markers.append(
                    SweepRow(
                        m=m_fold,
                        branch="SN",
                        u=eq.u,
                        v=eq.v,
                        stability=eq.stability.value,
                        is_sn_marker=True,
                    )
                )

    if td.mstar is not None:
        _fold_marker(td.mstar, interior=True)
    if include_boundary:
        _fold_marker(td.m0, interior=False)
    return BifurcationDiagram(
        params=p, m_values=m_values, rows=tuple(rows), sn_markers=tuple(markers)
    )


@dataclass(frozen=True)
class SensitivityReport:
    """Closed-form response of the coexistence state to the Allee constant.

    Valid in the regime where the interior state attracts everything, so
    the steady total abundance ``total = u1 + v1`` is well defined.  All
    three derivatives are negative: a stronger Allee effect always lowers
    both patch densities.
    """

    params: OdeParams
    u1: float
    v1: float
    total: float
    curvature_gap: float
    du1_dm: float
    dv1_dm: float
    dtotal_dm: float


def abundance_sensitivity(p: OdeParams, m: float | None = None) -> SensitivityReport:
    """Differentiate the globally stable interior state with respect to ``m``.

    Implicit differentiation of the interior-equilibrium relation gives
    ``du1/dm = -u1 / (C*(m+u1)^2)`` with the positive curvature gap
    ``C = (h+B) - m/(m+u1)^2``, and the patch-2 response is the fixed
    fraction ``delta/(s+delta)`` of the patch-1 response.

    Raises:
        DomainError: outside the ``E1``-attracts-everything regime
            (``e < B``, or ``e = B`` with ``m`` below ``1/(h+B)``).
    """
    pm = p if m is None else replace(p, m=m)
    report = regime_report(pm)
    if report.verdict is not GlobalVerdict.E1_GAS:
        raise DomainError(
            "abundance sensitivity requires the E1-GAS regime "
            f"(e < B, or e = B with m < 1/(h+B)); got case {report.case!r}"
        )
    B = report.derived.B
    interior = [eq for eq in report.equilibria if eq.kind is EquilibriumKind.E1]
    assert len(interior) == 1
    u1, v1 = interior[0].u, interior[0].v
    mu = pm.m + u1
    curvature_gap = (pm.h + B) - pm.m / (mu * mu)
    du1_dm = -u1 / (curvature_gap * mu * mu)
    dv1_dm = pm.delta / (pm.s + pm.delta) * du1_dm
    return SensitivityReport(
        params=pm,
        u1=u1,
        v1=v1,
        total=u1 + v1,
        curvature_gap=curvature_gap,
        du1_dm=du1_dm,
        dv1_dm=dv1_dm,
        dtotal_dm=du1_dm + dv1_dm,
    )
