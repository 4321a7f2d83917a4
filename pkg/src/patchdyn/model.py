"""Right-hand sides, Jacobians, nullcline maps and the Dulac divergence.

States are plain ``(u, v)`` tuples of patch densities.  All functions here
are pure; they never mutate their inputs and are safe to evaluate from any
number of threads.
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

from .errors import DomainError
from .params import OdeParams

__all__ = [
    "State",
    "Matrix2",
    "rhs_nonlinear",
    "rhs_linear",
    "jacobian_nonlinear",
    "jacobian_linear",
    "h1",
    "h2",
    "h1_prime",
    "h2_prime",
    "dulac_divergence",
]

State = tuple[float, float]


class Matrix2(NamedTuple):
    """2x2 Jacobian with trace/determinant eigenvalue helpers."""

    j11: float
    j12: float
    j21: float
    j22: float

    def trace(self) -> float:
        return self.j11 + self.j22

    def det(self) -> float:
        return self.j11 * self.j22 - self.j12 * self.j21

    def eigenvalues(self) -> tuple[complex, complex]:
        """Eigenvalues from the trace/determinant closed form.

        A negative discriminant yields a complex-conjugate pair; otherwise
        both values are real (returned as complex with zero imaginary
        part).  Ordered by real part, ascending.
        """
        tr = self.trace()
        disc = tr * tr - 4.0 * self.det()
        if disc >= 0.0:
            root = math.sqrt(disc)
            lam1 = 0.5 * (tr - root)
            lam2 = 0.5 * (tr + root)
            return complex(lam1), complex(lam2)
        root = cmath.sqrt(complex(disc))
        return 0.5 * (tr - root), 0.5 * (tr + root)


def rhs_nonlinear(p: OdeParams, x: State) -> State:
    """Time derivative of the nonlinear-dispersal model.

    Patch 1 combines Allee-limited birth, mortality and competition with a
    density-weighted exchange term ``delta*u*(v - u)``; patch 2 is logistic
    with the mirrored exchange ``delta*v*(u - v)``.
    """
    u, v = x
    f1 = u * (u / (p.m + u) - p.e - p.h * u) + p.delta * u * (v - u)
    f2 = p.s * v * (1.0 - v) + p.delta * v * (u - v)
    return f1, f2


def rhs_linear(p: OdeParams, x: State) -> State:
    """Time derivative of the linear-dispersal model.

    Same reactions as the nonlinear model but with density-independent
    exchange ``delta*(v - u)`` / ``delta*(u - v)``.  Equivalently
    ``(delta*(v - h2(u)), delta*(u - h1(v)))``.
    """
    u, v = x
    f1 = u * (u / (p.m + u) - p.e - p.h * u) + p.delta * (v - u)
    f2 = p.s * v * (1.0 - v) + p.delta * (u - v)
    return f1, f2


def jacobian_nonlinear(p: OdeParams, x: State) -> Matrix2:
    """Analytic Jacobian of :func:`rhs_nonlinear` at ``x``."""
    u, v = x
    mu = p.m + u
    return Matrix2(
        j11=u * (2.0 * p.m + u) / (mu * mu) - p.e - 2.0 * (p.h + p.delta) * u + p.delta * v,
        j12=p.delta * u,
        j21=p.delta * v,
        j22=p.s - 2.0 * (p.s + p.delta) * v + p.delta * u,
    )


def jacobian_linear(p: OdeParams, x: State) -> Matrix2:
    """Analytic Jacobian of :func:`rhs_linear` at ``x``."""
    u, v = x
    mu = p.m + u
    return Matrix2(
        j11=u * (2.0 * p.m + u) / (mu * mu) - p.e - 2.0 * p.h * u - p.delta,
        j12=p.delta,
        j21=p.delta,
        j22=p.s - 2.0 * p.s * v - p.delta,
    )


def h1(p: OdeParams, v: float) -> float:
    """First nullcline map of the linear model: ``u`` such that ``dv/dt = 0``."""
    return ((p.delta - p.s) * v + p.s * v * v) / p.delta


def h2(p: OdeParams, u: float) -> float:
    """Second nullcline map of the linear model: ``v`` such that ``du/dt = 0``."""
    return u * (-u / (p.m + u) + p.e + p.delta + p.h * u) / p.delta


def h1_prime(p: OdeParams, v: float) -> float:
    return (p.delta - p.s + 2.0 * p.s * v) / p.delta


def h2_prime(p: OdeParams, u: float) -> float:
    mu = p.m + u
    return -(u * (2.0 * p.m + u) / (mu * mu) - p.e - p.delta - 2.0 * p.h * u) / p.delta


def dulac_divergence(p: OdeParams, x: State) -> float:
    """Divergence of ``g*F`` for the nonlinear model with ``g = 1/(u^2 v^2)``.

    Evaluated from the directly differentiated closed-form partials

        d(g*F1)/du = e/(u^2 v^2) - 1/((m+u)^2 v^2) - delta/(u^2 v)
        d(g*F2)/dv = -(s + delta*u)/(u^2 v^2)

    whose sum regroups as ``(e - s)/(u^2 v^2)`` minus a positive remainder,
    hence is strictly negative whenever ``e < s``; that sign rules out
    closed orbits in the open first quadrant.

    Raises:
        DomainError: if either coordinate is not strictly positive.
    """
    u, v = x
    if not (u > 0.0 and v > 0.0):
        raise DomainError(f"dulac_divergence requires u, v > 0, got ({u!r}, {v!r})")
    mu = p.m + u
    d_gf1_du = p.e / (u * u * v * v) - 1.0 / (mu * mu * v * v) - p.delta / (u * u * v)
    d_gf2_dv = -(p.s + p.delta * u) / (u * u * v * v)
    return d_gf1_du + d_gf2_dv
