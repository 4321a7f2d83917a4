"""Parameter blocks for the dimensional and nondimensional two-patch models.

The dimensional model tracks two patch densities: patch 1 grows under a
strong Allee effect and patch 2 logistically, with density-dependent
(nonlinear) dispersal coupling them.  Rescaling densities by ``c/a`` and
time by ``r`` reduces the seven dimensional rates to the five
dimensionless groups ``(m, e, h, delta, s)`` used everywhere else in this
package.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

__all__ = ["OriginalParams", "OdeParams", "nondimensionalize"]


@dataclass(frozen=True)
class OriginalParams:
    """Dimensional rates of the two-patch model.

    Attributes:
        r: Maximum birth rate in patch 1 (1/time).
        A: Allee-effect strength (density).
        d: Natural mortality in patch 1 (1/time).
        b: Intra-patch competition death rate in patch 1 (1/(density*time)).
        a: Intrinsic growth rate in patch 2 (1/time).
        c: Competition death rate in patch 2 (1/(density*time)).
        D: Dispersal coefficient (1/(density*time)).
    """

    r: float
    A: float
    d: float
    b: float
    a: float
    c: float
    D: float

    def __post_init__(self) -> None:
        for name in ("r", "A", "d", "b", "a", "c", "D"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(
                    f"OriginalParams.{name} must be strictly positive, got {value!r}"
                )


@dataclass(frozen=True)
class OdeParams:
    """Dimensionless parameter vector ``(m, e, h, delta, s)``.

    ``m`` is the Allee constant, ``e`` the scaled mortality, ``h`` the
    scaled competition rate, ``delta`` the scaled dispersal intensity and
    ``s`` the scaled patch-2 growth rate.

    Strict mode (the default) additionally asserts ``0 < e < 1``, the
    standing assumption of the nonlinear-dispersal model.  The linear
    dispersal model is studied for mortalities at or above one, so
    ``relaxed=True`` drops the upper bound (``e > 0`` still required).

    ``delta`` may be zero, which decouples the patches; every formula in
    the package degenerates continuously there.
    """

    m: float
    e: float
    h: float
    delta: float
    s: float
    relaxed: bool = False

    def __post_init__(self) -> None:
        for name in ("m", "h", "s"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(
                    f"OdeParams.{name} must be strictly positive, got {value!r}"
                )
        if not self.delta >= 0:
            raise ValidationError(
                f"OdeParams.delta must be nonnegative, got {self.delta!r}"
            )
        if not self.e > 0:
            raise ValidationError(f"OdeParams.e must be positive, got {self.e!r}")
        if not self.relaxed and not self.e < 1:
            raise ValidationError(
                f"strict-mode OdeParams requires e < 1, got e={self.e!r} "
                "(use relaxed=True for the linear-dispersal model)"
            )

    def require_strict(self) -> "OdeParams":
        """Return self after checking the nonlinear model's ``0 < e < 1``."""
        if not 0 < self.e < 1:
            raise ValidationError(
                f"operation requires strict-mode parameters (0 < e < 1), got e={self.e!r}"
            )
        return self


def nondimensionalize(p: OriginalParams) -> OdeParams:
    """Map dimensional rates to the dimensionless vector.

    Densities rescale as ``c*u/a`` and time as ``r*t``; the parameter
    groups are ``m = A*c/a``, ``e = d/r``, ``h = a*b/(c*r)``,
    ``delta = D*a/(c*r)`` and ``s = a/r``.  The result is validated in
    strict mode, so a mortality-to-birth ratio outside ``(0, 1)`` raises
    ``ValidationError``.
    """
    return OdeParams(
        m=p.A * p.c / p.a,
        e=p.d / p.r,
        h=p.a * p.b / (p.c * p.r),
        delta=p.D * p.a / (p.c * p.r),
        s=p.a / p.r,
    )
