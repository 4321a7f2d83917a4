"""Spatially explicit two-patch systems on an interval, by method of lines.

The domain ``[0, L]`` splits at ``L1`` into an Allee patch and a logistic
patch; each component obeys a scalar reaction-diffusion equation whose
piecewise-constant coefficients encode that structure.  Dispersal is
either linear (``delta * w_xx``) or density-dependent, discretized
literally as ``delta * w * w_xx`` (a conservative divergence form
``d/dx(delta * w * w_x)`` is available behind a flag for comparison).

Space is discretized into equal cells with coefficients sampled at cell
centers; the zero-flux boundary is realized by mirror ghost values, so the
discrete diffusion operator sums to exactly zero over the domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, ValidationError
from .ode_sim import TerminalEvent

__all__ = [
    "CoefficientProfile",
    "PdeConfig",
    "DiscretizedProblem",
    "PdeSeries",
    "PdeFunctionals",
    "INITIAL_DATA_PRESETS",
    "initial_data",
    "build_pde_problem",
    "integrate_pde",
    "pde_functionals",
]

Pair = tuple[float, float]


@dataclass(frozen=True)
class CoefficientProfile:
    """Piecewise-constant coefficient functions with one breakpoint.

    Each field holds ``(value on [0, L1], value on [L1, L])``.  The u
    equation uses ``(m, e, h, s1)`` and the v equation ``(m1, e1, h1, s)``.
    ``c1`` is a uniform positive lower bound on the competition and growth
    coefficients, kept with the profile because the boundedness estimates
    quoted by the monitors require it.
    """

    m: Pair
    m1: Pair
    e: Pair
    e1: Pair
    h: Pair
    h1: Pair
    s: Pair
    s1: Pair
    c1: float = 0.0

    def __post_init__(self) -> None:
        for name in ("m", "m1", "e", "e1", "h", "h1", "s", "s1"):
            pair = getattr(self, name)
            for value in pair:
                if not (math.isfinite(value) and value >= 0.0):
                    raise ValidationError(
                        f"profile field {name} must be finite and nonnegative, got {pair!r}"
                    )
        positive_min = min(*self.h, *self.h1, *self.s, *self.s1)
        if not positive_min > 0.0:
            raise ValidationError("h, h1, s, s1 must be strictly positive everywhere")
        if self.c1 == 0.0:
            object.__setattr__(self, "c1", 0.5 * positive_min)
        if not 0.0 < self.c1 < positive_min:
            raise ValidationError(
                f"c1 must satisfy 0 < c1 < min(h, h1, s, s1) = {positive_min!r}, got {self.c1!r}"
            )

    @classmethod
    def two_patch(cls, m: float, e: float, h: float, s: float) -> "CoefficientProfile":
        """Allee patch on ``[0, L1]`` (unit growth rate), logistic patch beyond.

        On the logistic patch the Allee constant and mortality vanish, the
        competition coefficient is one and the growth rate is ``s``; both
        components see the same reaction, so the subscripted pairs mirror
        the plain ones.
        """
        return cls(
            m=(m, 0.0), m1=(m, 0.0),
            e=(e, 0.0), e1=(e, 0.0),
            h=(h, 1.0), h1=(h, 1.0),
            s=(1.0, s), s1=(1.0, s),
        )

    @classmethod
    def constant(cls, m: float, e: float, h: float, s: float) -> "CoefficientProfile":
        """Spatially uniform coefficients (no patch structure)."""
        return cls(
            m=(m, m), m1=(m, m),
            e=(e, e), e1=(e, e),
            h=(h, h), h1=(h, h),
            s=(s, s), s1=(s, s),
        )

    def sample(self, name: str, centers: np.ndarray, breakpoint: float) -> np.ndarray:
        left, right = getattr(self, name)
        return np.where(centers < breakpoint, left, right).astype(float)


def _two_peak(x: np.ndarray, c1: float, c2: float, w2: float = 1.0) -> np.ndarray:
    width = math.sqrt(0.008)
    return np.exp(-(((x - c1) / width) ** 2)) + w2 * np.exp(-(((x - c2) / width) ** 2))


INITIAL_DATA_PRESETS = {
    "quadratic": lambda x: (3.0 + x**2, 2.0 + x**2),
    "flat5": lambda x: (np.full_like(x, 5.0), np.full_like(x, 5.0)),
    "gauss-1.8": lambda x: (_two_peak(x, 1.8, 0.4), _two_peak(x, 1.8, 0.4)),
    "gauss-1.9": lambda x: (_two_peak(x, 1.9, 0.4), _two_peak(x, 1.9, 0.4)),
    "gauss-1.9-scaled": lambda x: (_two_peak(x, 1.9, 0.4, 0.65), _two_peak(x, 1.9, 0.4, 0.65)),
    "gauss-1.9-floor": lambda x: (1e-4 + _two_peak(x, 1.9, 0.4), 1e-4 + _two_peak(x, 1.9, 0.4)),
}


def initial_data(preset: str, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate a named initial-data preset at the grid nodes."""
    try:
        maker = INITIAL_DATA_PRESETS[preset]
    except KeyError:
        raise ValidationError(
            f"unknown initial-data preset {preset!r}; "
            f"available: {sorted(INITIAL_DATA_PRESETS)}"
        ) from None
    return maker(x)


@dataclass(frozen=True)
class PdeConfig:
    """Geometry, dispersal and run settings for one simulation.

    ``initial`` is either a preset name or explicit per-cell samples
    ``(u0, v0)`` of length ``n``.
    """

    delta1: float
    delta2: float
    kind: str
    profile: CoefficientProfile
    initial: str | tuple = "flat5"
    L: float = math.pi
    L1: float = math.pi / 2.0
    n: int = 100
    t_end: float = 50.0
    tol: float = 1e-6
    snapshot_dt: float = 0.5
    divergence_form: bool = False

    def __post_init__(self) -> None:
        if self.kind not in ("linear", "nonlinear"):
            raise ValidationError(f"kind must be 'linear' or 'nonlinear', got {self.kind!r}")
        if not 0.0 < self.L1 < self.L:
            raise ValidationError(f"need 0 < L1 < L, got L1={self.L1!r}, L={self.L!r}")
        if self.n < 4:
            raise ValidationError(f"need at least 4 cells, got {self.n!r}")
        if not (self.delta1 > 0.0 and self.delta2 > 0.0):
            raise ValidationError("dispersal rates must be strictly positive")
        if not self.t_end > 0.0:
            raise ValidationError(f"t_end must be positive, got {self.t_end!r}")
        if not 1e-12 <= self.tol <= 1e-3:
            raise ValidationError(f"tol must lie in [1e-12, 1e-3], got {self.tol!r}")
        if not 0.0 < self.snapshot_dt <= self.t_end:
            raise ValidationError(f"snapshot_dt must lie in (0, t_end], got {self.snapshot_dt!r}")


@dataclass(frozen=True)
class DiscretizedProblem:
    """Cell-centered discretization of a :class:`PdeConfig`."""

    config: PdeConfig
    x: np.ndarray
    dx: float
    breakpoint: float
    coef_u: np.ndarray  # rows m, e, h, s1 sampled per cell
    coef_v: np.ndarray  # rows m1, e1, h1, s sampled per cell
    u0: np.ndarray
    v0: np.ndarray
    warnings: tuple[str, ...] = field(default=())


def build_pde_problem(config: PdeConfig) -> DiscretizedProblem:
    """Sample coefficients and initial data on a uniform cell-centered grid.

    The patch boundary is snapped to the nearest cell edge (with a
    recorded warning when that moves it) so each cell sees exactly one
    coefficient value.
    """
    n = config.n
    dx = config.L / n
    x = (np.arange(n) + 0.5) * dx
    edge_index = min(max(int(round(config.L1 / dx)), 1), n - 1)
    breakpoint = edge_index * dx
    warnings: list[str] = []
    if abs(breakpoint - config.L1) > 1e-12 * max(1.0, config.L):
        warnings.append(
            f"patch boundary L1={config.L1!r} snapped to cell edge {breakpoint!r}"
        )
    profile = config.profile
    coef_u = np.vstack([profile.sample(nm, x, breakpoint) for nm in ("m", "e", "h", "s1")])
    coef_v = np.vstack([profile.sample(nm, x, breakpoint) for nm in ("m1", "e1", "h1", "s")])
    if isinstance(config.initial, str):
        u0, v0 = initial_data(config.initial, x)
    else:
        u0_raw, v0_raw = config.initial
        u0 = np.asarray(u0_raw, dtype=float)
        v0 = np.asarray(v0_raw, dtype=float)
        if u0.shape != (n,) or v0.shape != (n,):
            raise ValidationError(
                f"explicit initial samples must have length n={n}, "
                f"got {u0.shape} and {v0.shape}"
            )
    if not (np.all(u0 > 0.0) and np.all(v0 > 0.0)):
        raise DomainError("initial data must be strictly positive at every cell")
    return DiscretizedProblem(
        config=config,
        x=x,
        dx=dx,
        breakpoint=breakpoint,
        coef_u=coef_u,
        coef_v=coef_v,
        u0=u0.astype(float),
        v0=v0.astype(float),
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class PdeSeries:
    """Solution snapshots of one run, on the problem's grid."""

    x: np.ndarray
    times: np.ndarray
    u: np.ndarray  # shape (len(times), n)
    v: np.ndarray
    event: TerminalEvent
    failure_cell: int | None = None


def integrate_pde(
    problem: DiscretizedProblem,
    t_end: float | None = None,
    tol: float | None = None,
    snapshot_dt: float | None = None,
) -> PdeSeries:
    """Run the method-of-lines integration, recording periodic snapshots.

    Time stepping is the adaptive Dormand-Prince pair capped by the
    diffusive stability ceiling ``0.4*dx^2/D`` where ``D`` is the largest
    current effective diffusivity (``delta*max(w)`` for the nonlinear
    kind).  Step collapse ends the run with a step-failure event carrying
    the offending cell index; the partial series is still returned.
    """
    cfg = problem.config
    t_end = cfg.t_end if t_end is None else t_end
    tol = cfg.tol if tol is None else tol
    snapshot_dt = cfg.snapshot_dt if snapshot_dt is None else snapshot_dt
    if not 1e-12 <= tol <= 1e-3:
        raise DomainError(f"tol must lie in [1e-12, 1e-3], got {tol!r}")
    n = cfg.n
    y = np.concatenate([problem.u0, problem.v0]).astype(float)
    inv_dx2 = 1.0 / (problem.dx * problem.dx)
    n_windows = max(1, int(math.ceil(t_end / snapshot_dt - 1e-12)))
    snap_times = [min(k * snapshot_dt, t_end) for k in range(1, n_windows + 1)]
    if snap_times[-1] < t_end:
        snap_times.append(t_end)

    times = [0.0]
    us = [y[:n].copy()]
    vs = [y[n:].copy()]
    event = TerminalEvent.T_END
    failure_cell: int | None = None
    t = 0.0
    dt = min(1e-6, t_end)
    dt_min = 1e-13 * max(1.0, t_end)
    nonlinear = cfg.kind == "nonlinear"
    for t_target in snap_times:
        status, t, dt, cell = _kernels.advance_window(
            y, t, t_target, dt, n, inv_dx2, problem.dx * problem.dx,
            cfg.delta1, cfg.delta2, problem.coef_u, problem.coef_v,
            nonlinear, cfg.divergence_form, tol, dt_min,
        )
        times.append(t)
        us.append(y[:n].copy())
        vs.append(y[n:].copy())
        if status != 0:
            event = TerminalEvent.STEP_FAILURE
            failure_cell = int(cell)
            break
    return PdeSeries(
        x=problem.x,
        times=np.asarray(times),
        u=np.vstack(us),
        v=np.vstack(vs),
        event=event,
        failure_cell=failure_cell,
    )


@dataclass(frozen=True)
class PdeFunctionals:
    """Monitoring functionals extracted from a solution series.

    ``gronwall`` is the residual ``d/dt(log-mass of u) + int(s1*h*u)
    - int(s1*(1-e))``, with the log-mass rate evaluated exactly through
    the semi-discrete system (chain rule per cell).  For the nonlinear
    dispersal kind the diffusion contribution telescopes to zero under
    the mirror-ghost boundary, leaving ``int s1*(u/(m+u) - 1) <= 0``; for
    the linear kind the sign guarantee does not apply and the column is a
    plain diagnostic.  ``bound_u`` and ``bound_v`` are the logistic
    comparison ceilings ``max(initial sup, sup (1-e)/h)`` per component.
    """

    times: np.ndarray
    min_u: np.ndarray
    max_u: np.ndarray
    min_v: np.ndarray
    max_v: np.ndarray
    mass_u: np.ndarray
    mass_v: np.ndarray
    logmass_u: np.ndarray
    gronwall: np.ndarray
    bound_u: float
    bound_v: float


def _mirror_laplacian(fields: np.ndarray, dx: float) -> np.ndarray:
    """Row-wise central second difference with mirror ghost cells."""
    padded = np.pad(fields, ((0, 0), (1, 1)), mode="edge")
    return (padded[:, :-2] - 2.0 * fields + padded[:, 2:]) / (dx * dx)


def pde_functionals(series: PdeSeries, problem: DiscretizedProblem) -> PdeFunctionals:
    """Per-snapshot extrema, masses, log-mass and the Gronwall residual.

    Raises:
        DomainError: if the log-mass is requested on a snapshot with a
            nonpositive cell value.
    """
    dx = problem.dx
    cfg = problem.config
    if np.any(series.u <= 0.0):
        raise DomainError("log-mass functional undefined: u has a nonpositive cell value")
    mass_u = series.u.sum(axis=1) * dx
    mass_v = series.v.sum(axis=1) * dx
    logmass_u = np.log(series.u).sum(axis=1) * dx
    s1 = problem.coef_u[3]
    h_u = problem.coef_u[2]
    e_u = problem.coef_u[1]
    m_u = problem.coef_u[0]
    damping = (series.u * (s1 * h_u)).sum(axis=1) * dx
    supply = float(np.sum(s1 * (1.0 - e_u)) * dx)
    # d/dt of the discrete log-mass: per-capita rate summed over cells.
    lap = _mirror_laplacian(series.u, dx)
    if cfg.kind == "nonlinear":
        diffusion_rate = cfg.delta1 * lap
    else:
        diffusion_rate = cfg.delta1 * lap / series.u
    reaction_rate = s1 * (series.u / (m_u + series.u) - e_u - h_u * series.u)
    logmass_rate = (diffusion_rate + reaction_rate).sum(axis=1) * dx
    gronwall = logmass_rate + damping - supply

    e_h_u = np.max((1.0 - e_u) / h_u)
    e_v = problem.coef_v[1]
    h_v = problem.coef_v[2]
    e_h_v = np.max((1.0 - e_v) / h_v)
    return PdeFunctionals(
        times=series.times,
        min_u=series.u.min(axis=1),
        max_u=series.u.max(axis=1),
        min_v=series.v.min(axis=1),
        max_v=series.v.max(axis=1),
        mass_u=mass_u,
        mass_v=mass_v,
        logmass_u=logmass_u,
        gronwall=gronwall,
        bound_u=max(float(problem.u0.max()), float(e_h_u)),
        bound_v=max(float(problem.v0.max()), float(e_h_v)),
    )
