"""Adaptive trajectory integration, phase portraits and basin maps.

The integrator is an explicit Dormand-Prince 5(4) pair specialised to the
two-density state, with three behaviours the analysis relies on: proposed
steps that would push a density below ``-1e-12`` are rejected and halved
(never clamped, which would corrupt the dynamics near the invariant axes),
integration stops early once the vector field is numerically zero at a
known equilibrium, and step-size collapse is reported as an explicit
terminal event instead of silently returning garbage.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .equilibria import (
    Equilibrium,
    boundary_equilibria,
    linear_equilibria,
    positive_equilibria,
)
from .errors import DomainError, NumericError
from .params import OdeParams

__all__ = [
    "TerminalEvent",
    "Trajectory",
    "GridSpec",
    "PortraitData",
    "BasinMap",
    "integrate_ode",
    "phase_portrait",
    "basin_map",
    "known_equilibria",
]

_RHS_ZERO_TOL = 1e-12
_EQ_PROXIMITY_TOL = 1e-8
_NEGATIVITY_FLOOR = -1e-12

# Dormand-Prince 5(4) tableau (seven stages, first-same-as-last).
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)


class TerminalEvent(str, Enum):
    T_END = "t-end"
    CONVERGED = "converged"
    STEP_FAILURE = "step-failure"


@dataclass(frozen=True)
class Trajectory:
    """Time-stamped solution of one of the two ODE models."""

    model: str
    times: np.ndarray
    states: np.ndarray
    event: TerminalEvent
    target: Equilibrium | None = None

    @property
    def u(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def v(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def final_state(self) -> tuple[float, float]:
        return float(self.states[-1, 0]), float(self.states[-1, 1])


def _make_rhs(model: str, p: OdeParams) -> Callable[[float, float], tuple[float, float]]:
    m, e, h, delta, s = p.m, p.e, p.h, p.delta, p.s
    if model == "nonlinear":
        def f(u: float, v: float) -> tuple[float, float]:
            return (
                u * (u / (m + u) - e - h * u) + delta * u * (v - u),
                s * v * (1.0 - v) + delta * v * (u - v),
            )
    elif model == "linear":
        def f(u: float, v: float) -> tuple[float, float]:
            return (
                u * (u / (m + u) - e - h * u) + delta * (v - u),
                s * v * (1.0 - v) + delta * (u - v),
            )
    else:
        raise DomainError(f"unknown model {model!r}; expected 'nonlinear' or 'linear'")
    return f


def known_equilibria(model: str, p: OdeParams) -> tuple[Equilibrium, ...]:
    """All equilibria of the requested model, used as convergence targets."""
    if model == "nonlinear":
        return tuple(boundary_equilibria(p) + positive_equilibria(p))
    if model == "linear":
        try:
            return linear_equilibria(p).equilibria
        except NumericError:
            return ()
    raise DomainError(f"unknown model {model!r}; expected 'nonlinear' or 'linear'")


def integrate_ode(
    model: str,
    p: OdeParams,
    x0: tuple[float, float],
    t_end: float = 2000.0,
    tol: float = 1e-8,
    equilibria: tuple[Equilibrium, ...] | None = None,
    record: bool = True,
) -> Trajectory:
    """Integrate from ``x0`` to ``t_end`` with local error controlled by ``tol``.

    ``tol`` acts as both absolute and relative per-step tolerance and must
    lie in ``[1e-12, 1e-3]``.  The run terminates early once the vector
    field's sup-norm falls below ``1e-12`` within ``1e-8`` of a known
    equilibrium (pass ``equilibria`` to reuse precomputed ones).  With
    ``record=False`` only the first and last states are kept.
    """
    u0, v0 = x0
    if not (u0 >= 0.0 and v0 >= 0.0):
        raise DomainError(f"initial state must be componentwise nonnegative, got {x0!r}")
    if not 1e-12 <= tol <= 1e-3:
        raise DomainError(f"tol must lie in [1e-12, 1e-3], got {tol!r}")
    if not t_end > 0.0:
        raise DomainError(f"t_end must be positive, got {t_end!r}")
    f = _make_rhs(model, p)
    if equilibria is None:
        equilibria = known_equilibria(model, p)
    targets = [(eq.u, eq.v, eq) for eq in equilibria]

    atol = rtol = tol
    dt_min = 1e-13 * max(1.0, t_end)
    t, u, v = 0.0, float(u0), float(v0)
    times = [t]
    states = [(u, v)]
    k1u, k1v = f(u, v)
    dt = min(1e-2, t_end)
    event = TerminalEvent.T_END
    target: Equilibrium | None = None

    while t < t_end:
        dt = min(dt, t_end - t)
        # Stages 2..7 (stage 7 doubles as the error stage and the next k1).
        k2u, k2v = f(u + dt * _A21 * k1u, v + dt * _A21 * k1v)
        k3u, k3v = f(u + dt * (_A31 * k1u + _A32 * k2u), v + dt * (_A31 * k1v + _A32 * k2v))
        k4u, k4v = f(
            u + dt * (_A41 * k1u + _A42 * k2u + _A43 * k3u),
            v + dt * (_A41 * k1v + _A42 * k2v + _A43 * k3v),
        )
        k5u, k5v = f(
            u + dt * (_A51 * k1u + _A52 * k2u + _A53 * k3u + _A54 * k4u),
            v + dt * (_A51 * k1v + _A52 * k2v + _A53 * k3v + _A54 * k4v),
        )
        k6u, k6v = f(
            u + dt * (_A61 * k1u + _A62 * k2u + _A63 * k3u + _A64 * k4u + _A65 * k5u),
            v + dt * (_A61 * k1v + _A62 * k2v + _A63 * k3v + _A64 * k4v + _A65 * k5v),
        )
        u_new = u + dt * (_B1 * k1u + _B3 * k3u + _B4 * k4u + _B5 * k5u + _B6 * k6u)
        v_new = v + dt * (_B1 * k1v + _B3 * k3v + _B4 * k4v + _B5 * k5v + _B6 * k6v)

        if u_new < _NEGATIVITY_FLOOR or v_new < _NEGATIVITY_FLOOR:
            dt *= 0.5
            if dt < dt_min:
                event = TerminalEvent.STEP_FAILURE
                break
            continue

        k7u, k7v = f(u_new, v_new)
        err_u = dt * (_E1 * k1u + _E3 * k3u + _E4 * k4u + _E5 * k5u + _E6 * k6u + _E7 * k7u)
        err_v = dt * (_E1 * k1v + _E3 * k3v + _E4 * k4v + _E5 * k5v + _E6 * k6v + _E7 * k7v)
        scale_u = atol + rtol * max(abs(u), abs(u_new))
        scale_v = atol + rtol * max(abs(v), abs(v_new))
        err = math.sqrt(0.5 * ((err_u / scale_u) ** 2 + (err_v / scale_v) ** 2))

        if err <= 1.0:
            t += dt
            u, v = u_new, v_new
            k1u, k1v = k7u, k7v
            if record:
                times.append(t)
                states.append((u, v))
            if max(abs(k7u), abs(k7v)) < _RHS_ZERO_TOL:
                for eu, ev, eq in targets:
                    if max(abs(u - eu), abs(v - ev)) < _EQ_PROXIMITY_TOL:
                        event = TerminalEvent.CONVERGED
                        target = eq
                        break
                if event is TerminalEvent.CONVERGED:
                    break
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        dt *= factor
        if dt < dt_min and t < t_end:
            event = TerminalEvent.STEP_FAILURE
            break

    if not record or times[-1] != t:
        times.append(t)
        states.append((u, v))
    return Trajectory(
        model=model,
        times=np.asarray(times),
        states=np.asarray(states),
        event=event,
        target=target,
    )


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling grid in the ``(u, v)`` plane."""

    u_min: float
    u_max: float
    v_min: float
    v_max: float
    nu: int
    nv: int

    def __post_init__(self) -> None:
        if not (self.u_max > self.u_min >= 0.0 and self.v_max > self.v_min >= 0.0):
            raise DomainError(f"grid extents must be positive and nonnegative: {self!r}")
        if self.nu < 2 or self.nv < 2:
            raise DomainError(f"grid counts must be >= 2: {self!r}")

    def u_values(self) -> np.ndarray:
        return np.linspace(self.u_min, self.u_max, self.nu)

    def v_values(self) -> np.ndarray:
        return np.linspace(self.v_min, self.v_max, self.nv)


@dataclass(frozen=True)
class PortraitData:
    """Vector-field samples plus representative trajectories and equilibria."""

    params: OdeParams
    model: str
    grid: GridSpec
    field_u: np.ndarray
    field_v: np.ndarray
    field_fu: np.ndarray
    field_fv: np.ndarray
    trajectories: tuple[Trajectory, ...]
    equilibria: tuple[Equilibrium, ...]


def _portrait_seeds(grid: GridSpec, equilibria: tuple[Equilibrium, ...]) -> list[tuple[float, float]]:
    """Deterministic seed set: 16 boundary points + 4 near each repellor."""
    seeds: list[tuple[float, float]] = []
    du = grid.u_max - grid.u_min
    dv = grid.v_max - grid.v_min
    perimeter = 2.0 * (du + dv)
    for i in range(16):
        dist = perimeter * i / 16.0
        if dist < du:
            seeds.append((grid.u_min + dist, grid.v_min))
        elif dist < du + dv:
            seeds.append((grid.u_max, grid.v_min + (dist - du)))
        elif dist < 2.0 * du + dv:
            seeds.append((grid.u_max - (dist - du - dv), grid.v_max))
        else:
            seeds.append((grid.u_min, grid.v_max - (dist - 2.0 * du - dv)))
    eps = 0.02 * max(du, dv)
    floor = 0.05 * eps  # keep auto seeds strictly inside the open quadrant
    for eq in equilibria:
        if eq.stability.attracting:
            continue
        for su, sv in ((eps, eps), (eps, -eps), (-eps, eps), (-eps, -eps)):
            seeds.append((max(eq.u + su, floor), max(eq.v + sv, floor)))
    return seeds


def phase_portrait(
    p: OdeParams,
    grid: GridSpec,
    model: str = "nonlinear",
    t_end: float = 500.0,
    tol: float = 1e-8,
) -> PortraitData:
    """Sample the vector field on the grid and integrate a deterministic seed set."""
    f = _make_rhs(model, p)
    eqs = known_equilibria(model, p)
    us = grid.u_values()
    vs = grid.v_values()
    field_u, field_v = np.meshgrid(us, vs, indexing="ij")
    field_fu = np.empty_like(field_u)
    field_fv = np.empty_like(field_v)
    for i in range(grid.nu):
        for j in range(grid.nv):
            fu, fv = f(field_u[i, j], field_v[i, j])
            field_fu[i, j] = fu
            field_fv[i, j] = fv
    trajectories = tuple(
        integrate_ode(model, p, seed, t_end=t_end, tol=tol, equilibria=eqs)
        for seed in _portrait_seeds(grid, eqs)
    )
    return PortraitData(
        params=p,
        model=model,
        grid=grid,
        field_u=field_u,
        field_v=field_v,
        field_fu=field_fu,
        field_fv=field_fv,
        trajectories=trajectories,
        equilibria=eqs,
    )


@dataclass(frozen=True)
class BasinMap:
    """Grid of attractor labels (equilibrium kind, or ``Unresolved``)."""

    params: OdeParams
    model: str
    grid: GridSpec
    labels: np.ndarray
    equilibria: tuple[Equilibrium, ...]

    UNRESOLVED = "Unresolved"


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("PATCHDYN_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def basin_map(
    p: OdeParams,
    grid: GridSpec,
    tol: float = 1e-4,
    t_end: float = 2000.0,
    model: str = "nonlinear",
    threads: int | None = None,
) -> BasinMap:
    """Label each grid node by the equilibrium its trajectory approaches.

    A node is labeled when its terminal state lies within ``tol``
    (sup-norm) of an equilibrium by the time horizon, otherwise it is
    marked unresolved.  Node integrations are independent; ``threads``
    (default: the ``PATCHDYN_THREADS`` environment variable) caps the
    worker pool.
    """
    eqs = known_equilibria(model, p)
    rk_tol = max(1e-12, min(1e-6, 1e-2 * tol))
    us = grid.u_values()
    vs = grid.v_values()

    def _label(node: tuple[float, float]) -> str:
        traj = integrate_ode(model, p, node, t_end=t_end, tol=rk_tol, equilibria=eqs, record=False)
        fu, fv = traj.final_state
        best: tuple[float, Equilibrium] | None = None
        for eq in eqs:
            dist = max(abs(fu - eq.u), abs(fv - eq.v))
            if best is None or dist < best[0]:
                best = (dist, eq)
        if best is not None and best[0] < tol:
            return best[1].kind.value
        return BasinMap.UNRESOLVED

    nodes = [(float(u), float(v)) for u in us for v in vs]
    n_workers = _thread_count(threads)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            flat = list(pool.map(_label, nodes))
    else:
        flat = [_label(node) for node in nodes]
    labels = np.array(flat, dtype=object).reshape(grid.nu, grid.nv)
    return BasinMap(params=p, model=model, grid=grid, labels=labels, equilibria=eqs)
