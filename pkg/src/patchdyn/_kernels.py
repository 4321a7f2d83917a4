"""Compiled inner loops for the method-of-lines solver.

Everything here operates on the packed state vector ``y = [u, v]`` of
length ``2n``.  The functions are compiled with numba when available and
run as plain Python otherwise (slow but identical arithmetic, since the
loop order is the same).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def deco(fn):
            return fn

        return deco

# Stability ceiling: dt <= CFL_SAFETY * dx^2 / effective_diffusivity.
CFL_SAFETY = 0.4

# Dormand-Prince 5(4) tableau.
_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    ]
)
_B = np.array([35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0])
_E = np.array(
    [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ]
)


@njit(cache=True)
def pde_rhs(
    y: np.ndarray,
    out: np.ndarray,
    n: int,
    inv_dx2: float,
    delta1: float,
    delta2: float,
    coef_u: np.ndarray,
    coef_v: np.ndarray,
    nonlinear: bool,
    divergence_form: bool,
) -> None:
    """Semi-discrete right-hand side with mirror-ghost Neumann boundaries.

    ``coef_u``/``coef_v`` are ``(4, n)`` arrays holding the per-cell
    reaction coefficients ``(m, e, h, s)`` of each component's equation.
    The Allee ratio ``w/(m+w)`` is evaluated as zero when ``m + w`` is
    zero (it only occurs at ``w = 0``, where the whole reaction vanishes).
    """
    for comp in range(2):
        base = comp * n
        delta = delta1 if comp == 0 else delta2
        coef = coef_u if comp == 0 else coef_v
        for i in range(n):
            w = y[base + i]
            w_left = y[base + i - 1] if i > 0 else y[base]
            w_right = y[base + i + 1] if i < n - 1 else y[base + n - 1]
            if nonlinear:
                if divergence_form:
                    flux_left = 0.0
                    flux_right = 0.0
                    if i > 0:
                        flux_left = 0.5 * (w_left + w) * (w - w_left)
                    if i < n - 1:
                        flux_right = 0.5 * (w + w_right) * (w_right - w)
                    diffusion = delta * (flux_right - flux_left) * inv_dx2
                else:
                    diffusion = delta * w * (w_left - 2.0 * w + w_right) * inv_dx2
            else:
                diffusion = delta * (w_left - 2.0 * w + w_right) * inv_dx2
            m = coef[0, i]
            denom = m + w
            allee = w / denom if denom > 0.0 else 0.0
            reaction = coef[3, i] * w * (allee - coef[1, i] - coef[2, i] * w)
            out[base + i] = diffusion + reaction


@njit(cache=True)
def advance_window(
    y: np.ndarray,
    t: float,
    t_target: float,
    dt: float,
    n: int,
    inv_dx2: float,
    dx2: float,
    delta1: float,
    delta2: float,
    coef_u: np.ndarray,
    coef_v: np.ndarray,
    nonlinear: bool,
    divergence_form: bool,
    tol: float,
    dt_min: float,
) -> tuple[int, float, float, int]:
    """Advance ``y`` in place from ``t`` to ``t_target``.

    Adaptive Dormand-Prince steps, capped by the diffusive stability
    ceiling (state-dependent for the nonlinear dispersal kind) and
    rejected whenever a component would drop below ``-1e-12``.

    Returns ``(status, t, dt, cell)`` with status 0 on success and 1 on
    step-size collapse, in which case ``cell`` is the offending index
    into the packed state.
    """
    size = 2 * n
    k = np.empty((7, size))
    y_stage = np.empty(size)
    y_new = np.empty(size)
    pde_rhs(y, k[0], n, inv_dx2, delta1, delta2, coef_u, coef_v, nonlinear, divergence_form)

    while t < t_target:
        # Stability ceiling on top of the error controller.
        if nonlinear:
            umax = 0.0
            vmax = 0.0
            for i in range(n):
                if y[i] > umax:
                    umax = y[i]
                if y[n + i] > vmax:
                    vmax = y[n + i]
            diffusivity = max(delta1 * umax, delta2 * vmax)
        else:
            diffusivity = max(delta1, delta2)
        if diffusivity > 0.0:
            ceiling = CFL_SAFETY * dx2 / diffusivity
            if dt > ceiling:
                dt = ceiling
        if dt > t_target - t:
            dt = t_target - t

        for stage in range(1, 7):
            if stage < 6:
                for j in range(size):
                    acc = 0.0
                    for prev in range(stage):
                        aij = _A[stage, prev]
                        if aij != 0.0:
                            acc += aij * k[prev, j]
                    y_stage[j] = y[j] + dt * acc
                pde_rhs(
                    y_stage, k[stage], n, inv_dx2, delta1, delta2,
                    coef_u, coef_v, nonlinear, divergence_form,
                )
            else:
                for j in range(size):
                    acc = 0.0
                    for prev in range(6):
                        bj = _B[prev]
                        if bj != 0.0:
                            acc += bj * k[prev, j]
                    y_new[j] = y[j] + dt * acc

        bad_cell = -1
        for j in range(size):
            if y_new[j] < -1e-12:
                bad_cell = j
                break
        if bad_cell >= 0:
            dt *= 0.5
            if dt < dt_min:
                return 1, t, dt, bad_cell
            continue

        pde_rhs(y_new, k[6], n, inv_dx2, delta1, delta2, coef_u, coef_v, nonlinear, divergence_form)
        err_sq = 0.0
        worst = 0
        worst_ratio = 0.0
        for j in range(size):
            e_acc = 0.0
            for prev in range(7):
                ej = _E[prev]
                if ej != 0.0:
                    e_acc += ej * k[prev, j]
            e_acc *= dt
            y_abs = abs(y[j])
            y_new_abs = abs(y_new[j])
            scale = tol + tol * (y_abs if y_abs > y_new_abs else y_new_abs)
            ratio = abs(e_acc) / scale
            err_sq += ratio * ratio
            if ratio > worst_ratio:
                worst_ratio = ratio
                worst = j
        err = np.sqrt(err_sq / size)

        if err <= 1.0:
            t += dt
            for j in range(size):
                y[j] = y_new[j]
                k[0, j] = k[6, j]
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        dt *= factor
        if dt < dt_min and t < t_target:
            return 1, t, dt, worst
    return 0, t, dt, -1
