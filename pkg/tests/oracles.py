"""Independent numerical oracles shared by the test modules.

Everything here deliberately avoids the library's closed-form paths: roots
come from bisection scans and Newton iterations with finite-difference
Jacobians, derivatives from central differences, and reference solutions
from a fixed-step classical Runge-Kutta integrator.  The oracles only
consume the model right-hand sides (which are the defining equations).
"""

from __future__ import annotations

import numpy as np

from patchdyn import OdeParams, rhs_linear, rhs_nonlinear


def fd_jacobian(f, x, step=1e-6):
    """Central finite-difference Jacobian of a 2-D vector field."""
    u, v = x
    fu_p = f((u + step, v))
    fu_m = f((u - step, v))
    fv_p = f((u, v + step))
    fv_m = f((u, v - step))
    return np.array(
        [
            [(fu_p[0] - fu_m[0]) / (2 * step), (fv_p[0] - fv_m[0]) / (2 * step)],
            [(fu_p[1] - fu_m[1]) / (2 * step), (fv_p[1] - fv_m[1]) / (2 * step)],
        ]
    )


def newton_2d(f, x0, tol=1e-13, itmax=60):
    """Newton iteration with finite-difference Jacobian; returns the root."""
    x = np.array(x0, dtype=float)
    for _ in range(itmax):
        residual = np.array(f((x[0], x[1])))
        if np.max(np.abs(residual)) < tol:
            break
        jac = fd_jacobian(f, (x[0], x[1]))
        x = x - np.linalg.solve(jac, residual)
    return x


def interior_line_v(p: OdeParams, u):
    """The zero set of the patch-2 equation at positive density."""
    return (p.s + p.delta * u) / (p.s + p.delta)


def _scan_sign_changes(per_capita, u_max, n):
    """Grid scan for sign changes of a scalar function on (0, u_max].

    The grid is geometric near zero (tiny roots occur when the interior
    saddle sits close to the origin) and uniform elsewhere.
    """
    grid = np.concatenate([
        np.geomspace(1e-10, 0.01, 300, endpoint=False),
        np.linspace(0.01, u_max, n + 1),
    ])
    values = per_capita(grid)
    exact = grid[values == 0.0]
    crossings = np.flatnonzero(values[:-1] * values[1:] < 0.0)
    roots = list(exact)
    for i in crossings:
        a, b = grid[i], grid[i + 1]
        fa = values[i]
        for _ in range(80):
            mid = 0.5 * (a + b)
            fm = per_capita(mid)
            if fa * fm <= 0.0:
                b = mid
            else:
                a, fa = mid, fm
            if b - a < 1e-14 * max(1.0, b):
                break
        roots.append(0.5 * (a + b))
    return sorted(roots)


def scan_positive_roots(p: OdeParams, u_max=10.0, n=4000):
    """All interior equilibria of the nonlinear model in (0, u_max]^2.

    For v > 0 the patch-2 equation forces v onto the logistic line, so an
    exhaustive scan reduces to sign changes of the patch-1 per-capita rate
    along that line, refined by bisection.
    """

    def per_capita(u):
        v = interior_line_v(p, u)
        return u / (p.m + u) - p.e - p.h * u + p.delta * (v - u)

    roots = _scan_sign_changes(per_capita, u_max, n)
    return [(u, interior_line_v(p, u)) for u in roots if interior_line_v(p, u) <= u_max]


def scan_axis_roots(p: OdeParams, u_max=10.0, n=4000):
    """All equilibria on the positive u-axis, by per-capita sign scan."""

    def per_capita(u):
        return u / (p.m + u) - p.e - (p.h + p.delta) * u

    return _scan_sign_changes(per_capita, u_max, n)


def rk4(f, x0, t_end, dt):
    """Fixed-step classical Runge-Kutta reference integration."""
    x = np.array(x0, dtype=float)
    steps = int(round(t_end / dt))
    for _ in range(steps):
        k1 = np.array(f(tuple(x)))
        k2 = np.array(f(tuple(x + 0.5 * dt * k1)))
        k3 = np.array(f(tuple(x + 0.5 * dt * k2)))
        k4 = np.array(f(tuple(x + dt * k3)))
        x = x + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
    return x


def sample_strict_params(rng: np.random.Generator) -> OdeParams:
    return OdeParams(
        m=rng.uniform(0.02, 3.0),
        e=rng.uniform(0.02, 0.95),
        h=rng.uniform(0.05, 2.5),
        delta=rng.uniform(0.01, 2.5),
        s=rng.uniform(0.05, 2.5),
    )


def sample_rescue_params(rng: np.random.Generator) -> OdeParams:
    """Parameters with e < B, the regime where the interior state is global."""
    while True:
        s = rng.uniform(0.2, 2.5)
        delta = rng.uniform(0.05, 2.5)
        B = s * delta / (s + delta)
        if B <= 0.02:
            continue
        e = rng.uniform(0.2, 0.95) * min(B, 0.999)
        if e <= 0.0:
            continue
        return OdeParams(
            m=rng.uniform(0.02, 3.0),
            e=e,
            h=rng.uniform(0.05, 2.5),
            delta=delta,
            s=s,
        )


def sample_fold_params(rng: np.random.Generator) -> OdeParams:
    """Parameters with B < e < 1, where the interior fold mstar exists."""
    while True:
        s = rng.uniform(0.05, 2.5)
        delta = rng.uniform(0.01, 2.5)
        B = s * delta / (s + delta)
        if B >= 0.9:
            continue
        e = rng.uniform(B + 0.02, 0.98)
        return OdeParams(
            m=rng.uniform(0.02, 3.0),
            e=e,
            h=rng.uniform(0.05, 2.5),
            delta=delta,
            s=s,
        )


def rhs_fn(model: str, p: OdeParams):
    base = rhs_nonlinear if model == "nonlinear" else rhs_linear
    return lambda x: base(p, x)
