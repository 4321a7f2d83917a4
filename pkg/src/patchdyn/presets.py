"""Bundled scenarios reproducing the published simulation setups.

Every preset pins all values the source material leaves implicit (initial
conditions, horizons, coefficient profiles), so reproduction claims are
auditable: what you see in the scenario dict is exactly what runs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equilibria import derived_thresholds
from .params import OdeParams

__all__ = ["Preset", "PRESETS", "get_preset"]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    scenario: dict


def _ode(m: float, e: float, h: float = 0.9, delta: float = 0.1, s: float = 0.9) -> dict:
    return {"m": m, "e": e, "h": h, "delta": delta, "s": s}


_BASE = OdeParams(m=0.5, e=0.1, h=0.9, delta=0.1, s=0.9)
_TD = derived_thresholds(_BASE)
_B = _TD.B  # 0.09 for the base set
_M0 = _TD.m0
_MSTAR = _TD.mstar
_M_EQ = 1.0 / (_BASE.h + _B)

_PORTRAIT_GRID = {"u_min": 0.0, "u_max": 1.5, "v_min": 0.0, "v_max": 1.5, "nu": 15, "nv": 15}


def _portrait(name: str, desc: str, params: dict) -> Preset:
    return Preset(
        name=name,
        description=desc,
        scenario={
            "command": "portrait",
            "model": "nonlinear",
            "params": params,
            "grid": dict(_PORTRAIT_GRID),
            "t_end": 500.0,
            "tol": 1e-8,
        },
    )


def _ode_family(
    name: str,
    desc: str,
    model: str,
    runs: list[dict],
    t_end: float,
) -> Preset:
    return Preset(
        name=name,
        description=desc,
        scenario={
            "command": "simulate-ode",
            "model": model,
            "runs": runs,
            "t_end": t_end,
            "tol": 1e-8,
        },
    )


def _pde(name: str, desc: str, config: dict) -> Preset:
    return Preset(name=name, description=desc, scenario={"command": "simulate-pde", "config": config})


_TWO_PATCH_DEFAULT = {"two_patch": {"m": 0.7, "e": 0.04, "h": 0.9, "s": 0.9}}

_ALL = [
    _portrait("fig1a", "regime (a): e < B, single interior attractor", _ode(2.0, 0.05)),
    _portrait("fig1b", "regime (b): e = B, m above 1/(h+B)", _ode(1.5, _B)),
    _portrait("fig1c", "regime (c): e = B, m at 1/(h+B)", _ode(_M_EQ, _B)),
    _portrait("fig1d", "regime (d): e = B, m below 1/(h+B)", _ode(0.5, _B)),
    _portrait("fig1e", "regime (e): B < e < 1, m below the axis fold", _ode(0.3, 0.1)),
    _portrait("fig1f", "regime (f): B < e < 1, m at the axis fold", _ode(_M0, 0.1)),
    _portrait("fig1g", "regime (g): bistable window between the folds", _ode(0.5, 0.1)),
    _portrait("fig1h", "regime (h): m at the interior fold", _ode(_MSTAR, 0.1)),
    _portrait("fig1i", "regime (i): m above the interior fold, extinction in patch 1", _ode(0.9, 0.1)),
    Preset(
        name="fig2",
        description="fold diagram over the Allee constant (e=0.1, delta=0.1, s=h=0.9)",
        scenario={
            "command": "sweep",
            "params": _ode(0.5, 0.1),
            "m_lo": 0.05,
            "m_hi": 1.0,
            "steps": 200,
            "include_boundary": False,
        },
    ),
    _ode_family(
        "fig3",
        "patch-1 density over time for increasing nonlinear dispersal "
        "(m=0.7, e=0.04, h=s=0.9); starts below the isolated Allee threshold",
        "nonlinear",
        [
            {"label": f"delta-{d}", "params": _ode(0.7, 0.04, delta=d), "x0": [0.1, 0.1]}
            for d in (1e-06, 0.005, 0.05, 0.2)
        ],
        t_end=500.0,
    ),
    _ode_family(
        "fig4",
        "patch-1 density over time for increasing Allee constant at fixed "
        "dispersal (delta=0.1, e=0.04, h=s=0.9)",
        "nonlinear",
        [
            {"label": f"m-{m}", "params": _ode(m, 0.04), "x0": [0.5, 0.5]}
            for m in (0.5, 1.0, 2.0, 4.0)
        ],
        t_end=500.0,
    ),
    _ode_family(
        "fig5",
        "linear-dispersal model under a large Allee constant (m=2, e=2, h=s=1): "
        "extinction once dispersal exceeds e*s/(e-s)=2",
        "linear",
        [
            {
                "label": f"delta-{d}",
                "params": {"m": 2.0, "e": 2.0, "h": 1.0, "delta": d, "s": 1.0, "relaxed": True},
                "x0": [0.5, 0.5],
            }
            for d in (0.5, 1.0, 2.5, 4.0)
        ],
        t_end=500.0,
    ),
    _pde(
        "fig-lin-quadratic",
        "linear dispersal, small rates (0.4, 0.004), quadratic initial data",
        {
            "kind": "linear",
            "delta1": 0.4,
            "delta2": 0.004,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "quadratic",
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-lin-gauss-1.8",
        "linear dispersal, small rates, twin Gaussian data centered at 1.8 and 0.4",
        {
            "kind": "linear",
            "delta1": 0.4,
            "delta2": 0.004,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "gauss-1.8",
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-lin-gauss-1.9",
        "linear dispersal, small rates, twin Gaussian data centered at 1.9 and 0.4",
        {
            "kind": "linear",
            "delta1": 0.4,
            "delta2": 0.004,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "gauss-1.9",
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-lin-gauss-1.9-scaled",
        "linear dispersal, small rates, Gaussian data with the 0.4-peak scaled to 0.65",
        {
            "kind": "linear",
            "delta1": 0.4,
            "delta2": 0.004,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "gauss-1.9-scaled",
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-lin-quadratic-third",
        "linear dispersal with the Allee patch shrunk to a third of the domain",
        {
            "kind": "linear",
            "delta1": 0.4,
            "delta2": 0.004,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "quadratic",
            "L1": 1.0471975511965976,  # pi/3
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-nonlin-flat",
        "nonlinear dispersal, large rates (2, 3), flat initial data (5, 5)",
        {
            "kind": "nonlinear",
            "delta1": 2.0,
            "delta2": 3.0,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "flat5",
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-nonlin-gauss",
        "nonlinear dispersal, large rates, floored twin-Gaussian initial data",
        {
            "kind": "nonlinear",
            "delta1": 2.0,
            "delta2": 3.0,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "gauss-1.9-floor",
            "t_end": 50.0,
        },
    ),
    _pde(
        "fig-nonlin-flat-third",
        "nonlinear dispersal with the Allee patch shrunk to a third of the domain",
        {
            "kind": "nonlinear",
            "delta1": 2.0,
            "delta2": 3.0,
            "profile": dict(_TWO_PATCH_DEFAULT),
            "initial": "flat5",
            "L1": 1.0471975511965976,
            "t_end": 50.0,
        },
    ),
    _pde(
        "pde-lin-extinction",
        "linear dispersal with a large Allee constant and strong mixing: "
        "the logistic patch cannot rescue the population",
        {
            "kind": "linear",
            "delta1": 5.0,
            "delta2": 5.0,
            "profile": {"two_patch": {"m": 2.0, "e": 2.0, "h": 1.0, "s": 1.0}},
            "initial": "quadratic",
            "t_end": 60.0,
            "snapshot_dt": 0.5,
        },
    ),
    _pde(
        "pde-ode-reduction-linear",
        "constant coefficients and flat data: the linear-dispersal solution "
        "stays flat and tracks the pointwise reaction ODE",
        {
            "kind": "linear",
            "delta1": 0.4,
            "delta2": 0.004,
            "profile": {"constant": {"m": 0.7, "e": 0.04, "h": 0.9, "s": 0.9}},
            "initial": "flat5",
            "t_end": 50.0,
        },
    ),
    _pde(
        "pde-ode-reduction-nonlinear",
        "constant coefficients and flat data for the nonlinear dispersal kind",
        {
            "kind": "nonlinear",
            "delta1": 0.1,
            "delta2": 0.1,
            "profile": {"constant": {"m": 0.7, "e": 0.04, "h": 0.9, "s": 0.9}},
            "initial": "flat5",
            "t_end": 50.0,
        },
    ),
]

PRESETS: dict[str, Preset] = {p.name: p for p in _ALL}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; run 'patchdyn presets list' to see the catalog"
        ) from None
