"""Command-line surface.

Subcommands map one-to-one onto the library's operations; every run prints
a JSON manifest on standard output echoing the fully resolved scenario, so
results can be reproduced exactly with ``--scenario``.  Exit status: 0 on
success, 2 on validation errors, 3 on numeric failures, 64 on usage
errors (unknown flags or presets).
"""

from __future__ import annotations

import argparse
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .bifurcation import abundance_sensitivity, sweep_allee
from .equilibria import (
    Equilibrium,
    derived_thresholds,
    linear_equilibria,
    regime_report,
)
from .errors import (
    DomainError,
    InternalConsistencyError,
    NumericError,
    PreconditionError,
    ValidationError,
)
from .io import dump_json, load_json, write_csv
from .model import rhs_linear, rhs_nonlinear
from .ode_sim import GridSpec, TerminalEvent, basin_map, integrate_ode, phase_portrait
from .params import OdeParams
from .pde import CoefficientProfile, PdeConfig, build_pde_problem, integrate_pde, pde_functionals
from .presets import PRESETS, get_preset

_USAGE_EXIT = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


_PARAM_KEYS = ("m", "e", "h", "delta", "s")
_PDE_CONFIG_KEYS = (
    "kind",
    "delta1",
    "delta2",
    "initial",
    "L",
    "L1",
    "profile_m",
    "profile_e",
    "profile_h",
    "profile_s",
)


def _build_parser() -> _Parser:
    parser = _Parser(prog="patchdyn", description=__doc__)
    parser.add_argument("--version", action="version", version=f"patchdyn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--preset", help="bundled scenario name")
    common.add_argument("--scenario", help="path to a scenario JSON file")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--gnuplot", action="store_true",
                        help="also write a gnuplot script next to CSV outputs")

    params = argparse.ArgumentParser(add_help=False)
    for key in _PARAM_KEYS:
        params.add_argument(f"--{key}", type=float)
    params.add_argument("--relaxed", action="store_true", default=None)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--u-min", type=float)
    grid.add_argument("--u-max", type=float)
    grid.add_argument("--v-min", type=float)
    grid.add_argument("--v-max", type=float)
    grid.add_argument("--nu", type=int)
    grid.add_argument("--nv", type=int)

    p = sub.add_parser("equilibria", parents=[common, params], help="equilibrium table")
    p.add_argument("--model", choices=("nonlinear", "linear"), default=None)

    sub.add_parser("regime", parents=[common, params], help="regime case and global verdict")

    p = sub.add_parser("sweep", parents=[common, params], help="bifurcation diagram over m")
    p.add_argument("--m-lo", type=float)
    p.add_argument("--m-hi", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--include-boundary", action="store_true", default=None)

    sub.add_parser("sensitivity", parents=[common, params], help="abundance response to m")

    p = sub.add_parser("simulate-ode", parents=[common, params], help="integrate trajectories")
    p.add_argument("--model", choices=("nonlinear", "linear"), default=None)
    p.add_argument("--x0", help="initial state as 'u,v'")
    p.add_argument("--t-end", type=float)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("basin", parents=[common, params, grid], help="basin-of-attraction map")
    p.add_argument("--model", choices=("nonlinear", "linear"), default=None)
    p.add_argument("--tol", type=float)
    p.add_argument("--t-end", type=float)

    p = sub.add_parser("portrait", parents=[common, params, grid], help="phase-portrait data")
    p.add_argument("--model", choices=("nonlinear", "linear"), default=None)
    p.add_argument("--t-end", type=float)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("simulate-pde", parents=[common], help="reaction-diffusion run")
    p.add_argument("--kind", choices=("linear", "nonlinear"))
    p.add_argument("--delta1", type=float)
    p.add_argument("--delta2", type=float)
    p.add_argument("--initial")
    p.add_argument("--L", type=float)
    p.add_argument("--L1", type=float)
    p.add_argument("--profile-m", type=float)
    p.add_argument("--profile-e", type=float)
    p.add_argument("--profile-h", type=float)
    p.add_argument("--profile-s", type=float)
    p.add_argument("--constant-profile", action="store_true", default=None)
    p.add_argument("--divergence-form", action="store_true", default=None)
    p.add_argument("--n", type=int)
    p.add_argument("--t-end", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--snapshot-dt", type=float)

    p = sub.add_parser("presets", parents=[], help="preset catalog")
    p.add_argument("action", choices=("list",))
    return parser


def _params_from_dict(d: dict) -> OdeParams:
    try:
        return OdeParams(
            m=float(d["m"]),
            e=float(d["e"]),
            h=float(d["h"]),
            delta=float(d["delta"]),
            s=float(d["s"]),
            relaxed=bool(d.get("relaxed", False)),
        )
    except KeyError as missing:
        raise ValidationError(f"scenario parameter block is missing {missing}") from None


def _params_to_dict(p: OdeParams) -> dict:
    out = {"m": p.m, "e": p.e, "h": p.h, "delta": p.delta, "s": p.s}
    if p.relaxed:
        out["relaxed"] = True
    return out


def _collect_param_flags(args: argparse.Namespace) -> dict | None:
    given = {k: getattr(args, k) for k in _PARAM_KEYS if getattr(args, k, None) is not None}
    if not given:
        return None
    missing = [k for k in _PARAM_KEYS if k not in given]
    if missing:
        raise ValidationError(f"incomplete parameter block: missing --{', --'.join(missing)}")
    if getattr(args, "relaxed", None):
        given["relaxed"] = True
    return given


def _base_scenario(args: argparse.Namespace) -> dict:
    """Resolve precedence between --preset, --scenario and explicit flags."""
    explicit_params = _collect_param_flags(args)
    explicit_pde = any(
        getattr(args, key, None) is not None for key in _PDE_CONFIG_KEYS
    ) or getattr(args, "constant_profile", None)
    source = None
    if getattr(args, "preset", None) and getattr(args, "scenario", None):
        raise ValidationError("--preset and --scenario are mutually exclusive")
    if getattr(args, "preset", None):
        if explicit_params is not None or explicit_pde:
            raise ValidationError(
                "--preset conflicts with explicit parameter/config flags; pick one"
            )
        try:
            source = dict(get_preset(args.preset).scenario)
        except KeyError as exc:
            raise _UsageError(exc.args[0]) from None
    elif getattr(args, "scenario", None):
        if explicit_params is not None or explicit_pde:
            raise ValidationError(
                "--scenario conflicts with explicit parameter/config flags; pick one"
            )
        source = dict(load_json(args.scenario))
    if source is not None:
        if source.get("command") != args.command:
            raise ValidationError(
                f"scenario command {source.get('command')!r} does not match "
                f"subcommand {args.command!r}"
            )
        return source
    scenario: dict = {"command": args.command}
    if explicit_params is not None:
        scenario["params"] = explicit_params
    return scenario


def _override(scenario: dict, args: argparse.Namespace, keys: dict[str, str]) -> None:
    for attr, name in keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            scenario[name] = value


def _require_params(scenario: dict) -> OdeParams:
    if "params" not in scenario:
        raise ValidationError("no parameters given: use --m/--e/--h/--delta/--s, "
                              "--preset or --scenario")
    return _params_from_dict(scenario["params"])


def _eig_row(eq: Equilibrium) -> tuple:
    lam1, lam2 = eq.eigenvalues
    return (
        eq.kind.value,
        eq.u,
        eq.v,
        eq.stability.value,
        lam1.real,
        lam1.imag,
        lam2.real,
        lam2.imag,
        eq.sector or "",
    )


_EQ_HEADER = ("kind", "u", "v", "stability", "lambda1_re", "lambda1_im",
              "lambda2_re", "lambda2_im", "sector")


def _write_table(path: Path, header: tuple, rows: list, fmt: str) -> Path:
    if fmt == "json":
        payload = {"columns": list(header), "rows": [list(r) for r in rows]}
        dump_json(payload, path.with_suffix(".json"))
        return path.with_suffix(".json")
    return write_csv(path, header, rows)


_GNUPLOT_RECIPES = {
    ("t", "u", "v"): (
        "plot FILE using 1:2 with lines title 'u', '' using 1:3 with lines title 'v'\n"
    ),
    ("m", "branch", "u", "v", "stability", "is_sn_marker"): (
        "plot FILE using 1:3 with points pt 7 ps 0.4 title 'patch-1 branches'\n"
    ),
    ("t", "x", "u", "v"): "set view map\nsplot FILE using 2:1:3 with points pt 5 palette title 'u'\n",
    ("x_u", "x_v", "f_u", "f_v", "kind"): (
        "plot FILE using 1:2:($3*0.2):($4*0.2) with vectors head filled title 'field'\n"
    ),
    ("u0", "v0", "label"): "plot FILE using 1:2 with points pt 5 title 'basin nodes'\n",
    (
        "t", "min_u", "max_u", "min_v", "max_v", "mass_u", "mass_v",
        "logmass_u", "gronwall_monitor",
    ): (
        "plot FILE using 1:2 with lines title 'min u', "
        "'' using 1:3 with lines title 'max u'\n"
    ),
}


def _write_gnuplot_scripts(outputs: list[Path]) -> list[Path]:
    """One plotting script per recognized CSV, referencing it by file name."""
    scripts = []
    for path in outputs:
        if path.suffix != ".csv":
            continue
        with open(path, "r", encoding="utf-8") as fh:
            header = tuple(fh.readline().strip().split(","))
        recipe = _GNUPLOT_RECIPES.get(header)
        if recipe is None:
            continue
        script = path.with_suffix(".gp")
        body = "set datafile separator ','\n" + recipe.replace("FILE", f"'{path.name}'")
        with open(script, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(body)
        scripts.append(script)
    return scripts


def _out_path(args: argparse.Namespace, default_name: str) -> Path:
    out = getattr(args, "out", None)
    if out is None:
        return Path(default_name)
    path = Path(out)
    if path.is_dir() or str(out).endswith(("/", "\\")):
        return path / default_name
    return path


def _eq_summary(eq: Equilibrium) -> dict:
    return {"kind": eq.kind.value, "u": eq.u, "v": eq.v, "stability": eq.stability.value}


def _run_equilibria(scenario: dict, args) -> tuple[dict, list[Path], int]:
    p = _require_params(scenario)
    model = scenario.setdefault("model", "nonlinear")
    if model == "linear":
        report = linear_equilibria(p)
        eqs = list(report.equilibria)
        result = {"verdict": report.verdict.value, "equilibria": [_eq_summary(e) for e in eqs]}
    else:
        rep = regime_report(p)
        eqs = list(rep.equilibria)
        result = {
            "case": f"({rep.case})",
            "verdict": rep.verdict.value,
            "equilibria": [_eq_summary(e) for e in eqs],
        }
    path = _write_table(_out_path(args, "equilibria.csv"), _EQ_HEADER,
                        [_eig_row(e) for e in eqs], args.format)
    return result, [path], 0


def _run_regime(scenario: dict, args) -> tuple[dict, list[Path], int]:
    p = _require_params(scenario)
    rep = regime_report(p)
    td = rep.derived
    result = {
        "case": f"({rep.case})",
        "verdict": rep.verdict.value,
        "equilibria": [_eq_summary(e) for e in rep.equilibria],
        "thresholds": {
            "B": td.B, "m0": td.m0, "m1": td.m1,
            "mstar": td.mstar, "m1star": td.m1star,
        },
    }
    outputs: list[Path] = []
    if args.out is not None:
        target = _out_path(args, "regime.json")
        dump_json(result, target)
        outputs.append(target)
    return result, outputs, 0


def _run_sweep(scenario: dict, args) -> tuple[dict, list[Path], int]:
    p = _require_params(scenario)
    m_lo = float(scenario.setdefault("m_lo", 0.05))
    m_hi = float(scenario.setdefault("m_hi", 1.0))
    steps = int(scenario.setdefault("steps", 200))
    include_boundary = bool(scenario.setdefault("include_boundary", False))
    diagram = sweep_allee(p, m_lo, m_hi, steps, include_boundary=include_boundary)
    rows = [
        (r.m, r.branch, r.u, r.v, r.stability, r.is_sn_marker)
        for r in list(diagram.rows) + list(diagram.sn_markers)
    ]
    path = _write_table(_out_path(args, "sweep.csv"),
                        ("m", "branch", "u", "v", "stability", "is_sn_marker"),
                        rows, args.format)
    result = {
        "rows": len(rows),
        "sn_markers": [{"m": r.m, "u": r.u, "v": r.v} for r in diagram.sn_markers],
    }
    return result, [path], 0


def _run_sensitivity(scenario: dict, args) -> tuple[dict, list[Path], int]:
    p = _require_params(scenario)
    rep = abundance_sensitivity(p)
    result = {
        "u1": rep.u1, "v1": rep.v1, "total": rep.total,
        "curvature_gap": rep.curvature_gap,
        "du1_dm": rep.du1_dm, "dv1_dm": rep.dv1_dm, "dtotal_dm": rep.dtotal_dm,
    }
    outputs: list[Path] = []
    if args.out is not None:
        target = _out_path(args, "sensitivity.json")
        dump_json(result, target)
        outputs.append(target)
    return result, outputs, 0


def _normalize_runs(scenario: dict) -> list[dict]:
    if "runs" in scenario:
        runs = scenario["runs"]
    else:
        runs = [{
            "label": scenario.get("label", "run"),
            "params": scenario.get("params"),
            "x0": scenario.get("x0"),
        }]
    if not runs:
        raise ValidationError("simulate-ode scenario has an empty run list")
    for run in runs:
        if run.get("params") is None:
            raise ValidationError("every simulate-ode run needs a parameter block")
        if run.get("x0") is None:
            raise ValidationError("every simulate-ode run needs an initial state x0")
    return runs


def _run_simulate_ode(scenario: dict, args) -> tuple[dict, list[Path], int]:
    model = scenario.setdefault("model", "nonlinear")
    if "params" in scenario and "x0" not in scenario and "runs" not in scenario:
        x0_flag = getattr(args, "x0", None)
        if x0_flag is None:
            raise ValidationError("--x0 'u,v' is required for simulate-ode")
        parts = x0_flag.split(",")
        if len(parts) != 2:
            raise ValidationError(f"cannot parse --x0 {x0_flag!r}; expected 'u,v'")
        scenario["x0"] = [float(parts[0]), float(parts[1])]
    t_end = float(scenario.setdefault("t_end", 2000.0))
    tol = float(scenario.setdefault("tol", 1e-8))
    runs = _normalize_runs(scenario)
    outputs: list[Path] = []
    summaries = []
    status = 0
    multi = len(runs) > 1
    for run in runs:
        p = _params_from_dict(run["params"])
        x0 = (float(run["x0"][0]), float(run["x0"][1]))
        traj = integrate_ode(model, p, x0,
                             t_end=float(run.get("t_end", t_end)),
                             tol=float(run.get("tol", tol)))
        label = str(run.get("label", "run"))
        if multi:
            out_dir = Path(args.out) if args.out is not None else Path("ode-runs")
            base = out_dir / f"{label}.csv"
        else:
            base = _out_path(args, "trajectory.csv")
        rows = [(float(t), float(u), float(v))
                for t, (u, v) in zip(traj.times, traj.states)]
        outputs.append(_write_table(base, ("t", "u", "v"), rows, args.format))
        final = traj.final_state
        summaries.append({
            "label": label,
            "event": traj.event.value,
            "t_final": float(traj.times[-1]),
            "final_state": [final[0], final[1]],
            "target": traj.target.kind.value if traj.target else None,
        })
        if traj.event is TerminalEvent.STEP_FAILURE:
            status = 3
    return {"runs": summaries}, outputs, status


def _grid_from(scenario: dict, args) -> GridSpec:
    grid = dict(scenario.get("grid", {}))
    for attr, name in (("u_min", "u_min"), ("u_max", "u_max"), ("v_min", "v_min"),
                       ("v_max", "v_max"), ("nu", "nu"), ("nv", "nv")):
        value = getattr(args, attr, None)
        if value is not None:
            grid[name] = value
    defaults = {"u_min": 0.0, "u_max": 2.0, "v_min": 0.0, "v_max": 2.0, "nu": 21, "nv": 21}
    for key, value in defaults.items():
        grid.setdefault(key, value)
    scenario["grid"] = grid
    return GridSpec(**grid)


def _run_basin(scenario: dict, args) -> tuple[dict, list[Path], int]:
    p = _require_params(scenario)
    model = scenario.setdefault("model", "nonlinear")
    spec = _grid_from(scenario, args)
    tol = float(scenario.setdefault("tol", 1e-4))
    t_end = float(scenario.setdefault("t_end", 2000.0))
    bm = basin_map(p, spec, tol=tol, t_end=t_end, model=model)
    rows = []
    us = spec.u_values()
    vs = spec.v_values()
    for i, u0 in enumerate(us):
        for j, v0 in enumerate(vs):
            rows.append((float(u0), float(v0), bm.labels[i, j]))
    path = _write_table(_out_path(args, "basin.csv"), ("u0", "v0", "label"), rows, args.format)
    counts: dict[str, int] = {}
    for _, _, label in rows:
        counts[label] = counts.get(label, 0) + 1
    return {"labels": counts}, [path], 0


def _run_portrait(scenario: dict, args) -> tuple[dict, list[Path], int]:
    p = _require_params(scenario)
    model = scenario.setdefault("model", "nonlinear")
    spec = _grid_from(scenario, args)
    t_end = float(scenario.setdefault("t_end", 500.0))
    tol = float(scenario.setdefault("tol", 1e-8))
    data = phase_portrait(p, spec, model=model, t_end=t_end, tol=tol)
    rhs = rhs_nonlinear if model == "nonlinear" else rhs_linear
    rows = []
    for i in range(spec.nu):
        for j in range(spec.nv):
            rows.append((data.field_u[i, j], data.field_v[i, j],
                         data.field_fu[i, j], data.field_fv[i, j], "field"))
    for eq in data.equilibria:
        rows.append((eq.u, eq.v, 0.0, 0.0, f"eq-{eq.kind.value}-{eq.stability.value}"))
    for idx, traj in enumerate(data.trajectories):
        for t, (u, v) in zip(traj.times, traj.states):
            fu, fv = rhs(p, (u, v))
            rows.append((float(u), float(v), fu, fv, f"traj-{idx}"))
    path = _write_table(_out_path(args, "portrait.csv"),
                        ("x_u", "x_v", "f_u", "f_v", "kind"), rows, args.format)
    return {"trajectories": len(data.trajectories),
            "equilibria": [_eq_summary(e) for e in data.equilibria]}, [path], 0


def _profile_from_dict(d: dict) -> CoefficientProfile:
    if "two_patch" in d:
        return CoefficientProfile.two_patch(**{k: float(v) for k, v in d["two_patch"].items()})
    if "constant" in d:
        return CoefficientProfile.constant(**{k: float(v) for k, v in d["constant"].items()})
    pairs = {}
    for name in ("m", "m1", "e", "e1", "h", "h1", "s", "s1"):
        if name not in d:
            raise ValidationError(f"profile dict is missing field {name!r}")
        left, right = d[name]
        pairs[name] = (float(left), float(right))
    return CoefficientProfile(c1=float(d.get("c1", 0.0)), **pairs)


def _pde_config_from(scenario: dict, args) -> PdeConfig:
    cfg = dict(scenario.get("config", {}))
    for attr, name in (("kind", "kind"), ("delta1", "delta1"), ("delta2", "delta2"),
                       ("initial", "initial"), ("L", "L"), ("L1", "L1"), ("n", "n"),
                       ("t_end", "t_end"), ("tol", "tol"), ("snapshot_dt", "snapshot_dt")):
        value = getattr(args, attr, None)
        if value is not None:
            cfg[name] = value
    if getattr(args, "divergence_form", None):
        cfg["divergence_form"] = True
    if any(getattr(args, f"profile_{k}", None) is not None for k in ("m", "e", "h", "s")):
        base = {k: getattr(args, f"profile_{k}", None) for k in ("m", "e", "h", "s")}
        if any(v is None for v in base.values()):
            raise ValidationError("profile flags require all of --profile-m/e/h/s")
        key = "constant" if getattr(args, "constant_profile", None) else "two_patch"
        cfg["profile"] = {key: base}
    if "profile" not in cfg:
        raise ValidationError("simulate-pde needs a profile (flags, preset or scenario)")
    if "kind" not in cfg or "delta1" not in cfg or "delta2" not in cfg:
        raise ValidationError("simulate-pde needs --kind, --delta1 and --delta2")
    scenario["config"] = dict(cfg)
    profile = _profile_from_dict(cfg["profile"])
    kwargs = {k: v for k, v in cfg.items() if k != "profile"}
    initial = kwargs.get("initial")
    if isinstance(initial, dict):
        try:
            kwargs["initial"] = (initial["u0"], initial["v0"])
        except KeyError:
            raise ValidationError(
                "explicit initial data must provide both 'u0' and 'v0'"
            ) from None
    return PdeConfig(profile=profile, **kwargs)


def _run_simulate_pde(scenario: dict, args) -> tuple[dict, list[Path], int]:
    cfg = _pde_config_from(scenario, args)
    problem = build_pde_problem(cfg)
    series = integrate_pde(problem)
    out_dir = Path(args.out) if args.out is not None else Path("pde-run")
    snap_rows = []
    for k, t in enumerate(series.times):
        for i, x in enumerate(series.x):
            snap_rows.append((float(t), float(x), float(series.u[k, i]), float(series.v[k, i])))
    outputs = [_write_table(out_dir / "snapshots.csv", ("t", "x", "u", "v"),
                            snap_rows, args.format)]
    func = pde_functionals(series, problem)
    func_rows = [
        (float(func.times[k]), float(func.min_u[k]), float(func.max_u[k]),
         float(func.min_v[k]), float(func.max_v[k]), float(func.mass_u[k]),
         float(func.mass_v[k]), float(func.logmass_u[k]), float(func.gronwall[k]))
        for k in range(len(func.times))
    ]
    outputs.append(_write_table(
        out_dir / "functionals.csv",
        ("t", "min_u", "max_u", "min_v", "max_v", "mass_u", "mass_v",
         "logmass_u", "gronwall_monitor"),
        func_rows, args.format))
    status = 3 if series.event is TerminalEvent.STEP_FAILURE else 0
    result = {
        "event": series.event.value,
        "failure_cell": series.failure_cell,
        "t_final": float(series.times[-1]),
        "min_u_final": float(series.u[-1].min()),
        "max_u_final": float(series.u[-1].max()),
        "min_v_final": float(series.v[-1].min()),
        "max_v_final": float(series.v[-1].max()),
        "warnings": list(problem.warnings),
    }
    return result, outputs, status


def _run_presets(args) -> tuple[dict, list[Path], int]:
    for name in sorted(PRESETS):
        print(f"{name}: {PRESETS[name].description}")
    return {"presets": sorted(PRESETS)}, [], 0


_HANDLERS = {
    "equilibria": _run_equilibria,
    "regime": _run_regime,
    "sweep": _run_sweep,
    "sensitivity": _run_sensitivity,
    "simulate-ode": _run_simulate_ode,
    "basin": _run_basin,
    "portrait": _run_portrait,
    "simulate-pde": _run_simulate_pde,
}


def _thresholds_for_manifest(scenario: dict) -> dict | None:
    block = scenario.get("params")
    if block is None:
        return None
    try:
        td = derived_thresholds(_params_from_dict(block))
    except (ValidationError, DomainError):
        return None
    return {"B": td.B, "m0": td.m0, "m1": td.m1, "mstar": td.mstar, "m1star": td.m1star}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _USAGE_EXIT

    start = time.perf_counter()
    try:
        if args.command == "presets":
            result, outputs, status = _run_presets(args)
            return status
        scenario = _base_scenario(args)
        _override(scenario, args, {"model": "model"} if hasattr(args, "model") else {})
        if hasattr(args, "t_end") and args.t_end is not None and args.command != "simulate-pde":
            scenario["t_end"] = args.t_end
        if hasattr(args, "tol") and args.tol is not None and args.command != "simulate-pde":
            scenario["tol"] = args.tol
        if args.command == "sweep":
            _override(scenario, args, {"m_lo": "m_lo", "m_hi": "m_hi", "steps": "steps"})
            if args.include_boundary:
                scenario["include_boundary"] = True
        result, outputs, status = _HANDLERS[args.command](scenario, args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return _USAGE_EXIT
    except (ValidationError, DomainError, PreconditionError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, InternalConsistencyError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3

    if getattr(args, "gnuplot", False):
        outputs = list(outputs) + _write_gnuplot_scripts(list(outputs))
    manifest = {
        "tool": "patchdyn",
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "duration_s": time.perf_counter() - start,
        "scenario": scenario,
        "thresholds": _thresholds_for_manifest(scenario),
        "result": result,
        "outputs": [str(p) for p in outputs],
    }
    print(dump_json(manifest))
    return status


if __name__ == "__main__":
    sys.exit(main())
