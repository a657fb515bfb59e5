"""Command-line interface: analyze | shoot | trap | simulate | sweep.

Every run resolves parameters from an optional flat config file plus
overriding flags, executes, writes its data files (CSV/JSON with
17-significant-digit floats), and finishes with a run manifest listing
the outputs and a pass/fail summary.  Exit codes are a stable scripting
contract: 0 success, 1 validation error, 2 numerical failure, 3
internal error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, connect, geometry, pdesim, reductions
from ._io import dump_json, fmt_float, write_csv
from .errors import (
    InterfaceLost,
    NoConnection,
    NoOverlap,
    NonFiniteField,
    NonFiniteState,
    SigmaNotZero,
    SisFrontsError,
    SlopeOutOfInterval,
    SpeedBelowBound,
    StepUnderflow,
    CFLViolation,
    ValidationError,
)
from .model import ModelParams, Regime, equilibria, read_config, validate_params
from .phasespace import field_eigenvalues

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_INTERNAL = 3

_VALIDATION_ERRORS = (ValidationError, SpeedBelowBound, SlopeOutOfInterval, SigmaNotZero,
                      ValueError)
_NUMERICAL_ERRORS = (NoConnection, CFLViolation, InterfaceLost, NonFiniteField,
                     NonFiniteState, StepUnderflow, NoOverlap)

_PARAM_FLAGS = ("beta", "gamma", "sigma", "c", "epsilon", "alpha", "regime")


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta", type=float, default=None)
    parser.add_argument("--gamma", type=float, default=None)
    parser.add_argument("--sigma", type=float, default=None)
    parser.add_argument("--c", type=float, default=None)
    parser.add_argument("--eps", dest="epsilon", type=float, default=None)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--regime", choices=["case1", "case2", "case3"], default=None)
    parser.add_argument("--config", default=None, help="flat key=value parameter file")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=1)


def _resolve_params(args) -> ModelParams:
    record: dict = {}
    if args.config:
        record.update(read_config(args.config))
    for key in _PARAM_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            record[key] = value
    return validate_params(record)


def _out_dir(args, command: str) -> Path:
    out = Path(args.out) if args.out else Path(f"sisfronts-{command}")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _complex_pair(values) -> list:
    out = []
    for v in values:
        v = complex(v)
        if v.imag == 0.0:
            out.append(v.real)
        else:
            out.append({"re": v.real, "im": v.imag})
    return out


# ---- analyze -----------------------------------------------------------------

def _cmd_analyze(args) -> tuple[bool, dict, list]:
    params = _resolve_params(args)
    endemic, free = equilibria(params)
    report: dict = {
        "params": params.as_dict(),
        "equilibria": {
            "endemic": list(endemic.coords),
            "disease_free": list(free.coords),
        },
    }
    vf = reductions.planar_reduction_field(params)
    if params.regime is Regime.CASE1_COMPARABLE_SMALL:
        report["reduced_flow_rates"] = {
            "endemic": float(field_eigenvalues(vf, [endemic.I])[0].real),
            "disease_free": float(field_eigenvalues(vf, [0.0])[0].real),
        }
    elif params.regime is Regime.CASE2_SLOW_INFECTED:
        report["eigenvalues"] = {
            "endemic_closed_form": list(reductions.case2_eigs_endemic(params)),
            "endemic_numerical": _complex_pair(field_eigenvalues(vf, endemic.si_plane)),
            "disease_free_closed_form": list(reductions.case2_eigs_disease_free(params)),
            "disease_free_numerical": _complex_pair(field_eigenvalues(vf, free.si_plane)),
        }
    else:
        bound = reductions.case3_speed_bound(params)
        report["eigenvalues"] = {
            "endemic_closed_form": list(reductions.case3_eigs_endemic(params)),
            "endemic_numerical": _complex_pair(field_eigenvalues(vf, endemic.iv_plane)),
            "disease_free_closed_form": _complex_pair(
                reductions.case3_eigs_disease_free(params)
            ),
            "disease_free_numerical": _complex_pair(field_eigenvalues(vf, free.iv_plane)),
        }
        report["speed_bound"] = {
            "c_min": bound.c_min,
            "r_interval": list(bound.r_interval) if bound.r_interval else None,
            "r_midpoint": bound.midpoint,
        }
    if params.sigma == 0.0:
        fk = reductions.fkpp_parameters(params)
        report["fkpp"] = {
            "k": fk.k,
            "scaled_min_speed": fk.scaled_min_speed,
            "min_speed": fk.min_speed,
        }

    print(f"regime {params.regime.value}: beta={fmt_float(params.beta)} "
          f"gamma={fmt_float(params.gamma)} sigma={fmt_float(params.sigma)} "
          f"c={fmt_float(params.c)}")
    print(f"endemic state      {tuple(round(v, 10) for v in endemic.coords)}")
    print(f"disease-free state {tuple(round(v, 10) for v in free.coords)}")
    if "eigenvalues" in report:
        for key, value in report["eigenvalues"].items():
            print(f"{key}: {value}")
    if "speed_bound" in report:
        print(f"speed bound: {report['speed_bound']}")
    if "fkpp" in report:
        print(f"sigma=0 front law: {report['fkpp']}")

    outputs = []
    if args.out:
        out = _out_dir(args, "analyze")
        path = out / "analyze.json"
        dump_json(report, path)
        outputs.append(str(path))
        return True, report, outputs, out
    return True, report, outputs, None


# ---- shoot -------------------------------------------------------------------

def _cmd_shoot(args) -> tuple[bool, dict, list]:
    params = _resolve_params(args)
    if args.reduced:
        profile = connect.reduced_connection(
            params, offset=args.offset, ball_radius=args.ball_radius,
            max_span=args.max_span,
        )
    else:
        profile = connect.full_system_connection(
            params, offset=args.offset, ball_radius=args.ball_radius,
            max_span=args.max_span,
        )
    out = _out_dir(args, "shoot")
    csv_path = out / "profile.csv"
    json_path = out / "profile.json"
    profile.to_csv(csv_path)
    dump_json({"params": params.as_dict(), **profile.summary()}, json_path)
    ok = profile.endpoint_gap < args.ball_radius
    return ok, profile.summary(), [str(csv_path), str(json_path)], out


# ---- trap --------------------------------------------------------------------

def _cmd_trap(args) -> tuple[bool, dict, list]:
    params = _resolve_params(args)
    if params.regime is Regime.CASE2_SLOW_INFECTED:
        report = geometry.trap_check_case2(params, n=args.samples)
    elif params.regime is Regime.CASE3_FAST_INFECTED:
        report = geometry.trap_check_case3(params, r=args.r, n=args.samples)
    else:
        raise ValidationError(["trap checks exist for case2 and case3 only"])
    out = _out_dir(args, "trap")
    path = out / "trap_report.json"
    dump_json(report.summary(), path)
    return report.verdict, report.summary(), [str(path)], out


# ---- simulate ----------------------------------------------------------------

def _cmd_simulate(args) -> tuple[bool, dict, list]:
    params = _resolve_params(args)
    grid = pdesim.Grid1D(args.x_min, args.x_max, args.nodes)
    dt = args.dt if args.dt is not None else pdesim.stable_dt(params, grid)
    init = pdesim.initial_front(grid, params, interface_x=args.interface, width=args.width)
    result = pdesim.simulate(
        params, grid, init, dt, args.horizon,
        n_snapshots=args.snapshots, frame_speed=args.frame_speed,
    )
    out = _out_dir(args, "simulate")
    outputs = []
    x = grid.x
    for k, snap in enumerate(result.fields):
        path = out / f"snapshot_{k:04d}.csv"
        write_csv(path, ("x", "S", "I"), [x, snap.S, snap.I])
        outputs.append(str(path))
    manifest_path = out / "snapshots.json"
    dump_json(
        {
            "params": params.as_dict(),
            "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n": grid.n, "dx": grid.dx},
            "dt": dt,
            "frame_speed": args.frame_speed,
            "times": [f.t for f in result.fields],
            "files": [Path(p).name for p in outputs],
        },
        manifest_path,
    )
    outputs.append(str(manifest_path))
    summary: dict = {"n_snapshots": len(result.fields), "dt": dt}
    if args.measure_speed:
        estimate = pdesim.measure_front_speed(result, level=args.level, window=args.window)
        speed_path = out / "speed.json"
        dump_json(estimate.summary(), speed_path)
        outputs.append(str(speed_path))
        summary["speed"] = estimate.summary()
    return True, summary, outputs, out


# ---- sweep -------------------------------------------------------------------

def _grid_combinations(grid: dict) -> list[dict]:
    if not grid:
        return []
    keys = sorted(grid)
    combos: list[dict] = [{}]
    for key in keys:
        values = grid[key]
        combos = [dict(c, **{key: v}) for c in combos for v in values]
    return combos


def _cmd_sweep(args) -> tuple[bool, dict, list]:
    import json

    with open(args.sweep_config, "r", encoding="utf-8") as fh:
        spec = json.load(fh)
    command = spec.get("command", "shoot")
    base = dict(spec.get("params", {}))
    options = dict(spec.get("options", {}))
    combos = _grid_combinations(dict(spec.get("grid", {})))
    out = _out_dir(args, "sweep")

    def run_one(idx_combo):
        idx, combo = idx_combo
        run_dir = out / "runs" / f"run_{idx:03d}"
        run_dir.mkdir(parents=True, exist_ok=True)
        argv = [command]
        for key, value in {**base, **combo}.items():
            flag = "--eps" if key == "epsilon" else f"--{key}"
            argv += [flag, str(value)]
        for key, value in options.items():
            if value is True:
                argv += [f"--{key}"]
            elif value is not False:
                argv += [f"--{key}", str(value)]
        argv += ["--out", str(run_dir)]
        code = main(argv)
        return {"run": f"run_{idx:03d}", "overrides": combo, "exit_code": code,
                "dir": str(run_dir)}

    if args.jobs > 1 and combos:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            entries = list(pool.map(run_one, enumerate(combos)))
    else:
        entries = [run_one(item) for item in enumerate(combos)]

    index_path = out / "index.json"
    dump_json({"command": command, "n_runs": len(entries), "runs": entries}, index_path)
    ok = all(e["exit_code"] == EXIT_OK for e in entries)
    summary = {"n_runs": len(entries), "failures": sum(e["exit_code"] != 0 for e in entries)}
    return ok, summary, [str(index_path)], out


# ---- driver --------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sisfronts",
        description="Traveling fronts of the diffusive SIS model: analysis, "
                    "shooting, trapping verification, and PDE simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="equilibria, eigenvalues, speed bounds")
    _add_param_flags(p_analyze)

    p_shoot = sub.add_parser("shoot", help="construct a heteroclinic front profile")
    _add_param_flags(p_shoot)
    p_shoot.add_argument("--reduced", action="store_true",
                         help="shoot the eps=0 reduced flow instead of the full system")
    p_shoot.add_argument("--offset", type=float, default=1e-6)
    p_shoot.add_argument("--ball-radius", dest="ball_radius", type=float, default=1e-6)
    p_shoot.add_argument("--max-span", dest="max_span", type=float, default=1e4)

    p_trap = sub.add_parser("trap", help="verify a trapping triangle")
    _add_param_flags(p_trap)
    p_trap.add_argument("--r", type=float, default=None, help="case3 slope (default midpoint)")
    p_trap.add_argument("--samples", type=int, default=100)

    p_sim = sub.add_parser("simulate", help="method-of-lines PDE run with speed estimate")
    _add_param_flags(p_sim)
    p_sim.add_argument("--x-min", dest="x_min", type=float, default=0.0)
    p_sim.add_argument("--x-max", dest="x_max", type=float, default=200.0)
    p_sim.add_argument("--nodes", type=int, default=2001)
    p_sim.add_argument("--dt", type=float, default=None, help="default: 0.9x CFL bound")
    p_sim.add_argument("--horizon", type=float, default=50.0)
    p_sim.add_argument("--snapshots", type=int, default=21)
    p_sim.add_argument("--interface", type=float, default=None,
                       help="initial interface position (default 25%% into the domain)")
    p_sim.add_argument("--width", type=float, default=None)
    p_sim.add_argument("--frame-speed", dest="frame_speed", type=float, default=0.0,
                       help="co-moving frame speed (0 = stationary frame)")
    p_sim.add_argument("--level", type=float, default=0.5)
    p_sim.add_argument("--window", type=float, default=0.5)
    p_sim.add_argument("--no-speed", dest="measure_speed", action="store_false")

    p_sweep = sub.add_parser("sweep", help="batch runs over a parameter grid")
    _add_param_flags(p_sweep)
    p_sweep.add_argument("--sweep-config", dest="sweep_config", required=True,
                         help="JSON file: {command, params, grid, options}")

    return parser


_HANDLERS = {
    "analyze": _cmd_analyze,
    "shoot": _cmd_shoot,
    "trap": _cmd_trap,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handler = _HANDLERS[args.command]
    started = time.perf_counter()
    manifest_dir = None
    try:
        ok, summary, outputs, manifest_dir = handler(args)
        code = EXIT_OK if ok else EXIT_NUMERICAL
        error = None
    except _VALIDATION_ERRORS as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        code, ok, summary, outputs, error = EXIT_VALIDATION, False, {}, [], str(exc)
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        code, ok, summary, outputs, error = EXIT_NUMERICAL, False, {}, [], str(exc)
        if args.out:
            manifest_dir = Path(args.out)
    except SisFrontsError as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        code, ok, summary, outputs, error = EXIT_INTERNAL, False, {}, [], str(exc)

    if manifest_dir is not None:
        manifest = {
            "command": args.command,
            "version": __version__,
            "argv": list(argv) if argv is not None else sys.argv[1:],
            "wall_clock_s": time.perf_counter() - started,
            "ok": ok,
            "exit_code": code,
            "outputs": outputs,
            "summary": summary,
        }
        if error is not None:
            manifest["error"] = error
        Path(manifest_dir).mkdir(parents=True, exist_ok=True)
        dump_json(manifest, Path(manifest_dir) / "manifest.json")
    return code


if __name__ == "__main__":
    sys.exit(main())
