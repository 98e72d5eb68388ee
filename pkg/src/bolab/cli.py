"""Command-line front end; a thin shell over the library operations.

Every subcommand reproduces exactly what the corresponding library call
produces (same files, byte for byte).  Exit codes: 0 success, 1 validation
error, 2 runtime failure.  Divergence verdicts (e.g. a weight failing the
A2 scan) are results, not errors.  The output root defaults to the
current directory and can be overridden by --out or the BO_LAB_OUT
environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .dynamics import SolverConfig, solve
from .experiments import (ExperimentConfig, build_datum,
                          linear_moment_condition_experiment,
                          environment_fingerprint, run_sweep)
from .grid import SpectralGrid
from .invariants import fit_moment_slope, invariant_traces, momentum
from .stein import dispersive_phase, stein_derivative
from .storage import load_trace, load_trajectory, read_json, save_trace, save_trajectory, write_json
from .weights import WeightSpec, a2_constant, a2_uniformity_scan


class ValidationError(Exception):
    pass


def _out_dir(args) -> str:
    root = args.out or os.environ.get("BO_LAB_OUT") or "."
    os.makedirs(root, exist_ok=True)
    return root


def _solver_from_dict(d: dict) -> SolverConfig:
    known = {"dt", "t_end", "dealias_fraction", "integrator", "nonlinearity_power",
             "nonlinearity_sign", "dispersion_sign", "nonlinear"}
    extra = set(d) - known
    if extra:
        raise ValidationError(f"unknown solver keys: {sorted(extra)}")
    try:
        return SolverConfig(**d)
    except (TypeError, ValueError) as exc:
        raise ValidationError(str(exc)) from exc


def _load_run_config(path: str):
    if not os.path.exists(path):
        raise ValidationError(f"config file not found: {path}")
    cfg = read_json(path)
    for key in ("grid", "solver", "datum", "seed"):
        if key not in cfg:
            raise ValidationError(f"config is missing the required {key!r} entry")
    grid = SpectralGrid(int(cfg["grid"]["n"]), float(cfg["grid"]["L"]))
    solver = _solver_from_dict(cfg["solver"])
    return cfg, grid, solver


def cmd_solve(args) -> int:
    cfg, grid, solver = _load_run_config(args.config)
    u0 = build_datum(cfg["datum"], grid)
    traj = solve(u0, solver, int(cfg.get("snapshot_every", 25)))
    out = os.path.join(_out_dir(args), cfg.get("label", "trajectory"))
    save_trajectory(traj, out)
    print(f"trajectory written to {out} ({len(traj.times)} snapshots)")
    return 0


def cmd_soliton_test(args) -> int:
    from .dynamics import soliton

    grid = SpectralGrid(args.n, args.L)
    u0 = soliton(grid, args.c, variant=args.variant)
    solver = SolverConfig(dt=args.dt, t_end=args.t_end,
                          dispersion_sign=-1 if args.variant == "boneg" else +1)
    traj = solve(u0, solver, snapshot_every=max(1, int(round(args.t_end / args.dt))))
    drift = args.c * args.t_end
    x0 = -drift if args.variant == "bo" else drift
    exact = soliton(grid, args.c, x0=x0, variant=args.variant)
    err_vec = traj.final().values - exact.values
    rel = float(np.sqrt(grid.dx * np.sum(err_vec**2)) / exact.l2_norm())
    report = {
        "operation": "soliton_test",
        "c": args.c, "n": args.n, "L": args.L, "dt": args.dt,
        "t_end": args.t_end, "variant": args.variant,
        "relative_l2_error": rel,
        "fingerprint": environment_fingerprint(),
    }
    path = os.path.join(_out_dir(args), "soliton_test.json")
    write_json(report, path)
    print(f"relative L2 tracking error {rel:.3e} -> {path}")
    return 0


def cmd_invariants(args) -> int:
    traj = load_trajectory(args.traj)
    traces = invariant_traces(traj, run_id=os.path.basename(args.traj.rstrip("/")))
    out = _out_dir(args)
    drifts = {}
    for name, trace in traces.items():
        save_trace(trace, os.path.join(out, f"{name}.csv"))
        first, last = trace.values[0], trace.values[-1]
        drifts[name] = {
            "initial": first, "final": last,
            "absolute_drift": abs(last - first),
            "relative_drift": abs(last - first) / abs(first) if first != 0 else None,
        }
    u0 = traj.snapshots[0]
    report = {"operation": "invariants", "drifts": drifts,
              "moment_slope": fit_moment_slope(traces["first_moment"])
              if len(traj.times) > 1 else None,
              "moment_slope_target": 0.5 * momentum(u0)}
    write_json(report, os.path.join(out, "invariants.json"))
    print(f"invariant traces and report written to {out}")
    return 0


def cmd_norms(args) -> int:
    from .invariants import NormTrace
    from .operators import bessel_potential
    from .weights import weighted_l2_norm

    traj = load_trajectory(args.traj)
    out = _out_dir(args)
    sob = np.array([bessel_potential(u, args.s).l2_norm() for u in traj.snapshots])
    save_trace(NormTrace(f"sobolev_s{args.s:g}", traj.times, sob), os.path.join(out, f"sobolev_s{args.s:g}.csv"))
    written = [f"sobolev_s{args.s:g}.csv"]
    for n_trunc in args.N:
        spec = WeightSpec("truncated", args.r, n_trunc)
        vals = np.array([weighted_l2_norm(u, spec) for u in traj.snapshots])
        name = f"weighted_r{args.r:g}_N{n_trunc}"
        save_trace(NormTrace(name, traj.times, vals), os.path.join(out, f"{name}.csv"))
        written.append(f"{name}.csv")
    print(f"norm traces written to {out}: {', '.join(written)}")
    return 0


def cmd_a2(args) -> int:
    if args.weight == "power":
        spec = WeightSpec("power", args.alpha)
    elif args.weight == "bracket":
        spec = WeightSpec("bracket", args.alpha)
    else:
        if args.N is None:
            raise ValidationError("truncated weights need --N")
        spec = WeightSpec("truncated", args.theta, args.N[0])
    result = a2_constant(spec, half_length=args.L, levels=args.levels)
    report = result.to_dict()
    if args.weight == "truncated" and len(args.N) > 1:
        consts = a2_uniformity_scan(args.theta, args.N, half_length=args.L,
                                    levels=args.levels)
        report["uniformity"] = {
            "N_list": list(args.N),
            "constants": list(consts),
            "max_over_min": float(consts.max() / consts.min()),
        }
    path = os.path.join(_out_dir(args), "a2_scan.json")
    write_json(report, path)
    flag = "divergent" if result.diverged else "finite"
    print(f"A2 constant {result.constant:.6g} ({flag}) -> {path}")
    return 0


def cmd_stein(args) -> int:
    if args.target == "step":
        fn = lambda y: np.where(y > 0, 1.0, 0.0)
    elif args.target == "gaussian":
        fn = lambda y: np.exp(-(y**2))
    else:
        fn = dispersive_phase(args.t)
    result = stein_derivative(fn, args.b, args.x, cutoff=args.cutoff)
    report = result.to_dict()
    report["target"] = args.target
    path = os.path.join(_out_dir(args), "stein.json")
    write_json(report, path)
    status = "converged" if result.converged else "divergent/unconverged"
    print(f"D^{args.b:g} at x={args.x:g}: {result.value:.6g} ({status}) -> {path}")
    return 0


def cmd_sweep(args) -> int:
    configs = []
    for path in args.configs:
        if not os.path.exists(path):
            raise ValidationError(f"config file not found: {path}")
        raw = read_json(path)
        for key in ("label", "datum", "s", "r", "grid", "solver", "seed"):
            if key not in raw:
                raise ValidationError(f"{path}: missing {key!r}")
        configs.append(ExperimentConfig(
            label=raw["label"], datum=raw["datum"], s=raw["s"], r=raw["r"],
            n_points=int(raw["grid"]["n"]), half_length=float(raw["grid"]["L"]),
            solver=_solver_from_dict(raw["solver"]),
            truncations=tuple(raw.get("truncations", (4, 16, 64))),
            snapshot_every=int(raw.get("snapshot_every", 25)),
            growth_ceiling=float(raw.get("growth_ceiling", 10.0)),
            seed=int(raw["seed"]),
        ))
    index = run_sweep(configs, _out_dir(args), parallelism=args.jobs)
    failures = [k for k, v in index.items() if v["status"] != "ok"]
    print(f"sweep finished: {len(index)} experiments, {len(failures)} failed")
    return 0


def cmd_report(args) -> int:
    record_dir = args.record
    verdict_path = os.path.join(record_dir, "verdict.json")
    if not os.path.exists(verdict_path):
        raise ValidationError(f"{record_dir} is not an experiment record")
    verdict = read_json(verdict_path)
    traces_dir = os.path.join(record_dir, "traces")
    names = sorted(os.listdir(traces_dir)) if os.path.isdir(traces_dir) else []
    out = _out_dir(args)
    series = []
    for name in names:
        trace = load_trace(os.path.join(traces_dir, name))
        dest = os.path.join(out, name)
        save_trace(trace, dest)
        entry = {"file": name, "name": trace.name, "x_label": "t",
                 "y_label": trace.name, "samples": len(trace.times)}
        if len(trace.times) > 1:
            slope, intercept = np.polyfit(trace.times, trace.values, 1)
            entry["fitted_line"] = {"slope": float(slope), "intercept": float(intercept)}
        if trace.name.startswith("first_moment"):
            entry["target_slope"] = verdict.get("rows", [{}])[0].get("moment_slope_target")
        series.append(entry)
    manifest = {"operation": "plot_manifest", "record": os.path.abspath(record_dir),
                "verdict": verdict, "series": series}
    write_json(manifest, os.path.join(out, "plots.json"))
    print(f"{len(series)} series and plots.json written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bolab",
        description="Pseudospectral laboratory for the Benjamin-Ono equation.")
    parser.add_argument("--version", action="version",
                        version=f"bolab {__version__} (numpy {np.__version__})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run a solver config to a trajectory directory")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("soliton-test", help="track the exact traveling wave")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--L", type=float, default=128.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--variant", choices=("bo", "boneg"), default="bo")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_soliton_test)

    p = sub.add_parser("invariants", help="conservation traces of a trajectory")
    p.add_argument("--traj", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_invariants)

    p = sub.add_parser("norms", help="weighted and Sobolev norm traces")
    p.add_argument("--traj", required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--N", type=int, nargs="+", default=[4, 16, 64])
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_norms)

    p = sub.add_parser("a2", help="Muckenhoupt A2 constant scan")
    p.add_argument("--weight", choices=("power", "bracket", "truncated"), required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--N", type=int, nargs="+", default=None)
    p.add_argument("--L", type=float, default=128.0)
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_a2)

    p = sub.add_parser("stein", help="square-function derivative with refinement history")
    p.add_argument("--target", choices=("step", "gaussian", "phase"), required=True)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--x", type=float, default=0.0)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--cutoff", type=float, default=50.0)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_stein)

    p = sub.add_parser("sweep", help="run experiment configs, parallel up to --jobs")
    p.add_argument("--configs", nargs="+", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("report", help="emit per-trace CSV and a plots.json manifest")
    p.add_argument("--record", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; the contract wants 1 for validation
        return 0 if exc.code in (0, None) else 1
    try:
        return args.fn(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 2
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
