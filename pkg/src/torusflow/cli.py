"""Command line front end: simulate benchmarks, run convergence sweeps,
and execute the invariant check suite.

Exit codes: 0 success, 1 numerical or runtime failure, 2 usage or
configuration errors.  A flat key=value config file can seed any flag;
explicit flags win.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import verify as verify_mod
from .diagnostics import SweepSpec, convergence_sweep, energy_violations, vorticity_snapshot
from .output import (
    format_sweep_table,
    write_diagnostics_csv,
    write_manifest,
    write_snapshot,
    write_sweep_csv,
)
from .scenarios import SCENARIO_NAMES, get_scenario
from .spectral import PhysicalGrid, inverse_transform
from .stepping import Scheme, SolverError, StepperConfig, run

_SCHEMES = {
    "semi-implicit": Scheme.SEMI_IMPLICIT_ITERATIVE,
    "explicit": Scheme.EXPLICIT_TRANSPORT,
}


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}


def _apply_config_defaults(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    """Peek at --config and install its values as subcommand defaults.

    Subcommands parse into a fresh namespace, so the defaults must land on
    the subparser that will actually run.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, rest = probe.parse_known_args(argv)
    if not known.config:
        return
    command = next((token for token in rest if not token.startswith("-")), None)
    subparsers = getattr(parser, "_command_parsers", {})
    if command not in subparsers:
        raise ValueError(f"--config requires a known subcommand, got {command!r}")
    target = subparsers[command]
    values = _read_config_file(known.config)
    flag_actions = {
        action.dest: action
        for action in target._actions
        if action.dest != "help"
    }
    unknown = set(values) - set(flag_actions)
    if unknown:
        raise ValueError(f"unknown config keys for {command}: {', '.join(sorted(unknown))}")
    converted: dict[str, object] = {}
    for key, raw in values.items():
        action = flag_actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            lowered = raw.lower()
            if lowered not in _TRUE_WORDS | _FALSE_WORDS:
                raise ValueError(f"config key {key} expects a boolean, got {raw!r}")
            converted[key] = lowered in _TRUE_WORDS
        else:
            converted[key] = raw
    target.set_defaults(**converted)


def _add_common_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value file supplying flag defaults")
    parser.add_argument("--grid", type=int, default=128, help="grid points per axis M")
    parser.add_argument("--truncation", type=int, default=None, help="mode cutoff N (default M/2-1)")
    parser.add_argument("--nu", type=float, default=None, help="viscosity (0 for the inviscid system)")
    parser.add_argument("--tau", type=float, default=None, help="time step")
    parser.add_argument("--T", dest="horizon", type=float, default=None, help="final time")
    parser.add_argument("--tolerance", type=float, default=1e-10, help="fixed-point residual target")
    parser.add_argument("--max-iterations", type=int, default=200)
    parser.add_argument("--scheme", choices=sorted(_SCHEMES), default="semi-implicit")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusflow",
        description="Pseudo-spectral 2D incompressible flow solver on the periodic square",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="advance a benchmark and write snapshots plus diagnostics")
    _add_common_run_flags(sim)
    sim.add_argument("--scenario", choices=SCENARIO_NAMES, default=None)
    sim.add_argument("--m", type=int, default=2, help="taylor-green sharpness index")
    sim.add_argument("--outdir", default=None, help="output directory (default runs/<scenario>)")
    sim.add_argument(
        "--snapshot-every",
        type=int,
        default=None,
        help="steps between snapshots (default: about 10 snapshots per run)",
    )
    sim.add_argument("--norms", default="", help="comma list of extra H^s norms to record, e.g. 2.5,3")
    sim.add_argument("--no-forcing", action="store_true", help="ignore the scenario's forcing term")
    sim.add_argument("--seed", type=int, default=0, help="recorded for provenance; runs are deterministic")

    conv = sub.add_parser("converge", help="error sweep against the scenario's exact solution")
    _add_common_run_flags(conv)
    conv.add_argument("--scenario", choices=SCENARIO_NAMES, default="manufactured")
    conv.add_argument("--m", type=int, default=2)
    conv.add_argument("--vary", choices=("tau", "nu", "resolution"), required=True)
    conv.add_argument("--values", default=None, help="comma list of swept values")
    conv.add_argument("--base", type=float, default=None, help="first swept value; halved per row")
    conv.add_argument("--halvings", type=int, default=6, help="rows in the halving sweep")
    conv.add_argument("--norms", default="L2,Linf,H1,H6")
    conv.add_argument("--outdir", default=None)

    ver = sub.add_parser("verify", help="run the invariant check suite")
    ver.add_argument("--list", action="store_true", help="list available checks and exit")
    ver.add_argument("--check", action="append", default=None, help="run a single named check (repeatable)")
    ver.add_argument("--grid", type=int, default=48)
    ver.add_argument("--tau", type=float, default=None, help="override for the contraction check")
    ver.add_argument("--nu", type=float, default=None, help="override for the contraction check")
    ver.add_argument("--seed", type=int, default=0)
    parser._command_parsers = {"simulate": sim, "converge": conv, "verify": ver}
    return parser


def _require(parser: argparse.ArgumentParser, args: argparse.Namespace, names: list[str]) -> None:
    flag = {"horizon": "--T"}
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        shown = ", ".join(flag.get(m, "--" + m.replace("_", "-")) for m in missing)
        parser.error(f"missing required values: {shown}")


def _build_config(args: argparse.Namespace, forcing) -> StepperConfig:
    return StepperConfig(
        tau=float(args.tau),
        nu=float(args.nu),
        truncation=None if args.truncation is None else int(args.truncation),
        tolerance=float(args.tolerance),
        max_iterations=int(args.max_iterations),
        scheme=_SCHEMES[args.scheme],
        forcing=forcing,
    )


def _cmd_simulate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    _require(parser, args, ["scenario", "nu", "tau", "horizon"])
    scenario = get_scenario(args.scenario, m=int(args.m))
    grid = PhysicalGrid(int(args.grid))
    forcing = None if args.no_forcing else scenario.forcing_on(grid)
    cfg = _build_config(args, forcing)
    horizon = float(args.horizon)
    record_norms = tuple(float(s) for s in str(args.norms).split(",") if s)

    outdir = Path(args.outdir) if args.outdir else Path("runs") / scenario.name
    outdir.mkdir(parents=True, exist_ok=True)
    steps = round(horizon / cfg.tau)
    cadence = int(args.snapshot_every) if args.snapshot_every else max(1, steps // 10)
    if cadence < 1:
        parser.error("--snapshot-every must be at least 1")

    manifest = {
        "scenario": scenario.name,
        "outdir": outdir,
        "grid": grid.points_per_axis,
        "truncation": cfg.truncation if cfg.truncation is not None else grid.default_truncation,
        "nu": cfg.nu,
        "tau": cfg.tau,
        "T": horizon,
        "tolerance": cfg.tolerance,
        "max_iterations": cfg.max_iterations,
        "scheme": args.scheme,
        "forced": forcing is not None,
        "snapshot_every": cadence,
        "norms": args.norms,
        "seed": args.seed,
    }
    write_manifest(outdir / "manifest.txt", manifest)

    def snapshot_observer(record, state):
        if record.step % cadence != 0 and record.step != steps:
            return
        tag = f"{record.step:06d}"
        write_snapshot(outdir / f"velocity_{tag}.dat", inverse_transform(state), record.time)
        write_snapshot(outdir / f"vorticity_{tag}.dat", vorticity_snapshot(state), record.time)

    try:
        result = run(
            scenario.initial_velocity(grid),
            cfg,
            horizon,
            observers=[snapshot_observer],
            record_norms=record_norms,
        )
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    # the CSV comment carries the solver configuration, not the output path
    csv_config = {k: v for k, v in manifest.items() if k != "outdir"}
    write_diagnostics_csv(outdir / "diagnostics.csv", result.records, csv_config)
    if forcing is None:
        violations = energy_violations(result.records)
        if violations:
            print(f"warning: {len(violations)} energy increases detected", file=sys.stderr)
    print(f"wrote {outdir}/diagnostics.csv and snapshots for {steps} steps")
    return 0


def _parse_values(parser: argparse.ArgumentParser, args: argparse.Namespace) -> tuple:
    if args.values:
        raw = [v for v in str(args.values).split(",") if v]
        cast = int if args.vary == "resolution" else float
        return tuple(cast(v) for v in raw)
    if args.base is None:
        parser.error("provide either --values or --base/--halvings")
    return tuple(float(args.base) / 2**k for k in range(int(args.halvings)))


def _cmd_converge(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    fixed = {"tau": ["nu"], "nu": ["tau"], "resolution": ["tau", "nu"]}[args.vary]
    _require(parser, args, fixed + ["horizon"])
    values = _parse_values(parser, args)
    scenario = get_scenario(args.scenario, m=int(args.m))
    norms = tuple(n for n in str(args.norms).split(",") if n)
    try:
        spec = SweepSpec(
            vary=args.vary,
            values=values,
            scenario=scenario,
            grid_points=int(args.grid),
            tau=float(values[0]) if args.vary == "tau" else float(args.tau),
            nu=float(values[0]) if args.vary == "nu" else float(args.nu),
            horizon=float(args.horizon),
            norms=norms,
            truncation=None if args.truncation is None else int(args.truncation),
            tolerance=float(args.tolerance),
            max_iterations=int(args.max_iterations),
            scheme=_SCHEMES[args.scheme],
        )
    except ValueError as exc:
        parser.error(str(exc))
    result = convergence_sweep(spec)
    outdir = Path(args.outdir) if args.outdir else Path("sweeps")
    outdir.mkdir(parents=True, exist_ok=True)
    config = {
        "vary": args.vary,
        "values": ",".join(f"{v:g}" for v in values),
        "scenario": scenario.name,
        "grid": args.grid,
        "tau": args.tau,
        "nu": args.nu,
        "T": args.horizon,
        "norms": args.norms,
        "tolerance": args.tolerance,
        "scheme": args.scheme,
    }
    csv_path = outdir / f"sweep_{args.vary}.csv"
    write_sweep_csv(csv_path, result, config)
    print(format_sweep_table(result))
    print(f"wrote {csv_path}")
    if not result.completed:
        print(f"error: {result.failure}", file=sys.stderr)
        return 1
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        for name in verify_mod.CHECKS:
            print(name)
        return 0
    opts = verify_mod.CheckOptions(
        grid_points=int(args.grid), seed=int(args.seed), tau=args.tau, nu=args.nu
    )
    try:
        results = verify_mod.run_checks(args.check, opts)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: {res.detail}")
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        _apply_config_defaults(parser, argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(parser, args)
        if args.command == "converge":
            return _cmd_converge(parser, args)
        return _cmd_verify(args)
    except (ValueError, KeyError, OSError) as exc:
        detail = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {detail}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
