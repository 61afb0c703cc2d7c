import argparse
import os
import sys
import time
from typing import Dict, List, Optional

import numpy as np

from .config import (
    BUILTIN_CONFIGS,
    RunConfig,
    builtin_config_text,
    load_run_config,
    parse_delays,
    parse_grid,
    parse_sweep,
)
from .errors import (
    CheckFailed,
    ConfigError,
    ExportError,
    ValidationError,
    is_numerical,
)
from .export import (
    RunManifest,
    report_dict,
    run_key,
    write_json,
    write_manifest,
    write_spectrum,
    write_sweep,
)
from .model import revalidate
from .notifier import log_event, report_failure
from .oracle import brute_force_signal
from .signal import FINITE_TE, ORACLE, SHORT_TE, difference_spectrum, signal_finite_te_rephasing, signal_short_te
from .twod import GRID_MARGIN, correspondence_check, default_omega_grid
from .workers import ordered_map

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CHECK = 2
EXIT_IO = 3


def _grid(args, run: RunConfig) -> np.ndarray:
    if args.grid:
        return parse_grid(args.grid)
    grid = run.omega_grid()
    if grid is None:
        grid = default_omega_grid(run.bundle)
    return grid


def _grid_spec(grid: np.ndarray) -> List[float]:
    return [float(grid[0]), float(grid[-1]), int(grid.size)]


def _check_mode(mode: str, run: RunConfig) -> None:
    """Report mode and model conflicts before any compute starts."""
    bundle = run.bundle
    if mode == FINITE_TE and bundle.has_transfer():
        raise ConfigError("--mode", "finite-te closed forms do not support model.coherence_transfer")
    if mode == ORACLE and bundle.field.entanglement_time <= 0:
        raise ConfigError("--mode", "oracle mode samples the field correlators and needs field.entanglement_time > 0")


def _engine(mode: str, args):
    if mode == SHORT_TE:
        return signal_short_te
    if mode == FINITE_TE:
        return signal_finite_te_rephasing

    def oracle(grid, delay, bundle):
        return brute_force_signal(
            grid,
            delay,
            bundle,
            include_autocorrelation=args.include_autocorrelation,
            workers=args.threads,
        )

    return oracle


def _finish(manifest: RunManifest, anchor: str, started: float, outputs: List[str]) -> str:
    manifest.outputs = [os.path.abspath(p) for p in outputs]
    manifest.wall_time = round(time.time() - started, 3)
    return write_manifest(anchor, manifest)


def cmd_simulate(args) -> int:
    started = time.time()
    run = load_run_config(args.config)
    delays = parse_delays(args.dt)
    grid = _grid(args, run)
    _check_mode(args.mode, run)
    engine = _engine(args.mode, args)
    flags: Dict[str, object] = {"dt": delays, "mode": args.mode, "grid": _grid_spec(grid)}
    if args.mode == ORACLE:
        flags["include_autocorrelation"] = bool(args.include_autocorrelation)
    key = run_key(run.digest, "simulate", flags)
    log_event(f"simulate: {len(delays)} delay(s), {grid.size} frequencies, mode {args.mode}", echo=True)

    if args.mode == ORACLE:
        spectra = [engine(grid, d, run.bundle) for d in delays]
    else:
        spectra = ordered_map(lambda d: engine(grid, d, run.bundle), delays, args.threads)

    outputs = []
    warnings: List[str] = []
    for i, (delay, spec) in enumerate(zip(delays, spectra)):
        path = os.path.join(args.out, f"signal_{i:03d}.tsv")
        outputs.append(write_spectrum(path, spec, key))
        warnings += [f"delay {delay:g}: {w}" for w in spec.meta.get("warnings", [])]
    for w in warnings:
        log_event(f"warning: {w}", echo=True)
    manifest = RunManifest(run.source, run.digest, "simulate", flags, {"omega": _grid_spec(grid)}, key, warnings=warnings)
    sidecar = _finish(manifest, os.path.join(args.out, "simulate"), started, outputs)
    log_event(f"wrote {len(outputs)} table(s) and {sidecar}", echo=True)
    return EXIT_OK


def _pump_band_ok(bundle, wp: float, grid: np.ndarray) -> bool:
    widths = bundle.model.gamma_ge
    lo = float(np.min(bundle.system.w_e - GRID_MARGIN * widths))
    hi = float(np.max(bundle.system.w_e + GRID_MARGIN * widths))
    pump_side = wp - grid
    return bool(np.any((pump_side >= lo) & (pump_side <= hi)))


def cmd_sweep_pump(args) -> int:
    started = time.time()
    run = load_run_config(args.config)
    pumps = parse_sweep(args.wp)
    delay = parse_delays(args.dt)
    if len(delay) != 1:
        raise ConfigError("--dt", "sweep-pump takes a single delay")
    delay = delay[0]
    grid = _grid(args, run)
    outside = [wp for wp in pumps if not _pump_band_ok(run.bundle, wp, grid)]
    if outside:
        raise ConfigError("--wp", f"pump frequencies {outside} put omega_p - omega outside every absorption band")
    bundles = [revalidate(run.bundle.with_field(run.bundle.field.with_pump(float(wp)))) for wp in pumps]
    flags = {"wp": [float(p) for p in pumps], "dt": delay, "grid": _grid_spec(grid)}
    key = run_key(run.digest, "sweep-pump", flags)
    log_event(f"sweep-pump: {pumps.size} pump frequencies at delay {delay:g}", echo=True)
    rows = ordered_map(lambda b: difference_spectrum(grid, delay, b).values, bundles, args.threads)
    table = write_sweep(args.out, pumps, grid, np.vstack(rows), key, delay)
    manifest = RunManifest(
        run.source, run.digest, "sweep-pump", flags, {"omega": _grid_spec(grid), "omega_p": flags["wp"]}, key
    )
    sidecar = _finish(manifest, table, started, [table])
    log_event(f"wrote {table} and {sidecar}", echo=True)
    return EXIT_OK


def cmd_check_correspondence(args) -> int:
    started = time.time()
    run = load_run_config(args.config)
    delays = parse_delays(args.dt)
    grid = _grid(args, run)
    flags: Dict[str, object] = {"dt": delays, "grid": _grid_spec(grid)}
    if args.twod_pump is not None:
        flags["twod_pump"] = args.twod_pump
    if args.negate_2d:
        flags["negate_2d"] = True
    key = run_key(run.digest, "check-correspondence", flags)
    report = correspondence_check(
        grid,
        delays,
        run.bundle,
        twod_pump_frequency=args.twod_pump,
        negate_2d=args.negate_2d,
    )
    path = write_json(args.out, report_dict(report, key))
    manifest = RunManifest(run.source, run.digest, "check-correspondence", flags, {"omega": _grid_spec(grid)}, key)
    _finish(manifest, path, started, [path])
    for c in report.checks:
        state = "pass" if c.passed else "FAIL"
        print(f"delay {c.delay:g}: max deviation {c.max_deviation:.3e} at omega {c.argmax_omega:.6g} [{state}]")
    if not report.passed:
        failed = [c.delay for c in report.checks if not c.passed]
        raise CheckFailed(f"correspondence failed at delay(s) {failed}; see {path}")
    return EXIT_OK


def cmd_validate(args) -> int:
    run = load_run_config(args.config)
    system, model = run.bundle.system, run.bundle.model
    print(f"{run.source}: ok")
    print(f"  single states: {system.n_single}, double states: {system.n_double}")
    print(f"  registered coherences: {len(model.intra_coherences)}, coherence transfers: {len(model.coherence_transfer)}")
    print(f"  config hash: {run.digest}")
    return EXIT_OK


def cmd_show_example(args) -> int:
    if args.list or not args.name:
        for name in BUILTIN_CONFIGS:
            print(name)
        return EXIT_OK
    sys.stdout.write(builtin_config_text(args.name))
    return EXIT_OK


def _exit_code(exc: Exception) -> int:
    if isinstance(exc, (ValidationError, ConfigError)):
        return EXIT_INVALID
    if is_numerical(exc):
        return EXIT_CHECK
    if isinstance(exc, (ExportError, OSError)):
        return EXIT_IO
    return EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinphoton", description="Frequency-dispersed transmission spectra of entangled twin photons"
    )
    sub = parser.add_subparsers(dest="cmd")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="Run config JSON path or a built-in name (see show-example)")
    common.add_argument("--grid", help="Detected-frequency grid as start:stop:points (default: config grid or automatic)")
    common.add_argument("--threads", type=int, help="Worker threads (default: TWINPHOTON_THREADS or physical cores)")
    common.add_argument("--notify", action="store_true", help="Send a desktop notification when the run fails")

    p_sim = sub.add_parser("simulate", parents=[common], help="Write S(omega; delay) tables, one per delay")
    p_sim.add_argument("--dt", required=True, help="Comma-separated idler-signal delays")
    p_sim.add_argument("--mode", choices=[SHORT_TE, FINITE_TE, ORACLE], default=SHORT_TE)
    p_sim.add_argument("--out", default="twinphoton-out", help="Output directory")
    p_sim.add_argument("--include-autocorrelation", action="store_true", help="Oracle mode: also integrate the Sc terms")
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep-pump", parents=[common], help="Delta S(omega; delay) for a range of pump frequencies")
    p_sweep.add_argument("--wp", required=True, help="Pump frequencies as start:stop:step")
    p_sweep.add_argument("--dt", required=True, help="Delay")
    p_sweep.add_argument("--out", default="sweep.tsv", help="Output table")
    p_sweep.set_defaults(func=cmd_sweep_pump)

    p_check = sub.add_parser(
        "check-correspondence", parents=[common], help="Compare Delta S with the anti-diagonal of the 2D spectrum"
    )
    p_check.add_argument("--dt", required=True, help="Comma-separated delays")
    p_check.add_argument("--out", default="correspondence.json", help="Report path")
    p_check.add_argument("--twod-pump", type=float, help=argparse.SUPPRESS)
    p_check.add_argument("--negate-2d", action="store_true", help=argparse.SUPPRESS)
    p_check.set_defaults(func=cmd_check_correspondence)

    p_val = sub.add_parser("validate", parents=[common], help="Check a config without computing anything")
    p_val.set_defaults(func=cmd_validate)

    p_show = sub.add_parser("show-example", help="Print a shipped example config")
    p_show.add_argument("name", nargs="?", choices=list(BUILTIN_CONFIGS))
    p_show.add_argument("--list", action="store_true", help="List the shipped configs")
    p_show.set_defaults(func=cmd_show_example, notify=False)

    return parser


def main(argv: Optional[List[str]] = None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if not hasattr(args, "func"):
        parser.print_help()
        sys.exit(EXIT_INVALID)
    try:
        code = args.func(args)
    except Exception as e:
        report_failure(e, context=args.cmd, cli=True, desktop=getattr(args, "notify", False))
        sys.exit(_exit_code(e))
    sys.exit(code or EXIT_OK)


if __name__ == "__main__":
    main()
