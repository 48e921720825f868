"""Command-line interface.

Exit codes: 0 success, 1 invariant failure, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import ConfigError, HelicalNSError
from .helical import SpectralInterval, band_project, decompose, spectral_moment
from .io import (
    format_key_values,
    load_run_config,
    load_snapshot,
    read_snapshot_samples,
    snapshot_paths,
    write_diagnostics_csv,
    write_snapshot,
)
from .monitor import (
    DiagnosticsRecorder,
    EnsembleSpec,
    Schedule,
    attach_envelope,
    monitor_fields,
    probe_constants,
)
from .solver import SolverConfig, abc_flow, random_divfree, simulate, taylor_green
from .spectral import VOLUME, GridSpec

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("helicalns")


def _float_or_auto(text: str):
    if text == "auto":
        return text
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def _auto_c1() -> float:
    return probe_constants(EnsembleSpec(n=16, seed=0), 16).c1_hat


def _with_envelope(records, c1_hat):
    c1 = _auto_c1() if c1_hat == "auto" else c1_hat
    return attach_envelope(records, c1)


# --------------------------------------------------------------------------- subcommands


def cmd_simulate(args) -> int:
    cfg = load_run_config(args.config)
    grid = GridSpec(cfg.n)
    if cfg.init == "abc":
        v0 = abc_flow(cfg.abc_A, cfg.abc_B, cfg.abc_C, grid=grid)
    elif cfg.init == "taylor_green":
        v0 = taylor_green(grid=grid)
    else:
        v0 = random_divfree(cfg.slope, cfg.helicity_fraction, cfg.k_min, cfg.k_max, cfg.seed,
                            grid=grid)
    try:
        solver_cfg = SolverConfig(cfg.nu, cfg.t_end, cfg.dt_max, cfg.cfl, cfg.output_every)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    schedule = cfg.schedule(Path(args.config).parent)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counter = iter(range(10 ** 9))

    def save(state, entry):
        write_snapshot(out / f"snap_{next(counter):06d}.bin", state, cfg.nu)

    traj = simulate(solver_cfg, v0, [save], record=DiagnosticsRecorder(schedule, "auto"))
    write_diagnostics_csv(out / "diagnostics.csv", _with_envelope(traj.records, args.c1_hat))
    print(f"wrote {len(traj)} snapshots and diagnostics.csv to {out}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    try:
        cuts = sorted(float(x) for x in args.bands.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"--bands must be comma-separated numbers, got {args.bands!r}") from None
    snap = load_snapshot(args.input)
    d = decompose(snap.state.v)
    stem = Path(args.out) if args.out else Path(args.input).with_suffix("")
    edges = [-math.inf] + cuts + [math.inf]
    with open(f"{stem}.bands.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("lo", "hi", "energy", "helicity", "enstrophy"))
        for lo, hi in zip(edges, edges[1:]):
            band = band_project(d, SpectralInterval(lo, hi))
            w.writerow([format(x, ".17g") for x in (
                lo, hi, spectral_moment(band, 0, SpectralInterval()),
                spectral_moment(band, 1, SpectralInterval()),
                spectral_moment(band, 2, SpectralInterval()))])
    shells = np.rint(d.grid.kmag).astype(int)
    top = int(shells.max())
    e_plus = np.bincount(shells.ravel(), (VOLUME * np.abs(d.plus) ** 2).ravel(), top + 1)
    e_minus = np.bincount(shells.ravel(), (VOLUME * np.abs(d.minus) ** 2).ravel(), top + 1)
    with open(f"{stem}.spectrum.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("shell", "energy_plus", "energy_minus"))
        for s in range(1, top + 1):
            w.writerow((s, format(e_plus[s], ".17g"), format(e_minus[s], ".17g")))
    print(f"wrote {stem}.bands.csv and {stem}.spectrum.csv")
    return EXIT_OK


def cmd_monitor(args) -> int:
    try:
        schedule = Schedule.parse(args.a_schedule)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    paths = snapshot_paths(args.input)
    if not paths:
        raise FileNotFoundError(f"no snap_*.bin files in {args.input}")
    # order by stored time, not by file name
    paths.sort(key=lambda p: read_snapshot_samples(p)[2])
    fields = []
    for p in paths:
        state = load_snapshot(p).state
        fields.append((state.t, state.v))
    records = monitor_fields(fields, schedule, args.c5)
    out = Path(args.out) if args.out else Path(args.input) / "monitor.csv"
    write_diagnostics_csv(out, _with_envelope(records, args.c1_hat))
    print(f"wrote {out}")
    return EXIT_OK


def cmd_probe(args) -> int:
    if args.ensemble < 1:
        raise ConfigError("--ensemble must be >= 1")
    try:
        spec = EnsembleSpec(n=args.n, seed=args.seed, slope=args.slope)
        GridSpec(args.n)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    text = format_key_values(probe_constants(spec, args.ensemble).as_dict())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(n=args.n)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name}: {r.detail}")
    return EXIT_OK if all(r.ok for r in results) else EXIT_INVARIANT


# --------------------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="helicalns", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run a simulation from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--c1-hat", type=_float_or_auto, default="auto")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("decompose", help="band energies and helical spectra of a snapshot")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--bands", default="0")
    s.add_argument("--out", help="output prefix (default: snapshot path without suffix)")
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("monitor", help="recompute diagnostics from stored snapshots")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--a-schedule", default="const:0")
    s.add_argument("--c5", type=_float_or_auto, default="auto")
    s.add_argument("--c1-hat", type=_float_or_auto, default="auto")
    s.add_argument("--out")
    s.set_defaults(func=cmd_monitor)

    s = sub.add_parser("probe", help="probe the inequality constants on a random ensemble")
    s.add_argument("--n", type=int, default=32)
    s.add_argument("--ensemble", type=int, default=32)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--slope", type=float, default=-2.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_probe)

    s = sub.add_parser("verify", help="run the invariant suite")
    s.add_argument("--n", type=int, default=16)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except (HelicalNSError, FloatingPointError) as exc:
        log.error("invariant failure: %s", exc)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
