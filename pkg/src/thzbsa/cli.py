"""Command-line front-end.

Subcommands:
  simulate     run a Monte-Carlo sweep (snr / bandwidth / users) and emit
               CSV or JSON
  array-gain   emit the wideband array-gain curve of a steering beamformer
               over a probe-direction grid
  show-config  print the fully resolved configuration

Exit codes: 0 success, 2 configuration error, 3 numerical failure after the
redraw cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import channel
from .config import (ConfigError, PROFILE_TRIALS, PROFILES, build_config,
                     parse_config_file)
from .harness import METHODS, RedrawExhausted, SweepSpec, emit, run_sweep

AXIS_BY_SWEEP = {"snr": "snr_db", "bandwidth": "bandwidth_hz", "users": "num_users"}


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="flat key = value config file")
    parser.add_argument("--profile", choices=sorted(PROFILES), default="desk",
                        help="parameter preset (desk: CI scale, paper: full scale)")
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (overrides config file)")


def _resolve_config(args: argparse.Namespace):
    file_overrides = parse_config_file(args.config) if args.config else None
    cli_overrides = {"seed": args.seed} if args.seed is not None else None
    return build_config(args.profile, file_overrides, cli_overrides)


def _parse_values(raw: str, axis: str) -> list[float]:
    try:
        values = [float(v) for v in raw.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"cannot parse sweep values {raw!r}") from None
    if axis == "num_users" and any(v != int(v) for v in values):
        raise ConfigError("users sweep values must be integers")
    return values


def _parse_methods(raw: str) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in raw.split(",") if m.strip())
    unknown = set(methods) - set(METHODS)
    if unknown:
        raise ConfigError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
    return methods


DEFAULT_VALUES = {"snr": "-10,-5,0,5,10", "bandwidth": "1e9,10e9,30e9,50e9,70e9",
                  "users": "2,4,8"}


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    axis = AXIS_BY_SWEEP[args.sweep]
    values = _parse_values(args.values or DEFAULT_VALUES[args.sweep], axis)
    trials = args.trials if args.trials is not None else PROFILE_TRIALS[args.profile]
    spec = SweepSpec(
        axis=axis,
        values=values,
        trials=trials,
        methods=_parse_methods(args.methods),
        base_config=cfg,
        seed=args.seed if args.seed is not None else cfg.seed,
        workers=args.workers,
    )
    try:
        spec.validate()
    except ValueError as err:
        raise ConfigError(str(err)) from None
    result = run_sweep(spec)
    text = emit(result, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {args.out}")
    return 0


def cmd_array_gain(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if not 1 <= args.subcarrier <= cfg.M:
        raise ConfigError(f"--subcarrier must be in 1..{cfg.M}")
    m = args.subcarrier - 1
    u = channel.steering_vector(cfg.N_T, args.phi)
    grid = np.linspace(-1.0, 1.0, args.grid_points or 16 * cfg.N_T + 1)
    gains = channel.array_gain(u, grid, m, cfg)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["phi_bar", "gain"])
    for phi_bar, gain in zip(grid, gains):
        writer.writerow([repr(float(phi_bar)), repr(float(gain))])
    text = buf.getvalue()
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    return 0


def cmd_show_config(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    for key, value in cfg.to_dict().items():
        print(f"{key} = {value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thzbsa",
        description="Wideband THz hybrid beamforming simulator with "
                    "beam-split-aware baseband correction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo sweep")
    _add_config_options(sim)
    sim.add_argument("--sweep", choices=sorted(AXIS_BY_SWEEP), required=True)
    sim.add_argument("--values", type=str, default=None,
                     help="comma-separated axis values (default per sweep)")
    sim.add_argument("--trials", type=int, default=None,
                     help="Monte-Carlo trials per axis value (default per profile)")
    sim.add_argument("--methods", type=str, default=",".join(METHODS))
    sim.add_argument("--out", type=Path, default=None)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--workers", type=int, default=1,
                     help="trial worker processes (results independent of this)")
    sim.set_defaults(func=cmd_simulate)

    gain = sub.add_parser("array-gain", help="emit the array-gain curve")
    _add_config_options(gain)
    gain.add_argument("--phi", type=float, required=True,
                      help="beamformer design direction (sine space)")
    gain.add_argument("--subcarrier", type=int, required=True,
                      help="subcarrier index (1-based)")
    gain.add_argument("--grid-points", type=int, default=None,
                      help="probe grid size (default 16x oversampled)")
    gain.add_argument("--out", type=Path, default=None)
    gain.set_defaults(func=cmd_array_gain)

    show = sub.add_parser("show-config", help="print the resolved config")
    _add_config_options(show)
    show.set_defaults(func=cmd_show_config)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # fold "--values -10,0,10" into one token so negative lists parse
    for i, token in enumerate(argv[:-1]):
        if token == "--values":
            argv[i : i + 2] = [f"--values={argv[i + 1]}"]
            break
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except RedrawExhausted as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
