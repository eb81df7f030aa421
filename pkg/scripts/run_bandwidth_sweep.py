#!/usr/bin/env python3
"""Spectral efficiency vs system bandwidth at a fixed SNR."""

import argparse
from pathlib import Path

from thzbsa import SweepSpec, build_config, emit, run_sweep
from thzbsa.config import PROFILE_TRIALS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--profile", default="desk", choices=("desk", "paper"))
    ap.add_argument("--bandwidth-ghz", default="1,10,30,50,70,100")
    ap.add_argument("--snr-db", type=float, default=0.0)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/bandwidth_sweep.csv"))
    args = ap.parse_args()

    cfg = build_config(args.profile).replace(
        P=1.0, sigma_n2=10.0 ** (-args.snr_db / 10.0)).validate()
    spec = SweepSpec(
        axis="bandwidth_hz",
        values=[float(v) * 1e9 for v in args.bandwidth_ghz.split(",")],
        trials=args.trials or PROFILE_TRIALS[args.profile],
        base_config=cfg,
        seed=args.seed,
        workers=args.workers,
    )
    result = run_sweep(spec)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    emit(result, "csv", args.out)
    print(f"wrote {args.out}")
    for row in result.rows:
        print(f"  B {row.axis_value / 1e9:6.1f} GHz  {row.method:14s} "
              f"{row.mean_sum_rate:9.2f} +- {row.std_sum_rate:7.2f} bits/s/Hz")


if __name__ == "__main__":
    main()
