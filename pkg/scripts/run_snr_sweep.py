#!/usr/bin/env python3
"""Spectral efficiency vs SNR for all methods (paired Monte-Carlo trials)."""

import argparse
from pathlib import Path

from thzbsa import SweepSpec, build_config, emit, run_sweep
from thzbsa.config import PROFILE_TRIALS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--profile", default="desk", choices=("desk", "paper"))
    ap.add_argument("--snr-db", default="-10,-5,0,5,10")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/snr_sweep.csv"))
    args = ap.parse_args()

    cfg = build_config(args.profile)
    spec = SweepSpec(
        axis="snr_db",
        values=[float(v) for v in args.snr_db.split(",")],
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
        print(f"  SNR {row.axis_value:+6.1f} dB  {row.method:14s} "
              f"{row.mean_sum_rate:9.2f} +- {row.std_sum_rate:7.2f} bits/s/Hz")


if __name__ == "__main__":
    main()
