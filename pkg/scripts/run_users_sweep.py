#!/usr/bin/env python3
"""Spectral efficiency vs number of users at a fixed SNR and bandwidth."""

import argparse
from pathlib import Path

from thzbsa import SweepSpec, build_config, emit, run_sweep
from thzbsa.config import PROFILE_TRIALS


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--profile", default="desk", choices=("desk", "paper"))
    ap.add_argument("--users", default="2,4,8")
    ap.add_argument("--snr-db", type=float, default=0.0)
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/users_sweep.csv"))
    args = ap.parse_args()

    cfg = build_config(args.profile).replace(
        P=1.0, sigma_n2=10.0 ** (-args.snr_db / 10.0)).validate()
    spec = SweepSpec(
        axis="num_users",
        values=[float(v) for v in args.users.split(",")],
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
        k = row.axis_value
        print(f"  K {int(k):2d}  {row.method:14s} sum {row.mean_sum_rate:9.2f} "
              f"per-user {row.mean_sum_rate / k:8.2f} bits/s/Hz")


if __name__ == "__main__":
    main()
