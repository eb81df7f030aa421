"""Seeded Monte-Carlo campaigns: single trials, axis sweeps, CSV/JSON output.

A trial draws one channel realization, designs the hybrid beamformers once,
and evaluates every requested method on that same realization (paired
comparison). Sweeps derive one modified config per axis value and aggregate
mean/std sum rates over trials; sub-seeds are split deterministically from
the master seed so results are reproducible row by row. Degenerate draws
(rank-deficient effective channel) are redrawn with the next sub-seed up to
a cap, and the redraw counts are carried into the JSON metadata.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bsa import apply_bsa, sd_oracle_beamformers
from .channel import draw_paths, generate_channel
from .config import SystemConfig, config_hash
from .metrics import RateReport, fully_digital_yardstick, sum_rate, sum_rate_sd_analog
from .omp import DegenerateChannelError, build_dictionaries, omp_hybrid_beamformer

METHODS = ("omp", "bsa_omp", "sd_oracle", "fully_digital")
HYBRID_METHODS = ("omp", "bsa_omp", "sd_oracle")

AXES = ("snr_db", "bandwidth_hz", "num_users")

CSV_COLUMNS = ("axis", "axis_value", "method", "mean_sum_rate", "std_sum_rate",
               "per_subcarrier_avg", "trials", "seed", "config_hash")


class RedrawExhausted(RuntimeError):
    """Every redraw attempt produced a degenerate channel."""


@dataclass
class SweepSpec:
    """One sweep campaign: an axis, its values, and the trial budget."""

    axis: str
    values: list[float]
    trials: int = 20
    methods: tuple[str, ...] = METHODS
    base_config: SystemConfig = field(default_factory=SystemConfig)
    seed: int = 1
    max_redraws: int = 10
    workers: int = 1

    def validate(self) -> "SweepSpec":
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one axis value")
        diffs = np.diff(np.asarray(self.values, dtype=float))
        if len(diffs) and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("axis values must be strictly monotone")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        self.base_config.validate()
        return self


@dataclass
class SweepRow:
    axis_value: float
    method: str
    mean_sum_rate: float
    std_sum_rate: float
    per_subcarrier_avg: float
    trials: int
    seed: int
    config_hash: str
    redraws: int = 0


@dataclass
class SweepResult:
    axis: str
    rows: list[SweepRow]
    base_config: dict = field(default_factory=dict)


@dataclass
class TrialResult:
    """Method -> RateReport map for one realization, plus redraw bookkeeping."""

    reports: dict[str, RateReport]
    redraws: int = 0


def run_trial(cfg: SystemConfig, trial_seed: int,
              methods: tuple[str, ...] = METHODS,
              max_redraws: int = 10) -> TrialResult:
    """Evaluate all requested methods on one seeded channel realization."""
    cfg.validate()
    hybrid_needed = any(m in HYBRID_METHODS for m in methods)
    dictionary = build_dictionaries(cfg) if hybrid_needed else None
    last_error: Exception | None = None
    for attempt in range(max_redraws + 1):
        rng = np.random.default_rng(np.random.SeedSequence([trial_seed, attempt]))
        paths = draw_paths(cfg, rng)
        channels = generate_channel(cfg, paths)
        try:
            reports: dict[str, RateReport] = {}
            bf = None
            if hybrid_needed:
                bf = omp_hybrid_beamformer(cfg, channels, dictionary)
            if "omp" in methods:
                reports["omp"] = sum_rate(channels, bf, "plain", cfg.P, cfg.sigma_n2,
                                          cfg.sinr_convention, seed=trial_seed)
            if "bsa_omp" in methods:
                bf = apply_bsa(channels, bf)
                reports["bsa_omp"] = sum_rate(channels, bf, "bsa", cfg.P, cfg.sigma_n2,
                                              cfg.sinr_convention, seed=trial_seed)
            if "sd_oracle" in methods:
                F_bar, F_BB_sd = sd_oracle_beamformers(channels, bf)
                reports["sd_oracle"] = sum_rate_sd_analog(
                    channels, bf.W_RF, F_bar, F_BB_sd, cfg.P, cfg.sigma_n2,
                    cfg.sinr_convention, seed=trial_seed)
            if "fully_digital" in methods:
                reports["fully_digital"] = fully_digital_yardstick(
                    channels, cfg.P, cfg.sigma_n2, seed=trial_seed)
            return TrialResult(reports=reports, redraws=attempt)
        except DegenerateChannelError as err:
            last_error = err
    raise RedrawExhausted(
        f"no usable channel after {max_redraws + 1} attempts (seed {trial_seed}): {last_error}"
    )


def config_for_axis_value(base: SystemConfig, axis: str, value: float) -> SystemConfig:
    """Derive the per-point config: SNR sweeps noise power at P = 1."""
    if axis == "snr_db":
        return base.replace(P=1.0, sigma_n2=10.0 ** (-value / 10.0)).validate()
    if axis == "bandwidth_hz":
        return base.replace(B=float(value)).validate()
    if axis == "num_users":
        k = int(value)
        if k != value:
            raise ValueError(f"num_users values must be integers, got {value}")
        return base.replace(K=k, N_RF=k).validate()
    raise ValueError(f"unknown axis {axis!r}")


def _trial_seed(master_seed: int, axis_index: int, trial_index: int) -> int:
    ss = np.random.SeedSequence([int(master_seed), int(axis_index), int(trial_index)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _sweep_task(args) -> tuple[int, int, TrialResult]:
    axis_index, trial_index, cfg, seed, methods, max_redraws = args
    result = run_trial(cfg, seed, methods, max_redraws)
    return axis_index, trial_index, result


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Run the full campaign and aggregate per (axis value, method).

    Channel draws are shared by all methods within a trial and independent
    across axis values; aggregation order is fixed by (axis value, trial
    index) so worker-pool execution cannot change the result.
    """
    spec.validate()
    tasks = []
    for ai, value in enumerate(spec.values):
        cfg = config_for_axis_value(spec.base_config, spec.axis, value)
        for ti in range(spec.trials):
            seed = _trial_seed(spec.seed, ai, ti)
            tasks.append((ai, ti, cfg, seed, tuple(spec.methods), spec.max_redraws))

    results: dict[tuple[int, int], TrialResult] = {}
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for ai, ti, res in pool.map(_sweep_task, tasks):
                results[(ai, ti)] = res
    else:
        for task in tasks:
            ai, ti, res = _sweep_task(task)
            results[(ai, ti)] = res

    rows: list[SweepRow] = []
    for ai, value in enumerate(spec.values):
        cfg = config_for_axis_value(spec.base_config, spec.axis, value)
        chash = config_hash(cfg)
        redraws = sum(results[(ai, ti)].redraws for ti in range(spec.trials))
        for method in spec.methods:
            rates = np.array([results[(ai, ti)].reports[method].sum_rate
                              for ti in range(spec.trials)])
            std = float(np.std(rates, ddof=1)) if spec.trials > 1 else 0.0
            rows.append(SweepRow(
                axis_value=float(value),
                method=method,
                mean_sum_rate=float(rates.mean()),
                std_sum_rate=std,
                per_subcarrier_avg=float(rates.mean() / cfg.M),
                trials=spec.trials,
                seed=spec.seed,
                config_hash=chash,
                redraws=redraws,
            ))
    return SweepResult(axis=spec.axis, rows=rows,
                       base_config=spec.base_config.to_dict())


def emit(result: SweepResult, fmt: str, path: str | Path | None = None) -> str:
    """Serialize a sweep to CSV or JSON; write to ``path`` when given."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(CSV_COLUMNS)
        for row in result.rows:
            writer.writerow([result.axis, row.axis_value, row.method,
                             repr(row.mean_sum_rate), repr(row.std_sum_rate),
                             repr(row.per_subcarrier_avg), row.trials, row.seed,
                             row.config_hash])
        text = buf.getvalue()
    elif fmt == "json":
        payload = {
            "axis": result.axis,
            "config": result.base_config,
            "rows": [
                {"axis": result.axis, "axis_value": r.axis_value, "method": r.method,
                 "mean_sum_rate": r.mean_sum_rate, "std_sum_rate": r.std_sum_rate,
                 "per_subcarrier_avg": r.per_subcarrier_avg, "trials": r.trials,
                 "seed": r.seed, "config_hash": r.config_hash, "redraws": r.redraws}
                for r in result.rows
            ],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}; use 'csv' or 'json'")
    if path is not None:
        Path(path).write_text(text)
    return text


def load_sweep_json(source: str | Path) -> SweepResult:
    """Re-parse a JSON emission back into an equal SweepResult."""
    payload = json.loads(Path(source).read_text())
    rows = [SweepRow(
        axis_value=r["axis_value"], method=r["method"],
        mean_sum_rate=r["mean_sum_rate"], std_sum_rate=r["std_sum_rate"],
        per_subcarrier_avg=r["per_subcarrier_avg"], trials=r["trials"],
        seed=r["seed"], config_hash=r["config_hash"], redraws=r.get("redraws", 0),
    ) for r in payload["rows"]]
    return SweepResult(axis=payload["axis"], rows=rows, base_config=payload["config"])
