"""Monte Carlo harness: deterministic ensembles, statistics, and reports.

Every trial draws its seed as mix64(master_seed, global_trial_index), so an
ensemble's results are a pure function of its configuration: worker counts,
chunk scheduling, and completion order cannot change a single bit of the
output.  Chunks are merged in trial-index order and the per-point statistics
merge associatively (counts add, time samples concatenate).

Three packaged experiments produce plot-ready CSV:

* consensus sweeps over initial counts (win probabilities against the
  analytical failure bound, Wilson intervals);
* consensus-time heatmap grids over the rate plane and the count plane;
* the conjugation-gate simulation at bacterial scale (tau-leaping under
  logistic growth), emitting mean rail trajectories per input combination.

Reports are CSV and JSON plus a manifest (resolved configuration, seed,
version, timestamp, and SHA-256 checksums of every emitted file) sufficient
to reproduce the run bit for bit.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__, _kernels
from .analysis import majority_failure_bound
from .crn import Configuration
from .engine import (
    Logistic,
    RecordAtInterval,
    SimulationOptions,
    TimeHorizon,
    simulate_tau_leap,
)
from .protocols import (
    CONJUGATION_GATE_TABLE,
    DualRailSignal,
    SignalSpec,
    biological_gate_assembly,
    make_signal,
)
from .seeding import mix64, trial_seeds

__all__ = [
    "GridPoint",
    "ExperimentConfig",
    "EnsembleStats",
    "RunManifest",
    "wilson_interval",
    "run_ensemble",
    "emit_report",
    "parse_report",
    "ab_diff_config",
    "ab_time_grid_configs",
    "NandSimResult",
    "nand_sim",
    "emit_nand_sim",
]

_CHUNK = 25_000
_WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class GridPoint:
    """One initial condition of the two-species consensus protocol."""

    a0: int
    b0: int
    gamma: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if self.a0 < 0 or self.b0 < 0 or self.a0 + self.b0 == 0:
            raise ValueError("counts must be non-negative and not both zero")
        if self.gamma <= 0 or self.delta <= 0:
            raise ValueError("rates must be positive")

    @property
    def n_init(self) -> int:
        return self.a0 + self.b0

    @property
    def diff(self) -> int:
        return abs(self.a0 - self.b0)


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved ensemble experiment.

    `kind` labels the experiment for report formatting; `t_cap` and
    `ev_cap` bound each trial (trials that hit a cap are counted as
    undecided, never folded into wins).
    """

    kind: str
    points: tuple[GridPoint, ...]
    trials: int
    master_seed: int = 0
    t_cap: float = math.inf
    ev_cap: int = 1 << 62
    out_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if not self.points:
            raise ValueError("at least one grid point is required")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def wilson_interval(wins: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = wins / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials))
    # The score bounds are exactly 0 and 1 at degenerate win counts; keep
    # them there instead of leaving rounding noise on the closed side.
    lo = 0.0 if wins == 0 else max(0.0, center - half)
    hi = 1.0 if wins == trials else min(1.0, center + half)
    return (lo, hi)


@dataclass(frozen=True)
class EnsembleStats:
    """Win counts and consensus-time sample for one grid point.

    `times` holds the absorption time of every terminated trial (winner
    or tie) in trial order; `ties` counts simultaneous extinctions
    and `no_consensus` counts trials stopped by a cap.  Ties and capped
    trials are reported separately and never folded into wins; `p_hat`
    and the Wilson interval are computed over the trials with a winner,
    which makes p_hat exactly symmetric around 1/2 at equal initial
    counts.  `bound` is the analytical minority-win bound for the point.
    Merging two stats objects gives exactly the stats of the
    concatenated runs.
    """

    point: GridPoint
    trials: int
    wins_a: int
    wins_b: int
    ties: int
    no_consensus: int
    times: tuple[float, ...]
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(self.times))
        if self.wins_a + self.wins_b + self.ties + self.no_consensus != self.trials:
            raise ValueError("outcome counts must sum to trials")
        if len(self.times) != self.trials - self.no_consensus:
            raise ValueError("times must cover exactly the decided trials")

    @property
    def wins_majority(self) -> int:
        return self.wins_a if self.point.a0 >= self.point.b0 else self.wins_b

    @property
    def wins_minority(self) -> int:
        return self.wins_b if self.point.a0 >= self.point.b0 else self.wins_a

    @property
    def decided(self) -> int:
        return self.wins_a + self.wins_b

    @property
    def p_hat(self) -> float:
        return self.wins_majority / self.decided if self.decided else math.nan

    def wilson(self) -> tuple[float, float]:
        if not self.decided:
            return (math.nan, math.nan)
        return wilson_interval(self.wins_majority, self.decided)

    @property
    def time_mean(self) -> float:
        return float(np.mean(self.times)) if self.times else math.nan

    @property
    def time_var(self) -> float:
        return float(np.var(self.times, ddof=1)) if len(self.times) > 1 else math.nan

    def time_quantile(self, q: float) -> float:
        return float(np.quantile(self.times, q)) if self.times else math.nan

    def merge(self, other: "EnsembleStats") -> "EnsembleStats":
        if other.point != self.point or other.bound != self.bound:
            raise ValueError("can only merge stats for the same grid point")
        return EnsembleStats(
            point=self.point,
            trials=self.trials + other.trials,
            wins_a=self.wins_a + other.wins_a,
            wins_b=self.wins_b + other.wins_b,
            ties=self.ties + other.ties,
            no_consensus=self.no_consensus + other.no_consensus,
            times=self.times + other.times,
            bound=self.bound,
        )


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run bit for bit.

    `checksums` maps emitted file names to SHA-256 digests; it is filled
    in by `emit_report`.
    """

    command: str
    config: Mapping
    master_seed: int
    version: str = __version__
    timestamp: str = ""
    checksums: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.timestamp:
            stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
            object.__setattr__(self, "timestamp", stamp)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=1, sort_keys=True)


def _consensus_chunk(args) -> tuple:
    """One chunk of consensus trials; pure function of its arguments."""
    a0, b0, gamma, delta, master_seed, lo, hi, t_cap, ev_cap = args
    seeds = trial_seeds(master_seed, np.arange(lo, hi))
    winner, t, _ev, _a, _b = _kernels.ab_consensus_batch(
        a0, b0, gamma, delta, seeds, t_cap=t_cap, ev_cap=ev_cap
    )
    decided = winner >= 0
    return (
        int((winner == 0).sum()),
        int((winner == 1).sum()),
        int((winner == 2).sum()),
        int((~decided).sum()),
        tuple(float(x) for x in t[decided]),
    )


def run_ensemble(
    config: ExperimentConfig, workers: int = 1
) -> tuple[tuple[EnsembleStats, ...], RunManifest]:
    """Run every grid point of the experiment; deterministic in the config.

    Trial i of point p uses seed mix64(master_seed, p * trials + i); chunks
    are merged in trial order, so any worker count yields identical output.
    """
    jobs = []
    for p_idx, point in enumerate(config.points):
        base = p_idx * config.trials
        for lo in range(0, config.trials, _CHUNK):
            hi = min(lo + _CHUNK, config.trials)
            jobs.append(
                (
                    p_idx,
                    lo,
                    (
                        point.a0,
                        point.b0,
                        point.gamma,
                        point.delta,
                        config.master_seed,
                        base + lo,
                        base + hi,
                        config.t_cap,
                        config.ev_cap,
                    ),
                )
            )
    results: dict[tuple[int, int], tuple] = {}
    if workers <= 1:
        for p_idx, lo, args in jobs:
            results[(p_idx, lo)] = _consensus_chunk(args)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_consensus_chunk, args): (p_idx, lo)
                for p_idx, lo, args in jobs
            }
            for fut, key in futures.items():
                results[key] = fut.result()
    stats: list[EnsembleStats] = []
    for p_idx, point in enumerate(config.points):
        hi, lo = max(point.a0, point.b0), min(point.a0, point.b0)
        bound = 0.0 if lo == 0 else majority_failure_bound(hi, lo)
        merged: EnsembleStats | None = None
        for lo in range(0, config.trials, _CHUNK):
            wa, wb, ties, nc, times = results[(p_idx, lo)]
            part = EnsembleStats(
                point=point,
                trials=wa + wb + ties + nc,
                wins_a=wa,
                wins_b=wb,
                ties=ties,
                no_consensus=nc,
                times=times,
                bound=bound,
            )
            merged = part if merged is None else merged.merge(part)
        assert merged is not None and merged.trials == config.trials
        stats.append(merged)
    manifest = RunManifest(
        command="library:run_ensemble",
        config=dataclasses.asdict(config),
        master_seed=config.master_seed,
    )
    return tuple(stats), manifest


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------

def _stats_to_dict(s: EnsembleStats) -> dict:
    return {
        "point": dataclasses.asdict(s.point),
        "trials": s.trials,
        "wins_a": s.wins_a,
        "wins_b": s.wins_b,
        "ties": s.ties,
        "no_consensus": s.no_consensus,
        "times": list(s.times),
        "bound": s.bound,
    }


def _stats_from_dict(d: Mapping) -> EnsembleStats:
    return EnsembleStats(
        point=GridPoint(**d["point"]),
        trials=d["trials"],
        wins_a=d["wins_a"],
        wins_b=d["wins_b"],
        ties=d["ties"],
        no_consensus=d["no_consensus"],
        times=tuple(d["times"]),
        bound=d["bound"],
    )


def _sweep_rows(stats: Sequence[EnsembleStats]) -> list[str]:
    rows = ["n_init,delta,trials,wins_majority,p_hat,ci_lo,ci_hi,bound"]
    for s in stats:
        lo, hi = s.wilson()
        rows.append(
            f"{s.point.n_init},{s.point.diff},{s.trials},{s.wins_majority},"
            f"{s.p_hat!r},{lo!r},{hi!r},{s.bound!r}"
        )
    return rows


def _grid_rows(stats: Sequence[EnsembleStats]) -> list[str]:
    rows = [
        "gamma,delta,a0,b0,trials,no_consensus,t_mean,t_var,t_q10,t_q50,t_q90"
    ]
    for s in stats:
        rows.append(
            f"{s.point.gamma!r},{s.point.delta!r},{s.point.a0},{s.point.b0},"
            f"{s.trials},{s.no_consensus},{s.time_mean!r},{s.time_var!r},"
            f"{s.time_quantile(0.1)!r},{s.time_quantile(0.5)!r},"
            f"{s.time_quantile(0.9)!r}"
        )
    return rows


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def emit_report(
    stats: Sequence[EnsembleStats],
    manifest: RunManifest,
    fmt: str = "both",
    out_dir: str = ".",
    basename: str = "stats",
) -> tuple[list[str], RunManifest]:
    """Write the stats as CSV and/or JSON plus the manifest.

    The CSV layout depends on the manifest's experiment kind: consensus
    sweeps use `n_init,delta,trials,wins_majority,p_hat,ci_lo,ci_hi,bound`;
    time grids use the gamma/delta/count columns with time moments and
    quantiles.  The JSON file mirrors the stats exactly and
    `parse_report` restores an equal object.  The manifest (with checksums
    of every file written here) lands alongside as `manifest.json`.
    """
    if fmt not in ("csv", "json", "both"):
        raise ValueError("fmt must be 'csv', 'json', or 'both'")
    os.makedirs(out_dir, exist_ok=True)
    kind = manifest.config.get("kind", "ab-sweep") if isinstance(manifest.config, Mapping) else "ab-sweep"
    paths: list[str] = []
    if fmt in ("csv", "both"):
        rows = _grid_rows(stats) if kind == "ab-time-grid" else _sweep_rows(stats)
        path = os.path.join(out_dir, f"{basename}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
        paths.append(path)
    if fmt in ("json", "both"):
        path = os.path.join(out_dir, f"{basename}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump([_stats_to_dict(s) for s in stats], fh, indent=1)
        paths.append(path)
    checksums = dict(manifest.checksums)
    checksums.update({os.path.basename(p): _sha256(p) for p in paths})
    final = dataclasses.replace(manifest, checksums=checksums)
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(final.to_json() + "\n")
    paths.append(manifest_path)
    return paths, final


def parse_report(path: str) -> tuple[EnsembleStats, ...]:
    """Read back a JSON stats report written by `emit_report`."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return tuple(_stats_from_dict(d) for d in data)


# --------------------------------------------------------------------------
# Packaged experiments
# --------------------------------------------------------------------------

def _even(x: float) -> int:
    return 2 * round(x / 2)


def ab_diff_config(
    totals: Iterable[int] = (100, 1000, 10000),
    delta_points: int = 21,
    trials: int = 10000,
    master_seed: int = 0,
    gamma: float = 1.0,
    delta: float = 1.0,
) -> ExperimentConfig:
    """Win-probability sweep over the initial count difference.

    For each total n the difference ranges over `delta_points` evenly
    spaced values from 0 to min(n, 8 * sqrt(n ln n)), rounded to even so
    the two initial counts are integers.
    """
    points: list[GridPoint] = []
    for n in totals:
        if n < 2 or n % 2:
            raise ValueError("totals must be even integers >= 2")
        top = min(n, 8.0 * math.sqrt(n * math.log(n)))
        diffs = sorted({_even(x) for x in np.linspace(0.0, top, delta_points)})
        for d in diffs:
            points.append(GridPoint((n + d) // 2, (n - d) // 2, gamma, delta))
    return ExperimentConfig(
        kind="ab-sweep", points=tuple(points), trials=trials, master_seed=master_seed
    )


def ab_time_grid_configs(
    grid_points: int = 12,
    trials: int = 1000,
    master_seed: int = 0,
    a0: int = 100,
    b0: int = 100,
    count_gamma: float = 0.01,
    count_delta: float = 1.0,
) -> tuple[ExperimentConfig, ExperimentConfig]:
    """Two consensus-time heatmap grids: the rate plane and the count plane.

    The first grid sweeps gamma and delta log-spaced over [1e-2, 1e1] at
    fixed initial counts; the second sweeps both initial counts log-spaced
    over [1, 1000] at gamma = 0.01, delta = 1.
    """
    rates = np.logspace(-2.0, 1.0, grid_points)
    rate_points = tuple(
        GridPoint(a0, b0, float(g), float(d)) for g in rates for d in rates
    )
    counts = sorted({int(round(c)) for c in np.logspace(0.0, 3.0, grid_points)})
    count_points = tuple(
        GridPoint(ca, cb, count_gamma, count_delta) for ca in counts for cb in counts
    )
    rate_cfg = ExperimentConfig(
        kind="ab-time-grid", points=rate_points, trials=trials, master_seed=master_seed
    )
    count_cfg = ExperimentConfig(
        kind="ab-time-grid",
        points=count_points,
        trials=trials,
        master_seed=mix64(master_seed, 1),
    )
    return rate_cfg, count_cfg


@dataclass(frozen=True)
class NandSimResult:
    """Mean rail trajectories and the dominance verdict for one input pair."""

    combo: tuple[int, int]
    names: tuple[str, ...]
    times: tuple[float, ...]
    mean_counts: tuple[tuple[float, ...], ...]
    dominance: int
    samples: int
    correct_rail: str
    wrong_rail: str


def _nand_sim_sample(args) -> tuple:
    gamma, delta, capacity, init_items, seed, t_end, dt = args
    sig_a = DualRailSignal.named("A")
    sig_b = DualRailSignal.named("B")
    sig_y = DualRailSignal.named("Y")
    system = biological_gate_assembly(sig_a, sig_b, sig_y, gamma, delta)
    opts = SimulationOptions(
        seed=seed,
        growth=Logistic(carrying_capacity=int(capacity)),
        sampling=RecordAtInterval(dt),
    )
    traj = simulate_tau_leap(system, dict(init_items), TimeHorizon(t_end), opts)
    return (
        tuple(traj.times.tolist()),
        tuple(map(tuple, traj.counts.tolist())),
        traj.names,
    )


def nand_sim(
    samples: int = 30,
    gamma: float = 0.016,
    delta: float = 1e-11,
    capacity: float = 1e9,
    n_per_signal: int = 250_000_000,
    error: float = 0.1,
    t_end: float = 30.0,
    dt: float = 0.5,
    master_seed: int = 0,
    workers: int = 1,
) -> list[NandSimResult]:
    """Tau-leaping runs of the conjugation gate at bacterial scale.

    Times are minutes.  For each of the four input pairs, `samples` seeded
    runs start from `n_per_signal` individuals per input signal (with the
    given wrong-rail error fraction) under logistic growth, and the result
    records the mean rail trajectories plus how many samples end with the
    correct output rail strictly ahead at `t_end`.
    """
    sig_a = DualRailSignal.named("A")
    sig_b = DualRailSignal.named("B")
    sig_y = DualRailSignal.named("Y")
    results: list[NandSimResult] = []
    jobs = []
    for c_idx, (a, b) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        init = {sig_y.rail0: 0, sig_y.rail1: 0}
        init.update(make_signal(sig_a, SignalSpec(n_per_signal, 0, a), error))
        init.update(make_signal(sig_b, SignalSpec(n_per_signal, 0, b), error))
        for s in range(samples):
            seed = mix64(master_seed, c_idx * samples + s)
            jobs.append(
                (
                    (a, b),
                    (gamma, delta, capacity, tuple(init.items()), seed, t_end, dt),
                )
            )
    outcomes: dict[int, tuple] = {}
    if workers <= 1:
        for j_idx, (_combo, args) in enumerate(jobs):
            outcomes[j_idx] = _nand_sim_sample(args)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_nand_sim_sample, args): j_idx
                for j_idx, (_combo, args) in enumerate(jobs)
            }
            for fut, j_idx in futures.items():
                outcomes[j_idx] = fut.result()
    table = [int(ch) for ch in CONJUGATION_GATE_TABLE]
    for c_idx, (a, b) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        y = table[2 * a + b]
        correct = sig_y.rail(y)
        wrong = sig_y.rail(1 - y)
        sample_counts = []
        times: tuple[float, ...] = ()
        names: tuple[str, ...] = ()
        dominance = 0
        for s in range(samples):
            t_row, counts, names = outcomes[c_idx * samples + s]
            times = t_row
            arr = np.asarray(counts, dtype=float)
            sample_counts.append(arr)
            ci = names.index(correct)
            wi = names.index(wrong)
            if arr[-1, ci] > arr[-1, wi]:
                dominance += 1
        mean = np.mean(sample_counts, axis=0)
        results.append(
            NandSimResult(
                combo=(a, b),
                names=names,
                times=times,
                mean_counts=tuple(map(tuple, mean.tolist())),
                dominance=dominance,
                samples=samples,
                correct_rail=correct,
                wrong_rail=wrong,
            )
        )
    return results


def emit_nand_sim(
    results: Sequence[NandSimResult],
    manifest: RunManifest,
    out_dir: str = ".",
) -> tuple[list[str], RunManifest]:
    """Write one mean-trajectory CSV per input pair plus a summary JSON.

    Each CSV has the columns `time,<rail counts...>`; the summary carries
    the dominance verdicts.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths: list[str] = []
    summary = []
    for res in results:
        a, b = res.combo
        path = os.path.join(out_dir, f"nand-sim-a{a}b{b}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("time," + ",".join(res.names) + "\n")
            for t, row in zip(res.times, res.mean_counts):
                fh.write(f"{t!r}," + ",".join(repr(v) for v in row) + "\n")
        paths.append(path)
        summary.append(
            {
                "combo": list(res.combo),
                "correct_rail": res.correct_rail,
                "wrong_rail": res.wrong_rail,
                "dominance": res.dominance,
                "samples": res.samples,
            }
        )
    spath = os.path.join(out_dir, "nand-sim-summary.json")
    with open(spath, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=1)
    paths.append(spath)
    checksums = dict(manifest.checksums)
    checksums.update({os.path.basename(p): _sha256(p) for p in paths})
    final = dataclasses.replace(manifest, checksums=checksums)
    manifest_path = os.path.join(out_dir, "manifest.json")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write(final.to_json() + "\n")
    paths.append(manifest_path)
    return paths, final
