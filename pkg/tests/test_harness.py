"""Tests for ensemble orchestration, statistics, reports, and manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthsim.analysis import majority_failure_bound
from growthsim.harness import (
    EnsembleStats,
    ExperimentConfig,
    GridPoint,
    RunManifest,
    ab_diff_config,
    ab_time_grid_configs,
    emit_nand_sim,
    emit_report,
    nand_sim,
    parse_report,
    run_ensemble,
    wilson_interval,
)

Z95 = 1.959963984540054


def small_config(trials: int = 400, seed: int = 3) -> ExperimentConfig:
    points = (GridPoint(30, 30), GridPoint(40, 20), GridPoint(60, 0))
    return ExperimentConfig(
        kind="ab-sweep", points=points, trials=trials, master_seed=seed
    )


class TestGridPoint:
    def test_derived_fields(self):
        point = GridPoint(40, 20)
        assert point.n_init == 60
        assert point.diff == 20

    def test_validation(self):
        with pytest.raises(ValueError):
            GridPoint(-1, 2)
        with pytest.raises(ValueError):
            GridPoint(0, 0)
        with pytest.raises(ValueError):
            GridPoint(1, 1, gamma=0.0)
        with pytest.raises(ValueError):
            GridPoint(1, 1, delta=-1.0)


class TestWilsonInterval:
    def test_textbook_value(self):
        lo, hi = wilson_interval(50, 100)
        z2 = Z95 * Z95
        center = (0.5 + z2 / 200) / (1 + z2 / 100)
        half = (
            Z95
            * math.sqrt(0.25 / 100 + z2 / (4 * 100 * 100))
            / (1 + z2 / 100)
        )
        assert lo == pytest.approx(center - half, abs=1e-12)
        assert hi == pytest.approx(center + half, abs=1e-12)

    @given(
        trials=st.integers(min_value=1, max_value=100000),
        data=st.data(),
    )
    @settings(max_examples=80)
    def test_contains_point_estimate(self, trials, data):
        wins = data.draw(st.integers(min_value=0, max_value=trials))
        lo, hi = wilson_interval(wins, trials)
        p_hat = wins / trials
        assert 0.0 <= lo <= p_hat <= hi <= 1.0

    def test_width_shrinks_like_inverse_root(self):
        widths = {}
        for trials in (100, 10000):
            lo, hi = wilson_interval(trials // 2, trials)
            widths[trials] = hi - lo
        ratio = widths[100] / widths[10000]
        assert ratio == pytest.approx(10.0, rel=0.05)


class TestEnsembleStats:
    @staticmethod
    def make(wins_a=5, wins_b=3, ties=1, no_consensus=1, trials=10):
        times = tuple(float(i + 1) for i in range(trials - no_consensus))
        return EnsembleStats(
            point=GridPoint(6, 4),
            trials=trials,
            wins_a=wins_a,
            wins_b=wins_b,
            ties=ties,
            no_consensus=no_consensus,
            times=times,
            bound=0.25,
        )

    def test_decided_denominator(self):
        stats = self.make()
        assert stats.decided == 8
        assert stats.wins_majority == 5
        assert stats.wins_minority == 3
        assert stats.p_hat == pytest.approx(5 / 8)

    def test_counts_must_sum(self):
        with pytest.raises(ValueError):
            self.make(wins_a=9)

    def test_times_length_checked(self):
        with pytest.raises(ValueError):
            EnsembleStats(
                point=GridPoint(6, 4),
                trials=4,
                wins_a=2,
                wins_b=1,
                ties=0,
                no_consensus=1,
                times=(1.0, 2.0),
                bound=0.0,
            )

    def test_merge_concatenates(self):
        one, two = self.make(), self.make(wins_a=4, wins_b=4, ties=2, no_consensus=0)
        merged = one.merge(two)
        assert merged.trials == 20
        assert merged.wins_a == 9
        assert merged.ties == 3
        assert merged.times == one.times + two.times

    def test_merge_rejects_mismatched_points(self):
        other = EnsembleStats(
            point=GridPoint(7, 3),
            trials=1,
            wins_a=1,
            wins_b=0,
            ties=0,
            no_consensus=0,
            times=(1.0,),
            bound=0.25,
        )
        with pytest.raises(ValueError):
            self.make().merge(other)

    @given(
        wins_a=st.integers(0, 40),
        wins_b=st.integers(0, 40),
        ties=st.integers(0, 10),
        split=st.integers(1, 79),
    )
    @settings(max_examples=60)
    def test_merge_is_commutative_in_counts(self, wins_a, wins_b, ties, split):
        trials = wins_a + wins_b + ties
        if trials < 2:
            return
        # split the same run set two ways and merge in both orders
        def stats_for(wa, wb, tt):
            n = wa + wb + tt
            return EnsembleStats(
                point=GridPoint(6, 4),
                trials=n,
                wins_a=wa,
                wins_b=wb,
                ties=tt,
                no_consensus=0,
                times=tuple(1.0 for _ in range(n)),
                bound=0.25,
            )

        left = stats_for(wins_a, 0, 0).merge(stats_for(0, wins_b, ties))
        right = stats_for(0, wins_b, ties).merge(stats_for(wins_a, 0, 0))
        assert left.wins_a == right.wins_a == wins_a
        assert left.decided == right.decided
        assert left.p_hat == right.p_hat or (
            math.isnan(left.p_hat) and math.isnan(right.p_hat)
        )

    def test_time_summaries(self):
        stats = self.make(no_consensus=0, trials=9)
        values = np.array(stats.times)
        assert stats.time_mean == pytest.approx(values.mean())
        assert stats.time_var == pytest.approx(values.var(ddof=1))
        assert stats.time_quantile(0.5) == pytest.approx(np.quantile(values, 0.5))


class TestRunEnsemble:
    def test_worker_count_invariance(self):
        config = small_config()
        single, _ = run_ensemble(config, workers=1)
        multi, _ = run_ensemble(config, workers=3)
        assert single == multi

    def test_deterministic_per_master_seed(self):
        one, _ = run_ensemble(small_config(seed=5))
        two, _ = run_ensemble(small_config(seed=5))
        other, _ = run_ensemble(small_config(seed=6))
        assert one == two
        assert one != other

    def test_bound_column_uses_ordered_tail(self):
        stats, _ = run_ensemble(small_config())
        by_point = {s.point: s for s in stats}
        assert by_point[GridPoint(40, 20)].bound == pytest.approx(
            majority_failure_bound(40, 20)
        )
        assert by_point[GridPoint(60, 0)].bound == 0.0

    def test_counts_and_times_consistent(self):
        stats, _ = run_ensemble(small_config())
        for s in stats:
            assert s.wins_a + s.wins_b + s.ties + s.no_consensus == s.trials
            assert len(s.times) == s.trials - s.no_consensus
            assert all(t >= 0.0 for t in s.times)

    def test_symmetric_point_splits_evenly(self):
        config = ExperimentConfig(
            kind="ab-sweep", points=(GridPoint(50, 50),), trials=4000, master_seed=0
        )
        (stats,), _ = run_ensemble(config)
        assert 0.45 <= stats.p_hat <= 0.55
        assert stats.ties > 0  # joint extinction is a real outcome


class TestReports:
    def test_emit_and_parse_round_trip(self, tmp_path):
        config = small_config()
        stats, manifest = run_ensemble(config)
        paths, manifest = emit_report(
            stats, manifest, fmt="both", out_dir=str(tmp_path)
        )
        names = {os.path.basename(p) for p in paths}
        assert names == {"stats.csv", "stats.json", "manifest.json"}
        restored = parse_report(str(tmp_path / "stats.json"))
        assert restored == tuple(stats)

    def test_sweep_csv_header(self, tmp_path):
        stats, manifest = run_ensemble(small_config())
        emit_report(stats, manifest, fmt="csv", out_dir=str(tmp_path))
        with open(tmp_path / "stats.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "n_init",
            "delta",
            "trials",
            "wins_majority",
            "p_hat",
            "ci_lo",
            "ci_hi",
            "bound",
        ]
        assert len(rows) == 1 + 3

    def test_time_grid_csv_header(self, tmp_path):
        config = ExperimentConfig(
            kind="ab-time-grid",
            points=(GridPoint(20, 20, gamma=0.5, delta=2.0),),
            trials=200,
            master_seed=1,
        )
        stats, manifest = run_ensemble(config)
        emit_report(stats, manifest, fmt="csv", out_dir=str(tmp_path))
        with open(tmp_path / "stats.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == [
            "gamma",
            "delta",
            "a0",
            "b0",
            "trials",
            "no_consensus",
            "t_mean",
            "t_var",
            "t_q10",
            "t_q50",
            "t_q90",
        ]
        assert float(rows[1][0]) == 0.5

    def test_manifest_checksums_files(self, tmp_path):
        stats, manifest = run_ensemble(small_config())
        paths, manifest = emit_report(
            stats, manifest, fmt="both", out_dir=str(tmp_path)
        )
        with open(tmp_path / "manifest.json", encoding="utf-8") as fh:
            recorded = json.load(fh)
        for path in paths:
            name = os.path.basename(path)
            if name == "manifest.json":
                continue
            with open(path, "rb") as fh:
                digest = hashlib.sha256(fh.read()).hexdigest()
            assert recorded["checksums"][name] == digest

    def test_report_regenerable_from_manifest(self, tmp_path):
        first_dir = tmp_path / "first"
        second_dir = tmp_path / "second"
        stats, manifest = run_ensemble(small_config())
        emit_report(stats, manifest, fmt="both", out_dir=str(first_dir))
        with open(first_dir / "manifest.json", encoding="utf-8") as fh:
            recorded = json.load(fh)
        saved = recorded["config"]
        config = ExperimentConfig(
            kind=saved["kind"],
            points=tuple(
                GridPoint(p["a0"], p["b0"], gamma=p["gamma"], delta=p["delta"])
                for p in saved["points"]
            ),
            trials=saved["trials"],
            master_seed=recorded["master_seed"],
        )
        stats2, manifest2 = run_ensemble(config)
        emit_report(stats2, manifest2, fmt="both", out_dir=str(second_dir))
        for name in ("stats.csv", "stats.json"):
            with open(first_dir / name, "rb") as fh:
                one = hashlib.sha256(fh.read()).hexdigest()
            with open(second_dir / name, "rb") as fh:
                two = hashlib.sha256(fh.read()).hexdigest()
            assert one == two, name


class TestExperimentBuilders:
    def test_ab_diff_default_shape(self):
        config = ab_diff_config()
        assert config.kind == "ab-sweep"
        totals = sorted({p.n_init for p in config.points})
        assert totals == [100, 1000, 10000]
        assert config.trials == 10000
        for n in totals:
            diffs = sorted(p.diff for p in config.points if p.n_init == n)
            assert len(diffs) == 21
            assert diffs[0] == 0
            cap = min(n, 8 * math.sqrt(n * math.log(n)))
            assert diffs[-1] <= cap + 2
            assert all(d % 2 == 0 for d in diffs)

    def test_ab_diff_rejects_odd_totals(self):
        with pytest.raises(ValueError):
            ab_diff_config(totals=(99,))

    def test_time_grid_shapes(self):
        rate_cfg, count_cfg = ab_time_grid_configs(grid_points=5, trials=10)
        assert rate_cfg.kind == "ab-time-grid"
        assert len(rate_cfg.points) == 25
        gammas = sorted({p.gamma for p in rate_cfg.points})
        assert gammas[0] == pytest.approx(0.01)
        assert gammas[-1] == pytest.approx(10.0)
        assert all(p.a0 == 100 and p.b0 == 100 for p in rate_cfg.points)
        assert count_cfg.kind == "ab-time-grid"
        counts = sorted({p.a0 for p in count_cfg.points})
        assert counts[0] == 1
        assert counts[-1] == 1000
        assert rate_cfg.master_seed != count_cfg.master_seed


class TestNandSim:
    def test_small_scale_structure_and_emit(self, tmp_path):
        results = nand_sim(
            samples=2,
            n_per_signal=20000,
            capacity=10**5,
            t_end=5.0,
            dt=1.0,
            master_seed=1,
        )
        assert [r.combo for r in results] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        for result in results:
            assert result.samples == 2
            assert set(result.names) >= {"Y0", "Y1"}
            assert len(result.times) == len(result.mean_counts)
            assert 0 <= result.dominance <= result.samples
            assert {result.correct_rail, result.wrong_rail} == {"Y0", "Y1"}
        manifest = RunManifest(
            command="nand-sim smoke",
            config={"samples": 2, "n_per_signal": 20000},
            master_seed=1,
        )
        paths, _ = emit_nand_sim(results, manifest, out_dir=str(tmp_path))
        names = {os.path.basename(p) for p in paths}
        assert names == {
            "nand-sim-a0b0.csv",
            "nand-sim-a0b1.csv",
            "nand-sim-a1b0.csv",
            "nand-sim-a1b1.csv",
            "nand-sim-summary.json",
            "manifest.json",
        }
        with open(tmp_path / "nand-sim-a0b0.csv", encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
        assert header[0] == "time"
        assert set(header[1:]) == {"A0", "A1", "B0", "B1", "Y0", "Y1"}

    def test_deterministic(self):
        kwargs = dict(
            samples=1, n_per_signal=5000, capacity=10**5, t_end=2.0, dt=1.0,
            master_seed=4,
        )
        one = nand_sim(**kwargs)
        two = nand_sim(**kwargs)
        assert [r.dominance for r in one] == [r.dominance for r in two]
        assert np.array_equal(one[0].mean_counts, two[0].mean_counts)
