"""Tests for the two chain couplings, their invariants, and limit laws."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from growthsim.analysis import reg_inc_beta
from growthsim.couplings import (
    Absorbed,
    AbmState,
    AbYuleState,
    RandomStreams,
    ab_yule_ensemble,
    ab_yule_run,
    ab_yule_step,
    abm_ensemble,
    abm_run,
    abm_step,
    couple_check_report,
    stutter_waiting_times,
    yule_ratio_ensemble,
    yule_ratio_limit,
)
from growthsim.harness import ExperimentConfig, GridPoint, run_ensemble


class TestAbmState:
    def test_rates(self):
        state = AbmState(2, 3, 2)
        assert state.lambda_ab == pytest.approx(11.0)
        assert state.lambda_m == pytest.approx(6.0)
        assert state.big_lambda == pytest.approx(11.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            AbmState(-1, 2, 2)
        with pytest.raises(ValueError):
            AbmState(2, 2, -1)
        with pytest.raises(ValueError):
            AbmState(2, 2, 2, gamma=0.0)
        with pytest.raises(ValueError):
            AbmState(2, 2, 2, delta=-1.0)


class TestAbmStep:
    def test_low_band_grows_smaller_species_and_m(self):
        out = abm_step(AbmState(2, 3, 2), 0.05, 1.2)
        assert (out.a, out.b, out.m) == (3, 3, 3)
        assert out.t == pytest.approx(1.2 / 11.0)

    def test_top_band_annihilates_and_kills_m(self):
        out = abm_step(AbmState(2, 3, 2), 0.999, 0.5)
        assert (out.a, out.b, out.m) == (1, 2, 1)

    def test_middle_band_grows_larger_species_only(self):
        out = abm_step(AbmState(2, 3, 2), 0.45, 1.0)
        assert (out.a, out.b, out.m) == (2, 4, 2)

    def test_mirrored_state_grows_smaller_species_first(self):
        out = abm_step(AbmState(3, 2, 2), 0.05, 1.0)
        assert (out.a, out.b, out.m) == (3, 3, 3)

    def test_stutter_leaves_pair_moves_m(self):
        # Pair rate 3 versus M rate 12: the shared uniform can move M alone.
        state = AbmState(1, 1, 3)
        out = abm_step(state, 0.5, 2.0)
        assert (out.a, out.b) == (1, 1)
        assert out.m == 2
        assert out.t == pytest.approx(2.0 / 12.0)

    def test_fully_absorbed_state_raises(self):
        with pytest.raises(Absorbed):
            abm_step(AbmState(0, 0, 0), 0.5, 1.0)

    @given(
        a=st.integers(min_value=0, max_value=40),
        b=st.integers(min_value=0, max_value=40),
        extra=st.integers(min_value=0, max_value=10),
        xi=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
        gamma=st.sampled_from([0.5, 1.0, 2.0]),
        delta=st.sampled_from([0.5, 1.0, 2.0]),
    )
    @settings(max_examples=300)
    def test_dominance_invariant_preserved_by_any_step(
        self, a, b, extra, xi, gamma, delta
    ):
        m = min(a, b) + extra
        if a == 0 and b == 0 and m == 0:
            return
        state = AbmState(a, b, m, gamma=gamma, delta=delta)
        out = abm_step(state, xi, 1.0)
        assert min(out.a, out.b) <= out.m

    @given(
        a=st.integers(min_value=0, max_value=40),
        b=st.integers(min_value=0, max_value=40),
        extra=st.integers(min_value=0, max_value=10),
        xi=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
    )
    @settings(max_examples=200)
    def test_step_moves_each_chain_at_most_one(self, a, b, extra, xi):
        m = min(a, b) + extra
        if a == 0 and b == 0 and m == 0:
            return
        state = AbmState(a, b, m)
        out = abm_step(state, xi, 1.0)
        assert abs(out.m - m) <= 1
        assert abs(out.a - a) <= 1 and abs(out.b - b) <= 1
        assert (out.a - a) * (out.b - b) >= -0  # never one up and one down
        if out.a == a - 1:
            assert out.b == b - 1  # pair deaths are simultaneous


class TestAbYuleStep:
    def test_death_band(self):
        out = ab_yule_step(AbYuleState(3, 2, 3, 2), 0.1)
        assert (out.a, out.b, out.x, out.y) == (2, 1, 3, 2)
        assert out.m == 1
        assert out.k == 1

    def test_joint_growth_band_a_and_x(self):
        out = ab_yule_step(AbYuleState(3, 2, 3, 2), 0.60)
        assert (out.a, out.b, out.x, out.y) == (4, 2, 4, 2)

    def test_joint_growth_band_b_and_y(self):
        out = ab_yule_step(AbYuleState(3, 2, 3, 2), 0.90)
        assert (out.a, out.b, out.x, out.y) == (3, 3, 3, 3)

    def test_constant_after_pair_extinction(self):
        out = ab_yule_step(AbYuleState(0, 0, 3, 2), 0.4)
        assert (out.a, out.b, out.x, out.y) == (0, 0, 3, 2)
        assert out.k == 1 and out.m == 0

    @given(
        a=st.integers(min_value=1, max_value=40),
        b=st.integers(min_value=1, max_value=40),
        x=st.integers(min_value=0, max_value=40),
        y=st.integers(min_value=0, max_value=40),
        xi=st.floats(min_value=0.0, max_value=1.0, exclude_max=True),
    )
    @settings(max_examples=300)
    def test_death_branch_counts_m_and_stutters_pure_pair(self, a, b, x, y, xi):
        if x == 0 and y == 0:
            return
        state = AbYuleState(a, b, x, y)
        lam = a + b + a * b
        out = ab_yule_step(state, xi)
        assert out.k == 1
        if xi < a * b / lam:
            assert (out.a, out.b) == (a - 1, b - 1)
            assert (out.x, out.y) == (x, y)
            assert out.m == 1
        else:
            assert out.m == 0
            assert (out.a + out.b) == a + b + 1
            assert (out.x + out.y) == x + y + 1
            assert out.a in (a, a + 1) and out.x in (x, x + 1)


class TestRunsMatchStepFunctions:
    """The batch kernels replay exactly as pure-Python step loops."""

    @staticmethod
    def drive_abm(a0, b0, gamma, delta, seed, max_events=10**7):
        streams = RandomStreams(seed)
        state = AbmState(a0, b0, min(a0, b0), gamma=gamma, delta=delta)
        t_cons = 0.0 if min(a0, b0) == 0 else -1.0
        t_mext = 0.0 if state.m == 0 else -1.0
        violations = events = 0
        while events < max_events and (t_cons < 0.0 or t_mext < 0.0):
            if state.big_lambda <= 0.0:
                break
            xi = streams.uniform()
            eta = streams.exponential()
            state = abm_step(state, xi, eta)
            events += 1
            if min(state.a, state.b) > state.m:
                violations += 1
            if t_cons < 0.0 and min(state.a, state.b) == 0:
                t_cons = state.t
            if t_mext < 0.0 and state.m == 0:
                t_mext = state.t
        completed = t_cons >= 0.0 and t_mext >= 0.0
        return t_cons, t_mext, violations, events, completed

    @staticmethod
    def drive_ab_yule(a0, b0, seed, max_events=10**7):
        streams = RandomStreams(seed)
        state = AbYuleState(a0, b0, a0, b0)
        ab_hit = a0 == b0
        xy_hit = a0 == b0
        ab_done, xy_done = ab_hit, xy_hit
        ab_first_ok = True
        armed = state.x >= state.y
        violations = events = 0
        while events < max_events:
            if not ab_done and min(state.a, state.b) == 0:
                ab_done = True
            if not xy_done:
                gap = abs(state.x - state.y)
                if (gap + 1.0) ** 2 >= 50.0 * (state.x + state.y - 1):
                    xy_done = True
            if ab_done and xy_done:
                break
            if state.a + state.b + state.a * state.b <= 0 or max(state.x, state.y) == 0:
                xy_done = True
                break
            state = ab_yule_step(state, streams.uniform())
            events += 1
            if armed and state.x < state.y:
                armed = False
            if armed and state.x - state.y > state.a - state.b:
                violations += 1
            if state.x == state.y:
                xy_hit = True
                xy_done = True
            if not ab_done and state.a == state.b:
                ab_hit = True
                ab_done = True
                if not xy_hit:
                    ab_first_ok = False
        return ab_hit, xy_hit, ab_first_ok, violations, events, ab_done and xy_done

    def test_abm_parity(self):
        for seed in range(10):
            run = abm_run(3, 2, 1.0, 1.0, seed=seed)
            want = self.drive_abm(3, 2, 1.0, 1.0, seed)
            assert run.t_consensus == want[0]
            assert run.t_m_extinct == want[1]
            assert run.violations == want[2]
            assert run.events == want[3]
            assert run.completed == want[4]

    def test_ab_yule_parity(self):
        for seed in range(10):
            run = ab_yule_run(3, 2, seed=seed)
            want = self.drive_ab_yule(3, 2, seed)
            assert (
                run.ab_collision,
                run.xy_collision,
                run.first_ab_had_xy,
                run.violations,
                run.events,
                run.completed,
            ) == want

    def test_ab_yule_requires_ordered_start(self):
        with pytest.raises(ValueError):
            ab_yule_run(2, 3, seed=0)


class TestEnsembles:
    def test_abm_consensus_never_after_m_extinction(self):
        t_cons, t_mext, violations, _, done = abm_ensemble(
            50, 50, runs=2000, master_seed=5
        )
        assert int(violations.sum()) == 0
        both = done.astype(bool)
        assert both.all()
        assert np.all(t_cons[both] <= t_mext[both])

    def test_abm_seeded_reproducible(self):
        one = abm_ensemble(10, 10, runs=50, master_seed=9)
        two = abm_ensemble(10, 10, runs=50, master_seed=9)
        assert np.array_equal(one[0], two[0])
        assert np.array_equal(one[3], two[3])

    def test_ab_yule_invariants_hold(self):
        _, _, _, violations, _, done = ab_yule_ensemble(3, 2, runs=2000, master_seed=5)
        assert int(violations.sum()) == 0
        assert done.astype(bool).all()

    def test_pair_collision_frequency_near_half_from_two_one(self):
        runs = 20000
        _, xy_hit, _, _, _, _ = ab_yule_ensemble(2, 1, runs=runs, master_seed=2)
        freq = xy_hit.mean()
        want = 2.0 * reg_inc_beta(0.5, 2, 1)
        sigma = math.sqrt(want * (1 - want) / runs)
        assert abs(freq - want) <= 3 * sigma

    def test_annihilation_collision_identity_with_ties(self):
        # P(counts ever equal) = 2 P(minority wins) + P(joint extinction):
        # equality must be crossed for either, and the two absorptions are
        # exchangeable from an equal state.
        runs = 20000
        ab_hit, _, _, _, _, _ = ab_yule_ensemble(3, 2, runs=runs, master_seed=3)
        collision = ab_hit.mean()
        config = ExperimentConfig(
            kind="ab-consensus", points=(GridPoint(3, 2),), trials=runs, master_seed=17
        )
        (stats_out,), _ = run_ensemble(config)
        rhs = (2 * stats_out.wins_b + stats_out.ties) / runs
        sigma = math.sqrt(
            collision * (1 - collision) / runs + 4 * rhs * (1 - rhs) / runs
        )
        assert abs(collision - rhs) <= 3 * sigma


class TestYuleRatioLimit:
    def test_single_run_reproducible(self):
        one = yule_ratio_limit(1, 1, n_max=5000, seed=3)
        two = yule_ratio_limit(1, 1, n_max=5000, seed=3)
        assert one == two
        assert 0.0 < one.ratio < 1.0

    def test_uniform_limit_law(self):
        ratios, _ = yule_ratio_ensemble(1, 1, runs=10000, n_max=10**5, master_seed=0)
        result = stats.kstest(ratios, "uniform")
        assert result.pvalue > 0.01

    def test_three_one_limit_mean(self):
        runs = 4000
        ratios, _ = yule_ratio_ensemble(3, 1, runs=runs, n_max=10**5, master_seed=1)
        want = 0.75  # Beta(3, 1) mean
        se = ratios.std(ddof=1) / math.sqrt(runs)
        assert abs(ratios.mean() - want) <= 3 * se

    def test_equality_hits_match_tail_formula(self):
        runs = 20000
        _, hits = yule_ratio_ensemble(2, 1, runs=runs, n_max=10**4, master_seed=4)
        want = 2.0 * reg_inc_beta(0.5, 2, 1)
        sigma = math.sqrt(want * (1 - want) / runs)
        assert abs(hits.mean() - want) <= 3 * sigma


class TestStutterWaitingTimes:
    def test_exponential_law_at_frozen_state(self):
        state = AbmState(2, 3, 2)
        waits = stutter_waiting_times(state, 4000, seed=8)
        assert waits.shape == (4000,)
        rate = state.lambda_m
        result = stats.kstest(waits, "expon", args=(0, 1.0 / rate))
        assert result.pvalue > 0.01
        assert waits.mean() == pytest.approx(1.0 / rate, rel=0.1)

    def test_requires_mobile_m(self):
        with pytest.raises(ValueError):
            stutter_waiting_times(AbmState(2, 3, 0), 10)


class TestCoupleCheckReport:
    def test_full_report_clean(self):
        report = couple_check_report(
            a0=3,
            b0=2,
            runs=3000,
            master_seed=0,
            ratio_pair=(1, 1),
            ratio_n_max=2 * 10**4,
            stutter_waits=2000,
        )
        assert report["runs"] == 3000
        assert set(report["violations"]) == {
            "abm_min_le_m",
            "ab_yule_gap",
            "ab_first_collision_without_xy",
            "consensus_after_m_extinction",
        }
        assert all(v == 0 for v in report["violations"].values())
        assert report["completed"]["abm"] == 3000
        assert report["completed"]["ab_yule"] == 3000
        freqs = report["collision_frequencies"]
        assert 0.0 < freqs["ab_pair"] < freqs["xy_pair"] <= 1.0
        assert freqs["xy_law_2_i_half"] == pytest.approx(0.625)
        assert report["ks"]["beta_limit"]["pvalue"] > 0.01
        assert report["ks"]["stutter_exponential"]["pvalue"] > 0.01
        assert report["mean_times"]["consensus"] <= report["mean_times"]["m_extinction"]
