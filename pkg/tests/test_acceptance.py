"""Acceptance gate: one verdict line per shipped claim.

Each test exercises one externally checkable property of the package at its
stated scale and tolerance, and registers a PASS/FAIL line through
``record_criterion`` so the terminal summary shows the complete scorecard.
The criteria run in numeric order; the slowest ones (gate ensembles and the
10^5-run sweeps) stay under a few minutes on one core.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import scipy.integrate

from growthsim._kernels import m_extinction_batch
from growthsim.analysis import (
    bounds_audit,
    expected_extinction_time,
    reg_inc_beta,
    reg_inc_beta_exact,
)
from growthsim.couplings import ab_yule_ensemble, abm_ensemble
from growthsim.crn import Configuration, Network, Reaction
from growthsim.engine import (
    AnyOf,
    MaxEvents,
    RecordAtStopOnly,
    SimulationOptions,
    TargetCount,
    TimeHorizon,
    simulate_exact,
    simulate_tau_leap,
)
from growthsim.harness import (
    EnsembleStats,
    ExperimentConfig,
    GridPoint,
    ab_diff_config,
    nand_sim,
    run_ensemble,
)
from growthsim.protocols import (
    DualRailSignal,
    GateSpec,
    SignalSpec,
    gate_network,
    make_signal,
    read_signal,
)
from growthsim.seeding import mix64, trial_seeds

from conftest import record_criterion


def test_criterion_01_exact_beta_value():
    value = reg_inc_beta_exact(Fraction(3, 4), 6, 2)
    expected = Fraction(3645, 8192)
    ok = value == expected and value > Fraction(444, 1000)
    record_criterion(
        1,
        "exact beta value at (6,2)",
        ok,
        f"I_3/4(6,2) = {value} = {float(value)}",
    )


def test_criterion_02_beta_matches_quadrature():
    def oracle(z: float, a: int, b: int) -> float:
        def integrand(t: float) -> float:
            return t ** (a - 1) * (1.0 - t) ** (b - 1)

        # Integrate the head and the tail separately with a breakpoint at
        # the mode, then normalize by their sum; this keeps the adaptive
        # rule accurate even when the integrand spans dozens of decades.
        mode = (a - 1) / (a + b - 2) if a + b > 2 else 0.5

        def piece(lo: float, hi: float) -> float:
            pts = [mode] if lo < mode < hi else None
            val, _ = scipy.integrate.quad(
                integrand, lo, hi, epsabs=0.0, epsrel=1e-13, limit=300,
                points=pts,
            )
            return val

        head = piece(0.0, z)
        tail = piece(z, 1.0)
        return head / (head + tail)

    worst = 0.0
    points = 0
    for z in (0.1, 0.25, 0.5, 0.75, 0.9):
        for a in (1, 2, 3, 5, 8, 13, 21, 40):
            for b in (1, 2, 4, 7, 19):
                err = abs(reg_inc_beta(z, a, b) - oracle(z, a, b))
                worst = max(worst, err)
                points += 1
    ok = points == 200 and worst <= 1e-10
    record_criterion(
        2,
        "beta agrees with quadrature on 200-point grid",
        ok,
        f"max abs err {worst:.3e}",
    )


def test_criterion_03_beta_monotone_along_lattice():
    z = Fraction(3, 4)
    violations = 0
    checked = 0
    for y in range(1, 41):
        xs = set(range(3 * y, 3 * y + 11)) | {4 * y, 5 * y}
        for x in sorted(xs):
            lhs = reg_inc_beta_exact(z, x, y)
            rhs = reg_inc_beta_exact(z, x + 3, y + 1)
            checked += 1
            if lhs > rhs:
                violations += 1
    ok = violations == 0
    record_criterion(
        3,
        "beta monotone along the (+3,+1) lattice",
        ok,
        f"{checked} exact pairs, {violations} violations",
    )


def test_criterion_04_binomial_tail_under_gaussian_envelope():
    violations = 0
    checked = 0
    cross_checked = 0
    for m in (16, 64, 256, 1024):
        # Exact tail S / 2^N with S = sum_{j<m} C(N, j), N = 2m + d - 1,
        # advanced incrementally: S(N+1) = 2 S(N) - C(N, m-1).
        n_exp = 2 * m
        s = sum(math.comb(n_exp, j) for j in range(m))
        c = math.comb(n_exp, m - 1)
        for d in range(1, m + 1):
            tail = Fraction(s, 2**n_exp)
            envelope = Fraction(math.exp(-d * d / (8.0 * m)))
            checked += 1
            if tail > envelope:
                violations += 1
            if (m, d) in ((16, 3), (64, 17), (256, 100)):
                assert tail == reg_inc_beta_exact(Fraction(1, 2), m + d, m)
                cross_checked += 1
            s = 2 * s - c
            c = c * (n_exp + 1) // (n_exp + 2 - m)
            n_exp += 1
    ok = violations == 0 and cross_checked == 3
    record_criterion(
        4,
        "exact half tail below exp(-d^2/8m)",
        ok,
        f"{checked} exact points, {violations} violations",
    )


def test_criterion_05_pair_death_chain_extinction_time():
    runs = 100_000
    series_one = expected_extinction_time(1, 1.0, 1.0)
    series_ok = abs(series_one.value - 1.3179021514544) <= 1e-10
    details = []
    ok = series_ok
    for m0 in (1, 5, 20):
        seeds = trial_seeds(5000 + m0, np.arange(runs))
        t_end, _, extinct = m_extinction_batch(m0, 1.0, 1.0, seeds)
        assert bool(extinct.all())
        mean = float(t_end.mean())
        se = float(t_end.std(ddof=1)) / math.sqrt(runs)
        target = expected_extinction_time(m0, 1.0, 1.0).value
        ok = ok and abs(mean - target) <= 3.0 * se and mean <= 4.472715
        details.append(f"M0={m0}: {mean:.4f} vs {target:.4f} (se {se:.4f})")
    record_criterion(
        5,
        "extinction-time means match the series",
        ok,
        "; ".join(details),
    )


def test_criterion_06_minority_win_rate_below_beta_bound():
    trials = 100_000
    config = ExperimentConfig(
        kind="ab-sweep",
        points=(GridPoint(2, 1), GridPoint(60, 40), GridPoint(550, 450)),
        trials=trials,
        master_seed=606,
    )
    stats, _ = run_ensemble(config)
    ok = True
    details = []
    for st in stats:
        bound = reg_inc_beta(0.5, st.point.a0, st.point.b0)
        freq = st.wins_minority / st.trials
        sigma = math.sqrt(max(bound * (1.0 - bound), 1e-12) / st.trials)
        ok = ok and freq <= bound + 3.0 * sigma
        details.append(
            f"({st.point.a0},{st.point.b0}): {freq:.5f} <= {bound:.5f}+3s"
        )
    record_criterion(
        6,
        "minority win rate within the beta bound",
        ok,
        "; ".join(details),
    )


def test_criterion_07_win_probability_sweep():
    config = ab_diff_config()
    stats, _ = run_ensemble(config)
    by_total: dict[int, list[EnsembleStats]] = {}
    for st in stats:
        by_total.setdefault(st.point.a0 + st.point.b0, []).append(st)
    ok = True
    details = []
    for total, rows in sorted(by_total.items()):
        rows.sort(key=lambda st: st.point.a0 - st.point.b0)
        flat = rows[0].p_hat
        flat_ok = rows[0].point.a0 == rows[0].point.b0 and 0.48 <= flat <= 0.52
        monotone_ok = True
        for prev, cur in zip(rows, rows[1:]):
            if cur.p_hat < prev.p_hat:
                prev_lo, _ = prev.wilson()
                _, cur_hi = cur.wilson()
                if cur_hi < prev_lo:
                    monotone_ok = False
        target = 4.0 * math.sqrt(total * math.log(total))
        tail = [st for st in rows if st.point.a0 - st.point.b0 >= target]
        tail_ok = bool(tail) and tail[0].p_hat >= 0.99
        ok = ok and flat_ok and monotone_ok and tail_ok
        details.append(
            f"n={total}: p(0)={flat:.3f}, p(4sqrt)={tail[0].p_hat:.3f}"
            if tail
            else f"n={total}: no point past 4 sqrt(n ln n)"
        )
    record_criterion(
        7,
        "win probability rises with the initial difference",
        ok,
        "; ".join(details),
    )


def test_criterion_08_consensus_time_flat_across_scales():
    config = ExperimentConfig(
        kind="ab-time-grid",
        points=(GridPoint(50, 50), GridPoint(500, 500), GridPoint(5000, 5000)),
        trials=2000,
        master_seed=808,
    )
    stats, _ = run_ensemble(config)
    assert all(st.no_consensus == 0 for st in stats)
    means = [st.time_mean for st in stats]
    ratio = max(means) / min(means)
    ok = ratio < 2.0
    record_criterion(
        8,
        "mean consensus time varies below factor 2",
        ok,
        "means " + ", ".join(f"{m:.3f}" for m in means) + f"; ratio {ratio:.3f}",
    )


def test_criterion_09_coupling_invariants():
    runs = 1000
    _, _, abm_violations, _, abm_done = abm_ensemble(
        50, 50, runs=runs, master_seed=909
    )
    _, _, _, yule_violations, _, yule_done = ab_yule_ensemble(
        3, 2, runs=runs, master_seed=910
    )
    ok = (
        int(abm_violations.sum()) == 0
        and int(yule_violations.sum()) == 0
        and bool(abm_done.astype(bool).all())
        and bool(yule_done.astype(bool).all())
    )
    record_criterion(
        9,
        "coupled chains keep both pathwise inequalities",
        ok,
        f"{runs} runs each, violations {int(abm_violations.sum())} "
        f"and {int(yule_violations.sum())}",
    )


def test_criterion_10_pure_pair_collision_law():
    runs = 100_000
    _, xy_hit, _, _, _, _ = ab_yule_ensemble(2, 1, runs=runs, master_seed=101)
    freq = float(xy_hit.mean())
    sigma = math.sqrt(0.25 / runs)
    law_ok = abs(freq - 0.5) <= 3.0 * sigma

    ab_hit, _, _, _, _, _ = ab_yule_ensemble(3, 2, runs=runs, master_seed=102)
    p_ab = float(ab_hit.mean())
    sigma_ab = math.sqrt(max(p_ab * (1.0 - p_ab), 1e-12) / runs)
    config = ExperimentConfig(
        kind="ab-sweep",
        points=(GridPoint(3, 2),),
        trials=runs,
        master_seed=103,
    )
    (st,), _ = run_ensemble(config)
    pb = st.wins_minority / runs
    pt = st.ties / runs
    predicted = 2.0 * pb + pt
    var_pred = max(
        4.0 * pb * (1.0 - pb) + pt * (1.0 - pt) - 4.0 * pb * pt, 1e-12
    )
    sigma_pred = math.sqrt(var_pred / runs)
    tol = 3.0 * math.sqrt(sigma_ab**2 + sigma_pred**2)
    relation_ok = abs(p_ab - predicted) <= tol
    ok = law_ok and relation_ok
    record_criterion(
        10,
        "collision frequency obeys the doubling law",
        ok,
        f"(2,1): {freq:.5f} vs 0.5; (3,2): {p_ab:.5f} vs {predicted:.5f}",
    )


def test_criterion_11_ideal_gate_readout_and_gap():
    n = 10_000
    runs = 1000
    sig_a = DualRailSignal.named("A")
    sig_b = DualRailSignal.named("B")
    sig_y = DualRailSignal.named("Y")
    network = gate_network((sig_a, sig_b), sig_y, GateSpec("NAND"), gamma=1.0)
    stop = AnyOf((TargetCount(("Y0", "Y1"), n), MaxEvents(10**8)))
    ok = True
    details = []
    for a in (0, 1):
        for b in (0, 1):
            init: dict[str, int] = {}
            init.update(make_signal(sig_a, SignalSpec(n, 7000, a), 0.1))
            init.update(make_signal(sig_b, SignalSpec(n, 7000, b), 0.1))
            want = 1 - (a & b)
            correct = 0
            gaps = []
            for trial in range(runs):
                traj = simulate_exact(
                    network,
                    init,
                    stop,
                    SimulationOptions(
                        seed=mix64(1111, 4 * trial + 2 * a + b),
                        sampling=RecordAtStopOnly(),
                    ),
                )
                terminal = Configuration(traj.terminal.config)
                correct += read_signal(terminal, sig_y, theta=0.75) == want
                c0 = terminal.counts.get("Y0", 0)
                c1 = terminal.counts.get("Y1", 0)
                gaps.append(abs(c0 - c1))
            gap_median = float(np.median(gaps))
            combo_ok = correct >= 0.99 * runs and gap_median >= n / 16
            ok = ok and combo_ok
            details.append(f"({a},{b}): {correct}/{runs}, gap {gap_median:.0f}")
    record_criterion(
        11,
        "gate readout correct with a wide rail gap",
        ok,
        "; ".join(details),
    )


def test_criterion_12_bacterial_gate_dominance():
    results = nand_sim(samples=30)
    ok = True
    details = []
    for res in results:
        ok = ok and res.dominance >= 29
        details.append(f"{res.combo}: {res.dominance}/30")
    record_criterion(
        12,
        "conjugation gate dominates by half an hour",
        ok,
        "; ".join(details),
    )


def test_criterion_13_tau_leap_matches_exact_means():
    runs = 10_000
    network = Network.from_names(
        ("X",), (Reaction({"X": 1}, {"X": 2}, 1.0, tag="duplication"),)
    )
    stop = TimeHorizon(2.0)
    means = {}
    for label, simulate in (("exact", simulate_exact), ("tau", simulate_tau_leap)):
        total = 0
        for trial in range(runs):
            traj = simulate(
                network,
                {"X": 100},
                stop,
                SimulationOptions(
                    seed=mix64(1313 if label == "exact" else 1314, trial),
                    sampling=RecordAtStopOnly(),
                ),
            )
            total += traj.terminal.config["X"]
        means[label] = total / runs
    rel = abs(means["tau"] - means["exact"]) / means["exact"]
    ok = rel <= 0.05
    record_criterion(
        13,
        "tau-leap mean within 5% of exact",
        ok,
        f"exact {means['exact']:.1f}, tau {means['tau']:.1f}, rel {rel:.4f}",
    )


def test_criterion_14_audit_flags_printed_bound_violation():
    reports = {
        r.name: r for r in bounds_audit(kinds=("i34", "drop"), trials=100_000, seed=14)
    }
    i34 = reports["i34"]
    flagged = [
        p
        for p in i34.points
        if p.params.get("x") == 81 and p.params.get("y") == 19
    ]
    i34_ok = (
        len(flagged) == 1
        and not flagged[0].satisfied
        and i34.fraction_satisfied < 1.0
    )
    drop = reports["drop"]
    held = [
        p
        for p in drop.points
        if p.params.get("x0") == 85 and p.params.get("y0") == 15
    ]
    drop_ok = len(held) == 1 and held[0].satisfied
    ok = i34_ok and drop_ok
    record_criterion(
        14,
        "audit flags the known bound violation",
        ok,
        f"i34(81,19) satisfied={flagged[0].satisfied if flagged else '?'}; "
        f"drop(85,15) satisfied={held[0].satisfied if held else '?'}",
    )
