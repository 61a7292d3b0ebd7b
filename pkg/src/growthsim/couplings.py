"""Coupled-chain constructions used to validate the consensus analysis.

Two couplings are realized as pure step functions plus fast ensemble
runners:

* `abm_step`: the annihilation pair (A, B) is driven together with a
  single-species chain M (birth rate gamma*M, death rate delta*M^2) by one
  uniform xi and one unit exponential eta per step, both chains reading the
  same xi against their own rate intervals under the shared normalizer
  Lambda = max(lambda(A,B), lambda(M)).  Invariant: min(A, B) <= M.

* `ab_yule_step`: the embedded jump chain of (A, B) (unit rates) is driven
  together with a pure duplication pair (X, Y) by one uniform per step.
  Death steps decrement both of A, B and stutter (X, Y); growth steps
  advance both pairs as urns.  Invariant: X - Y <= A - B while X >= Y has
  held at every step so far.

Step functions are deterministic in (state, draws), so invariants are
checkable per step and runs are replayable.  Ensemble runners delegate to
the jitted kernels, which consume draws in the same order (uniform first,
then the exponential where one is used); a Python loop over the step
functions with the same seed reproduces a kernel run exactly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import stats

from . import _kernels
from .analysis import reg_inc_beta
from .seeding import generator, trial_seeds

__all__ = [
    "Absorbed",
    "AbmState",
    "AbYuleState",
    "RandomStreams",
    "abm_step",
    "ab_yule_step",
    "AbmRunResult",
    "abm_run",
    "abm_ensemble",
    "AbYuleRunResult",
    "ab_yule_run",
    "ab_yule_ensemble",
    "YuleRatioResult",
    "yule_ratio_limit",
    "yule_ratio_ensemble",
    "stutter_waiting_times",
    "couple_check_report",
]


class Absorbed(ValueError):
    """The coupled state is absorbing; no step can be taken."""


@dataclass(frozen=True)
class AbmState:
    """State of the continuous-time coupling: pair (a, b), chain m, clock t.

    The normalizer is Lambda = max(lambda_ab, lambda_m); every step advances
    t by eta/Lambda whether or not either chain moves.
    """

    a: int
    b: int
    m: int
    t: float = 0.0
    gamma: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        if min(self.a, self.b, self.m) < 0:
            raise ValueError("counts must be non-negative")
        if self.gamma <= 0 or self.delta <= 0:
            raise ValueError("gamma and delta must be positive")

    @property
    def lambda_ab(self) -> float:
        return self.gamma * (self.a + self.b) + self.delta * self.a * self.b

    @property
    def lambda_m(self) -> float:
        return self.gamma * self.m + self.delta * self.m * self.m

    @property
    def big_lambda(self) -> float:
        return max(self.lambda_ab, self.lambda_m)


@dataclass(frozen=True)
class AbYuleState:
    """State of the discrete coupling: pair (a, b), pure pair (x, y).

    `k` counts steps taken and `m` counts death transitions; death steps
    leave x + y unchanged.
    """

    a: int
    b: int
    x: int
    y: int
    k: int = 0
    m: int = 0

    def __post_init__(self):
        if min(self.a, self.b, self.x, self.y) < 0:
            raise ValueError("counts must be non-negative")


@dataclass
class RandomStreams:
    """Seeded draw streams for stepping couplings by hand.

    One generator serves both streams; the per-step protocol is the uniform
    first, then the exponential (when the coupling uses one), matching the
    ensemble kernels draw for draw.
    """

    seed: int

    def __post_init__(self):
        self._rg = generator(int(self.seed) & (2**64 - 1))

    def uniform(self) -> float:
        return float(self._rg.random())

    def exponential(self) -> float:
        return float(self._rg.exponential(1.0))


def abm_step(state: AbmState, xi: float, eta: float) -> AbmState:
    """One coupled step driven by a uniform xi and a unit exponential eta.

    With lo = min(a, b) and hi the other (ties keep declaration order, so A
    moves first), the pair reads xi against [0, g*lo/L) for the smaller
    species' duplication, [g*lo/L, g*(lo+hi)/L) for the larger's, and
    [1 - d*a*b/L, 1) for the joint death; m reads the same xi against
    [0, g*m/L) and [1 - d*m^2/L, 1).  Anything else stutters; t always
    advances by eta/L.
    """
    if state.a == 0 and state.b == 0 and state.m == 0:
        raise Absorbed("state (0, 0, 0) is absorbing")
    g, d = state.gamma, state.delta
    lam = state.big_lambda
    a, b, m = state.a, state.b, state.m
    lo_is_a = a <= b
    lo, hi = (a, b) if lo_is_a else (b, a)
    glo = g * lo / lam
    ghi = g * hi / lam
    if xi < glo:
        if lo_is_a:
            a += 1
        else:
            b += 1
    elif xi < glo + ghi:
        if lo_is_a:
            b += 1
        else:
            a += 1
    elif xi >= 1.0 - d * state.a * state.b / lam:
        a -= 1
        b -= 1
    if state.m > 0:
        if xi < g * state.m / lam:
            m += 1
        elif xi >= 1.0 - d * state.m * state.m / lam:
            m -= 1
    return dataclasses.replace(state, a=a, b=b, m=m, t=state.t + eta / lam)


def ab_yule_step(state: AbYuleState, xi: float) -> AbYuleState:
    """One coupled jump-chain step driven by a single uniform xi.

    With lam = (a + b) + a*b: xi below a*b/lam is a death (a and b drop,
    x and y stutter, m increments); otherwise a grows iff xi < 1 - b/lam
    and x grows iff xi < 1 - ((a+b)/lam) * y/(x+y).  When either pair is
    fully extinct the process remains constant (the step still counts).
    """
    a, b, x, y = state.a, state.b, state.x, state.y
    if max(a, b) == 0 or max(x, y) == 0:
        return dataclasses.replace(state, k=state.k + 1)
    lam = float(a + b + a * b)
    if xi < a * b / lam:
        return dataclasses.replace(
            state, a=a - 1, b=b - 1, k=state.k + 1, m=state.m + 1
        )
    grow_x = xi < 1.0 - ((a + b) / lam) * (y / (x + y))
    if xi < 1.0 - b / lam:
        a += 1
    else:
        b += 1
    if grow_x:
        x += 1
    else:
        y += 1
    return dataclasses.replace(state, a=a, b=b, x=x, y=y, k=state.k + 1)


# --------------------------------------------------------------------------
# Run records and ensemble drivers (kernel-backed)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class AbmRunResult:
    """One coupled run: first consensus and M-extinction times.

    `violations` counts steps ending with min(a, b) > m (always 0 for a
    correct coupling); `completed` is False when the event cap struck first.
    """

    t_consensus: float
    t_m_extinct: float
    violations: int
    events: int
    completed: bool


def abm_run(
    a0: int,
    b0: int,
    gamma: float = 1.0,
    delta: float = 1.0,
    seed: int = 0,
    max_events: int = 10**7,
) -> AbmRunResult:
    """Run the continuous coupling until both questions resolve.

    M starts at min(a0, b0).  Reports the first time min(A, B) = 0 and the
    first time M = 0; under the coupling the former never exceeds the
    latter.
    """
    rg = generator(int(seed) & (2**64 - 1))
    t_cons, t_mext, viol, ev, done = _kernels.abm_run_kernel(
        rg, a0, b0, gamma, delta, max_events
    )
    return AbmRunResult(t_cons, t_mext, int(viol), int(ev), bool(done))


def abm_ensemble(
    a0: int,
    b0: int,
    gamma: float = 1.0,
    delta: float = 1.0,
    runs: int = 1000,
    master_seed: int = 0,
    max_events: int = 10**7,
):
    """Seeded ensemble of coupled runs; returns the kernel's result arrays.

    (t_consensus, t_m_extinct, violations, events, done), one entry per run,
    with per-run seeds derived from the master seed by index.
    """
    seeds = trial_seeds(master_seed, np.arange(runs))
    return _kernels.abm_batch(a0, b0, gamma, delta, seeds, ev_cap=max_events)


@dataclass(frozen=True)
class AbYuleRunResult:
    """One discrete-coupling run and its collision record.

    `ab_collision`: A = B happened; `xy_collision`: X = Y happened;
    `first_ab_had_xy`: at the first A = B step, X = Y had already occurred
    at some step up to and including it (vacuously True when A = B never
    happened).
    """

    ab_collision: bool
    xy_collision: bool
    first_ab_had_xy: bool
    violations: int
    events: int
    completed: bool


def ab_yule_run(
    a0: int, b0: int, seed: int = 0, max_events: int = 10**7
) -> AbYuleRunResult:
    """Run the discrete coupling until both collision questions resolve."""
    if a0 < b0:
        raise ValueError("requires a0 >= b0 (the pure pair starts at (a0, b0))")
    rg = generator(int(seed) & (2**64 - 1))
    ab_hit, xy_hit, first_ok, viol, ev, done = _kernels.ab_yule_run_kernel(
        rg, a0, b0, max_events
    )
    return AbYuleRunResult(
        bool(ab_hit), bool(xy_hit), bool(first_ok), int(viol), int(ev), bool(done)
    )


def ab_yule_ensemble(
    a0: int, b0: int, runs: int = 1000, master_seed: int = 0, max_events: int = 10**7
):
    """Seeded ensemble of discrete-coupling runs; kernel result arrays.

    (ab_hit, xy_hit, ab_first_ok, violations, events, done), one per run.
    """
    if a0 < b0:
        raise ValueError("requires a0 >= b0")
    seeds = trial_seeds(master_seed, np.arange(runs))
    return _kernels.ab_yule_batch(a0, b0, seeds, ev_cap=max_events)


@dataclass(frozen=True)
class YuleRatioResult:
    """Limit proxy for the pure pair: ratio x/(x+y) at total n_max."""

    ratio: float
    equality_hit: bool


def yule_ratio_limit(
    x0: int, y0: int, n_max: int = 10**6, seed: int = 0
) -> YuleRatioResult:
    """Grow the stutter-free pair to total n_max; the ratio approximates the
    almost-sure limit, which follows a Beta(x0, y0) law."""
    if x0 < 1 or y0 < 1:
        raise ValueError("x0 and y0 must be >= 1")
    if n_max < x0 + y0:
        raise ValueError("n_max must be at least the initial total")
    rg = generator(int(seed) & (2**64 - 1))
    x, y, hit = _kernels._yule_ratio_run(rg, x0, y0, n_max)
    return YuleRatioResult(x / (x + y), bool(hit))


def yule_ratio_ensemble(
    x0: int, y0: int, runs: int = 10000, n_max: int = 10**6, master_seed: int = 0
):
    """Seeded ensemble of ratio limits; returns (ratios, equality_hits)."""
    seeds = trial_seeds(master_seed, np.arange(runs))
    return _kernels.yule_ratio_batch(x0, y0, seeds, n_max=n_max)


def stutter_waiting_times(
    state: AbmState, waits: int, seed: int = 0
) -> np.ndarray:
    """Waiting times between M moves with the state artificially frozen.

    Steps the coupling's clock and draws from a fixed state, never applying
    the moves, and records the accumulated time until each step whose xi
    falls in an M-move interval.  Those waits are exponential with rate
    lambda_m = gamma*m + delta*m^2 (each step moves M with probability
    lambda_m / Lambda and takes Exp(Lambda)/1 time).
    """
    if state.m <= 0:
        raise ValueError("the frozen state needs m > 0 so M can move")
    streams = RandomStreams(seed)
    lam = state.big_lambda
    g, d, m = state.gamma, state.delta, state.m
    up = g * m / lam
    down = 1.0 - d * m * m / lam
    out = np.empty(waits)
    for i in range(waits):
        acc = 0.0
        while True:
            xi = streams.uniform()
            acc += streams.exponential() / lam
            if xi < up or xi >= down:
                break
        out[i] = acc
    return out


def couple_check_report(
    a0: int = 3,
    b0: int = 2,
    runs: int = 10000,
    master_seed: int = 0,
    gamma: float = 1.0,
    delta: float = 1.0,
    ratio_pair: tuple[int, int] = (1, 1),
    ratio_n_max: int = 10**5,
    stutter_state: Mapping[str, int] | None = None,
    stutter_waits: int = 4000,
) -> dict:
    """Run both couplings and the limit-law checks; JSON-ready report.

    The report carries run and violation counts for both couplings,
    collision frequencies against their closed-form laws, and two
    Kolmogorov-Smirnov statistics: the ratio-limit sample against its
    Beta(x0, y0) law and the frozen-state M waiting times against the
    exponential law at rate lambda_m.
    """
    t_cons, t_mext, viol_abm, ev_abm, done_abm = abm_ensemble(
        a0, b0, gamma, delta, runs=runs, master_seed=master_seed
    )
    ab_hit, xy_hit, first_ok, viol_ay, ev_ay, done_ay = ab_yule_ensemble(
        a0, b0, runs=runs, master_seed=master_seed + 1
    )
    x0, y0 = ratio_pair
    ratios, eq_hits = yule_ratio_ensemble(
        x0, y0, runs=min(runs, 10000), n_max=ratio_n_max, master_seed=master_seed + 2
    )
    ks_beta = stats.kstest(ratios, lambda q: stats.beta.cdf(q, x0, y0))
    if stutter_state is None:
        stutter_state = {"a": 2, "b": 3, "m": 2}
    frozen = AbmState(gamma=gamma, delta=delta, **stutter_state)
    waits_sample = stutter_waiting_times(frozen, stutter_waits, seed=master_seed + 3)
    ks_stutter = stats.kstest(
        waits_sample, lambda q: stats.expon.cdf(q, scale=1.0 / frozen.lambda_m)
    )
    two_i_half = 2.0 * reg_inc_beta(0.5, max(x0, y0), min(x0, y0)) if x0 != y0 else 1.0
    return {
        "runs": int(runs),
        "violations": {
            "abm_min_le_m": int(viol_abm.sum()),
            "ab_yule_gap": int(viol_ay.sum()),
            "ab_first_collision_without_xy": int(runs - first_ok.sum()),
            "consensus_after_m_extinction": int((t_cons > t_mext).sum()),
        },
        "completed": {
            "abm": int(done_abm.sum()),
            "ab_yule": int(done_ay.sum()),
        },
        "collision_frequencies": {
            "ab_pair": float(ab_hit.mean()),
            "xy_pair": float(xy_hit.mean()),
            "xy_law_2_i_half": 2.0 * reg_inc_beta(0.5, max(a0, b0), min(a0, b0)),
            "ratio_pair_equality": float(eq_hits.mean()),
            "ratio_pair_law_2_i_half": two_i_half,
        },
        "ks": {
            "beta_limit": {
                "pair": [int(x0), int(y0)],
                "samples": int(len(ratios)),
                "statistic": float(ks_beta.statistic),
                "pvalue": float(ks_beta.pvalue),
            },
            "stutter_exponential": {
                "state": {"a": frozen.a, "b": frozen.b, "m": frozen.m},
                "rate": float(frozen.lambda_m),
                "waits": int(stutter_waits),
                "statistic": float(ks_stutter.statistic),
                "pvalue": float(ks_stutter.pvalue),
            },
        },
        "mean_times": {
            "consensus": float(t_cons.mean()),
            "m_extinction": float(t_mext.mean()),
        },
    }
