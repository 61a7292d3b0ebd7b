"""Stochastic simulation of a network: exact SSA and tau-leaping.

The exact method is the Gillespie direct method with a linear propensity
scan (reaction counts here are small; a dependency graph would be a future
optimization).  Tau-leaping bounds the expected relative propensity change
per leap by `tau_epsilon`, halves tau when a leap would drive a count
negative, and falls back to exact steps when the expected number of events
per leap drops below `tau_exact_switch`.

Stop conditions are small predicate trees.  `AnyOf` fires with its first
firing child in declaration order; `AllOf` fires when all children hold at
the same evaluation point.  Trees are compiled to disjunctive normal form
for the jitted kernels.  Conditions are evaluated at entry, after every
event (or leap), and at a time-horizon clamp; a time clause nested under
`AllOf` therefore fires at the first evaluation point at or past its
threshold rather than exactly at it.

A run whose total propensity reaches zero while only never-firing clauses
remain pending ends with a `DeadlockBeforeStop` marker in the trajectory's
terminal (reported, not raised).  If a plain time horizon is pending, the
frozen state simply coasts to it and the horizon fires.

Determinism contract: identical (network, initial configuration, stop,
seed) yields a bit-identical trajectory.  One simulator run owns one
`numpy.random.Generator` (PCG64) created from `SimulationOptions.seed`.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Mapping, Union

import numpy as np

from . import _kernels
from .crn import BirthSystem, Configuration, CountOverflow, Network
from .seeding import generator

__all__ = [
    "Extinction",
    "Consensus",
    "TargetCount",
    "TimeHorizon",
    "MaxEvents",
    "PopulationCap",
    "AnyOf",
    "AllOf",
    "StopCondition",
    "StopCheck",
    "UnboundedStop",
    "check_stop",
    "Pure",
    "Logistic",
    "GrowthModel",
    "RecordEveryEvent",
    "RecordAtInterval",
    "RecordAtStopOnly",
    "Sampling",
    "SimulationOptions",
    "DeadlockBeforeStop",
    "Terminal",
    "Trajectory",
    "simulate_exact",
    "simulate_tau_leap",
    "replay_event_log",
]

_INT64_MAX = 2**63 - 1
_EVENT_CHUNK = 1 << 16
_GRID_CHUNK = 4096
_DEFAULT_INTERVAL_SAMPLES = 512
_MAX_DNF_GROUPS = 64


# --------------------------------------------------------------------------
# Stop conditions
# --------------------------------------------------------------------------

def _names_tuple(species: Union[str, Iterable[str]]) -> tuple[str, ...]:
    if isinstance(species, str):
        return (species,)
    return tuple(species)


@dataclass(frozen=True)
class Extinction:
    """Fires when any listed species has count zero."""

    species: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "species", _names_tuple(self.species))
        if not self.species:
            raise ValueError("Extinction needs at least one species")

    def describe(self) -> str:
        return f"Extinction({','.join(self.species)})"


@dataclass(frozen=True)
class Consensus:
    """Fires when either species of the pair has count zero."""

    pair: tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "pair", _names_tuple(self.pair))
        if len(self.pair) != 2 or self.pair[0] == self.pair[1]:
            raise ValueError("Consensus needs two distinct species")

    def describe(self) -> str:
        return f"Consensus({self.pair[0]},{self.pair[1]})"


@dataclass(frozen=True)
class TargetCount:
    """Fires when the total count over the subset reaches the threshold."""

    species: tuple[str, ...]
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "species", _names_tuple(self.species))
        if not self.species:
            raise ValueError("TargetCount needs at least one species")
        if self.threshold < 0:
            raise ValueError("TargetCount threshold must be >= 0")

    def describe(self) -> str:
        return f"TargetCount({'+'.join(self.species)}>={self.threshold})"


@dataclass(frozen=True)
class TimeHorizon:
    """Fires at time t_max; trajectories clamp to it rather than pass it."""

    t_max: float

    def __post_init__(self):
        if not (self.t_max >= 0) or math.isnan(self.t_max):
            raise ValueError("TimeHorizon t_max must be >= 0")

    def describe(self) -> str:
        return f"TimeHorizon({self.t_max:g})"


@dataclass(frozen=True)
class MaxEvents:
    """Fires once the event count reaches k."""

    k: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError("MaxEvents k must be >= 0")

    def describe(self) -> str:
        return f"MaxEvents({self.k})"


@dataclass(frozen=True)
class PopulationCap:
    """Fires when the total population over all species reaches n_max."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError("PopulationCap n_max must be >= 0")

    def describe(self) -> str:
        return f"PopulationCap({self.n_max})"


@dataclass(frozen=True)
class AnyOf:
    """Disjunction; reports the first fired clause in declaration order."""

    clauses: tuple["StopCondition", ...]

    def __init__(self, *clauses):
        if len(clauses) == 1 and isinstance(clauses[0], (tuple, list)):
            clauses = tuple(clauses[0])
        object.__setattr__(self, "clauses", tuple(clauses))
        if not self.clauses:
            raise ValueError("AnyOf needs at least one clause")

    def describe(self) -> str:
        return f"AnyOf({'; '.join(c.describe() for c in self.clauses)})"


@dataclass(frozen=True)
class AllOf:
    """Conjunction; fires when every clause holds at the same check."""

    clauses: tuple["StopCondition", ...]

    def __init__(self, *clauses):
        if len(clauses) == 1 and isinstance(clauses[0], (tuple, list)):
            clauses = tuple(clauses[0])
        object.__setattr__(self, "clauses", tuple(clauses))
        if not self.clauses:
            raise ValueError("AllOf needs at least one clause")

    def describe(self) -> str:
        return f"AllOf({'; '.join(c.describe() for c in self.clauses)})"


StopCondition = Union[
    Extinction, Consensus, TargetCount, TimeHorizon, MaxEvents, PopulationCap, AnyOf, AllOf
]

_BOUNDING_LEAVES = (TimeHorizon, MaxEvents, PopulationCap)


class UnboundedStop(ValueError):
    """The stop condition admits trajectories that never terminate."""


def _is_bounded(stop: StopCondition) -> bool:
    if isinstance(stop, _BOUNDING_LEAVES):
        return True
    if isinstance(stop, AnyOf):
        return any(_is_bounded(c) for c in stop.clauses)
    if isinstance(stop, AllOf):
        return all(_is_bounded(c) for c in stop.clauses)
    return False


def _require_bounded(stop: StopCondition) -> None:
    if not _is_bounded(stop):
        raise UnboundedStop(
            "stop condition needs a bounding clause (TimeHorizon, MaxEvents, or "
            "PopulationCap): populations can grow without bound"
        )


@dataclass(frozen=True)
class StopCheck:
    """Result of `check_stop`: whether it fired and which clause did."""

    fired: bool
    clause: StopCondition | None = None


def check_stop(
    config: Configuration | Mapping[str, int],
    t: float,
    events: int,
    stop: StopCondition,
) -> StopCheck:
    """Pure predicate evaluation of a stop-condition tree.

    Disjunctions report the first fired clause in declaration order; a fired
    conjunction reports the `AllOf` node itself.
    """
    get = config.get if hasattr(config, "get") else config.__getitem__
    if isinstance(stop, Extinction):
        fired = any(get(name, 0) == 0 for name in stop.species)
        return StopCheck(fired, stop if fired else None)
    if isinstance(stop, Consensus):
        fired = any(get(name, 0) == 0 for name in stop.pair)
        return StopCheck(fired, stop if fired else None)
    if isinstance(stop, TargetCount):
        fired = sum(get(name, 0) for name in stop.species) >= stop.threshold
        return StopCheck(fired, stop if fired else None)
    if isinstance(stop, TimeHorizon):
        fired = t >= stop.t_max
        return StopCheck(fired, stop if fired else None)
    if isinstance(stop, MaxEvents):
        fired = events >= stop.k
        return StopCheck(fired, stop if fired else None)
    if isinstance(stop, PopulationCap):
        total = sum(v for v in getattr(config, "counts", config).values())
        fired = total >= stop.n_max
        return StopCheck(fired, stop if fired else None)
    if isinstance(stop, AnyOf):
        for clause in stop.clauses:
            sub = check_stop(config, t, events, clause)
            if sub.fired:
                return sub
        return StopCheck(False)
    if isinstance(stop, AllOf):
        if all(check_stop(config, t, events, c).fired for c in stop.clauses):
            return StopCheck(True, stop)
        return StopCheck(False)
    raise TypeError(f"not a stop condition: {stop!r}")


def _dnf(stop: StopCondition) -> list[list[StopCondition]]:
    if isinstance(stop, AnyOf):
        out: list[list[StopCondition]] = []
        for clause in stop.clauses:
            out.extend(_dnf(clause))
        return out
    if isinstance(stop, AllOf):
        out = []
        for combo in itertools.product(*(_dnf(c) for c in stop.clauses)):
            out.append([leaf for conj in combo for leaf in conj])
        return out
    return [[stop]]


# --------------------------------------------------------------------------
# Options
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Pure:
    """Unmodified mass-action kinetics."""

    def describe(self) -> str:
        return "Pure"


@dataclass(frozen=True)
class Logistic:
    """Scale duplication propensities by max(0, 1 - N/K).

    N is the total over `counted_species` (all species when None) and K the
    carrying capacity.  With `scale_all` the factor applies to every
    reaction instead of duplication-tagged ones only.
    """

    carrying_capacity: int
    counted_species: tuple[str, ...] | None = None
    scale_all: bool = False

    def __post_init__(self):
        if self.carrying_capacity < 1:
            raise ValueError("carrying capacity must be >= 1")
        if self.counted_species is not None:
            object.__setattr__(self, "counted_species", _names_tuple(self.counted_species))

    def describe(self) -> str:
        return f"Logistic(K={self.carrying_capacity})"


GrowthModel = Union[Pure, Logistic]


@dataclass(frozen=True)
class RecordEveryEvent:
    """Record every event (or leap) with its reaction firing counts."""


@dataclass(frozen=True)
class RecordAtInterval:
    """Record on a fixed time grid; dt=None means 512 even samples up to the
    time horizon (degrades to stop-only when no plain horizon is present)."""

    dt: float | None = None

    def __post_init__(self):
        if self.dt is not None and not (self.dt > 0):
            raise ValueError("sampling interval must be > 0")


@dataclass(frozen=True)
class RecordAtStopOnly:
    """Record the terminal state only."""


Sampling = Union[RecordEveryEvent, RecordAtInterval, RecordAtStopOnly]


@dataclass(frozen=True)
class SimulationOptions:
    """Per-run engine options; `seed` fixes the whole trajectory."""

    seed: int = 0
    growth: GrowthModel = field(default_factory=Pure)
    tau_epsilon: float = 0.03
    tau_exact_switch: int = 10
    sampling: Sampling = field(default_factory=RecordAtInterval)

    def __post_init__(self):
        if not (0.0 < self.tau_epsilon < 1.0):
            raise ValueError("tau_epsilon must be in (0, 1)")
        if self.tau_exact_switch < 0:
            raise ValueError("tau_exact_switch must be >= 0")


# --------------------------------------------------------------------------
# Trajectories
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DeadlockBeforeStop:
    """Total propensity hit zero with only never-firing clauses pending."""

    def describe(self) -> str:
        return "DeadlockBeforeStop"


@dataclass(frozen=True)
class Terminal:
    """Final state of a run: time, configuration, and what stopped it."""

    time: float
    config: Configuration
    fired: StopCondition | DeadlockBeforeStop


@dataclass
class Trajectory:
    """A simulated path: sampled states, terminal state, and event count.

    `times` and `counts` hold the samples (rows align; columns follow
    `names`).  In every-event sampling, `event_log[i]` gives the per-reaction
    firing counts between samples i and i+1, enabling exact replay.
    """

    names: tuple[str, ...]
    times: np.ndarray
    counts: np.ndarray
    terminal: Terminal
    event_count: int
    event_log: np.ndarray | None = None

    @property
    def samples(self) -> list[tuple[float, Configuration]]:
        return [
            (float(t), Configuration(dict(zip(self.names, map(int, row)))))
            for t, row in zip(self.times, self.counts)
        ]

    @property
    def deadlocked(self) -> bool:
        return isinstance(self.terminal.fired, DeadlockBeforeStop)

    def to_csv(self, target: Union[str, IO[str]]) -> None:
        """Write `time,<species names...>` rows for every sample."""
        close = False
        if isinstance(target, str):
            fh = open(target, "w", encoding="utf-8")
            close = True
        else:
            fh = target
        try:
            fh.write("time," + ",".join(self.names) + "\n")
            for t, row in zip(self.times, self.counts):
                fh.write(f"{float(t)!r}," + ",".join(str(int(c)) for c in row) + "\n")
        finally:
            if close:
                fh.close()

    def terminal_json(self) -> dict:
        """Terminal summary `{t_end, fired, events, counts}`."""
        fired = self.terminal.fired
        return {
            "t_end": self.terminal.time,
            "fired": fired.describe(),
            "events": self.event_count,
            "counts": {n: self.terminal.config[n] for n in self.names},
        }

    def write_terminal_json(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.terminal_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


# --------------------------------------------------------------------------
# Compilation to kernel arrays
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Compiled:
    names: tuple[str, ...]
    react: np.ndarray
    net: np.ndarray
    rates: np.ndarray
    dup: np.ndarray


def _compile_network(network: Network) -> _Compiled:
    names = network.names
    index = {n: i for i, n in enumerate(names)}
    n_r, n_s = len(network.reactions), len(names)
    react = np.zeros((n_r, n_s), dtype=np.int64)
    net = np.zeros((n_r, n_s), dtype=np.int64)
    rates = np.zeros(n_r)
    dup = np.zeros(n_r, dtype=np.uint8)
    for j, r in enumerate(network.reactions):
        for name, c in r.reactants.items():
            react[j, index[name]] = c
            net[j, index[name]] -= c
        for name, c in r.products.items():
            net[j, index[name]] += c
        rates[j] = r.rate_constant / network.volume
        dup[j] = 1 if r.tag == "duplication" else 0
    return _Compiled(names, react, net, rates, dup)


def _compile_growth(growth: GrowthModel, names: tuple[str, ...]):
    n_s = len(names)
    if isinstance(growth, Pure):
        return False, 1.0, np.ones(n_s, dtype=np.uint8), False
    counted = np.zeros(n_s, dtype=np.uint8)
    if growth.counted_species is None:
        counted[:] = 1
    else:
        index = {n: i for i, n in enumerate(names)}
        for name in growth.counted_species:
            if name not in index:
                raise ValueError(f"counted species {name!r} not in network")
            counted[index[name]] = 1
    return True, float(growth.carrying_capacity), counted, bool(growth.scale_all)


@dataclass(frozen=True)
class _StopProgram:
    kinds: np.ndarray
    masks: np.ndarray
    ithr: np.ndarray
    fthr: np.ndarray
    group: np.ndarray
    horizon: float
    reported: tuple[StopCondition | AllOf, ...]


def _compile_stop(stop: StopCondition, names: tuple[str, ...]) -> _StopProgram:
    index = {n: i for i, n in enumerate(names)}
    groups = _dnf(stop)
    if len(groups) > _MAX_DNF_GROUPS:
        raise ValueError("stop condition too complex: its DNF exceeds 64 alternatives")
    kinds, masks, ithr, fthr, group_ids, reported = [], [], [], [], [], []
    for g, conj in enumerate(groups):
        for leaf in conj:
            mask = np.zeros(len(names), dtype=np.uint8)
            ival, fval = 0, 0.0
            if isinstance(leaf, (Extinction, Consensus)):
                kind = 0
                species = leaf.species if isinstance(leaf, Extinction) else leaf.pair
                for name in species:
                    if name not in index:
                        raise ValueError(f"stop condition references unknown species {name!r}")
                    mask[index[name]] = 1
            elif isinstance(leaf, TargetCount):
                kind = 1
                for name in leaf.species:
                    if name not in index:
                        raise ValueError(f"stop condition references unknown species {name!r}")
                    mask[index[name]] = 1
                ival = leaf.threshold
            elif isinstance(leaf, TimeHorizon):
                kind = 2
                fval = leaf.t_max
            elif isinstance(leaf, MaxEvents):
                kind = 3
                ival = leaf.k
            elif isinstance(leaf, PopulationCap):
                kind = 4
                ival = leaf.n_max
            else:
                raise TypeError(f"not a stop leaf: {leaf!r}")
            kinds.append(kind)
            masks.append(mask)
            ithr.append(ival)
            fthr.append(fval)
            group_ids.append(g)
        reported.append(conj[0] if len(conj) == 1 else AllOf(*conj))
    horizon = _kernels._NO_TIME
    for conj in groups:
        if len(conj) == 1 and isinstance(conj[0], TimeHorizon):
            horizon = min(horizon, conj[0].t_max)
    return _StopProgram(
        kinds=np.array(kinds, dtype=np.int8),
        masks=np.array(masks, dtype=np.uint8).reshape(len(kinds), len(names)),
        ithr=np.array(ithr, dtype=np.int64),
        fthr=np.array(fthr, dtype=np.float64),
        group=np.array(group_ids, dtype=np.int32),
        horizon=horizon,
        reported=tuple(reported),
    )


def _initial_counts(
    system: Union[BirthSystem, Network],
    init: Configuration | Mapping[str, int] | None,
    names: tuple[str, ...],
) -> np.ndarray:
    if init is None:
        if isinstance(system, BirthSystem):
            init = system.initial_counts
        else:
            raise ValueError("an initial configuration is required for a plain Network")
    if not isinstance(init, Configuration):
        init = Configuration(init)
    unknown = set(init.counts) - set(names)
    if unknown:
        raise ValueError(f"initial configuration has unknown species {sorted(unknown)}")
    counts = np.zeros(len(names), dtype=np.int64)
    for i, name in enumerate(names):
        c = init[name]
        if c > _INT64_MAX:
            raise CountOverflow(f"initial count for {name!r} exceeds the engine's 64-bit range")
        counts[i] = c
    return counts


def _plan_grid(sampling: Sampling, horizon: float) -> tuple[int, Iterator[np.ndarray] | None]:
    """Choose the kernel sampling mode and a grid-chunk iterator for mode 1."""
    have_horizon = horizon < _kernels._NO_TIME

    def _with_sentinel(chunks: Iterable[np.ndarray]) -> Iterator[np.ndarray]:
        yield from chunks
        while True:
            yield np.array([_kernels._NO_TIME])

    if isinstance(sampling, RecordAtStopOnly):
        return 0, None
    if isinstance(sampling, RecordEveryEvent):
        return 2, None
    if isinstance(sampling, RecordAtInterval):
        if sampling.dt is None:
            if not have_horizon:
                return 0, None
            grid = np.linspace(
                horizon / _DEFAULT_INTERVAL_SAMPLES, horizon, _DEFAULT_INTERVAL_SAMPLES
            )
            return 1, _with_sentinel([grid])
        dt = sampling.dt
        if have_horizon:
            n_pts = int(math.floor(horizon / dt * (1.0 + 1e-12)))
            grid = dt * np.arange(1, n_pts + 1)
            grid = np.minimum(grid[grid <= horizon * (1.0 + 1e-12)], horizon)
            return 1, _with_sentinel([grid] if grid.size else [])

        def _open_chunks() -> Iterator[np.ndarray]:
            k = 0
            while True:
                yield dt * (k * _GRID_CHUNK + np.arange(1, _GRID_CHUNK + 1))
                k += 1

        return 1, _open_chunks()
    raise TypeError(f"not a sampling spec: {sampling!r}")


# --------------------------------------------------------------------------
# Simulation drivers
# --------------------------------------------------------------------------

def _simulate(
    method: str,
    system: Union[BirthSystem, Network],
    init: Configuration | Mapping[str, int] | None,
    stop: StopCondition,
    opts: SimulationOptions,
) -> Trajectory:
    network = system.network if isinstance(system, BirthSystem) else system
    compiled = _compile_network(network)
    names = compiled.names
    counts = _initial_counts(system, init, names)
    init_row = counts.copy()
    _require_bounded(stop)
    prog = _compile_stop(stop, names)
    log_on, log_k, counted, scale_all = _compile_growth(opts.growth, names)
    rg = generator(int(opts.seed) & (2**64 - 1))

    mode, chunk_iter = _plan_grid(opts.sampling, prog.horizon)
    n_r = len(network.reactions)
    log_width = 1 if method == "exact" else max(n_r, 1)

    times_parts: list[np.ndarray] = []
    counts_parts: list[np.ndarray] = []
    log_parts: list[np.ndarray] = []
    t, events = 0.0, 0
    empty_grid = np.empty(0)
    empty_t = np.empty(0)
    empty_c = np.empty((0, len(names)), dtype=np.int64)
    empty_j = np.empty((0, log_width), dtype=np.int64)

    while True:
        if mode == 1:
            grid = next(chunk_iter)
            cap = grid.shape[0] + 2
            rec_t = np.empty(cap)
            rec_c = np.empty((cap, len(names)), dtype=np.int64)
            rec_j = np.empty((0, log_width), dtype=np.int64)
        elif mode == 2:
            grid = empty_grid
            rec_t = np.empty(_EVENT_CHUNK)
            rec_c = np.empty((_EVENT_CHUNK, len(names)), dtype=np.int64)
            rec_j = np.empty((_EVENT_CHUNK, log_width), dtype=np.int64)
        else:
            grid, rec_t, rec_c, rec_j = empty_grid, empty_t, empty_c, empty_j

        args = (
            rg, counts, t, events,
            compiled.react, compiled.net, compiled.rates, compiled.dup,
            log_on, log_k, counted, scale_all,
            prog.kinds, prog.masks, prog.ithr, prog.fthr, prog.group, prog.horizon,
            mode, grid, 0, rec_t, rec_c, rec_j, 0,
        )
        if method == "exact":
            status, fired_group, t, events, grid_pos, rec_pos = _kernels.ssa_run(*args)
        else:
            status, fired_group, t, events, grid_pos, rec_pos = _kernels.tau_run(
                *args, opts.tau_epsilon, float(opts.tau_exact_switch)
            )

        if rec_pos:
            times_parts.append(rec_t[:rec_pos].copy())
            counts_parts.append(rec_c[:rec_pos].copy())
            if mode == 2:
                log_parts.append(rec_j[:rec_pos].copy())
        if status != _kernels.STATUS_BUFFER_FULL:
            break

    if status == _kernels.STATUS_DEADLOCK:
        fired: StopCondition | DeadlockBeforeStop = DeadlockBeforeStop()
    else:
        fired = prog.reported[fired_group]

    terminal_cfg = Configuration(dict(zip(names, map(int, counts))))
    terminal = Terminal(time=t, config=terminal_cfg, fired=fired)

    event_log: np.ndarray | None = None
    if mode == 0:
        times = np.array([t])
        rows = counts.reshape(1, -1).copy()
    else:
        times = np.concatenate([np.zeros(1)] + times_parts) if times_parts else np.zeros(1)
        rows = np.concatenate([init_row.reshape(1, -1)] + counts_parts, axis=0)
        if mode == 2:
            raw = (
                np.concatenate(log_parts, axis=0)
                if log_parts
                else np.empty((0, log_width), dtype=np.int64)
            )
            if method == "exact":
                event_log = np.zeros((raw.shape[0], n_r), dtype=np.int64)
                if raw.shape[0]:
                    event_log[np.arange(raw.shape[0]), raw[:, 0]] = 1
            else:
                event_log = raw
        if t > times[-1]:
            times = np.append(times, t)
            rows = np.concatenate([rows, counts.reshape(1, -1)], axis=0)

    return Trajectory(
        names=names,
        times=times,
        counts=rows,
        terminal=terminal,
        event_count=int(events),
        event_log=event_log,
    )


def simulate_exact(
    system: Union[BirthSystem, Network],
    init: Configuration | Mapping[str, int] | None,
    stop: StopCondition,
    opts: SimulationOptions | None = None,
) -> Trajectory:
    """Exact SSA run from `init` until `stop` fires (or deadlock is reported)."""
    return _simulate("exact", system, init, stop, opts or SimulationOptions())


def simulate_tau_leap(
    system: Union[BirthSystem, Network],
    init: Configuration | Mapping[str, int] | None,
    stop: StopCondition,
    opts: SimulationOptions | None = None,
) -> Trajectory:
    """Tau-leaping run from `init` until `stop` fires (or deadlock is reported)."""
    return _simulate("tau", system, init, stop, opts or SimulationOptions())


def replay_event_log(
    network: Network, init: Configuration | Mapping[str, int], trajectory: Trajectory
) -> np.ndarray:
    """Recompute sampled counts from the event log (every-event runs only).

    Returns the reconstructed counts for samples 1..M (M = log length); the
    caller compares them with `trajectory.counts[1:M+1]`.
    """
    if trajectory.event_log is None:
        raise ValueError("trajectory carries no event log (not run with RecordEveryEvent)")
    compiled = _compile_network(network)
    if not isinstance(init, Configuration):
        init = Configuration(init)
    start = np.array([init[n] for n in compiled.names], dtype=np.int64)
    deltas = trajectory.event_log @ compiled.net
    return start[None, :] + np.cumsum(deltas, axis=0)
