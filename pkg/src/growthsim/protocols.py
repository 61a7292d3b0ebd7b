"""Protocol constructors: amplifier, dual-rail logic gates, and circuits.

Every network built here is a birth system: each species carries an
obligatory duplication X -> 2X at a common rate gamma.  On top of that
base:

* the two-species amplifier adds the annihilation A + B -> 0, which drives
  the initially smaller species extinct and thereby amplifies the majority;
* the ideal two-input gate adds four catalytic logic reactions
  A^a + B^b -> A^a + B^b + Y^f(a,b), one per input combination;
* the conjugation-based variant adds five sender-preserving reactions
  (the receiver is consumed and converted) plus pairwise-annihilating
  amplifier reactions of the same sender-preserving shape.

Boolean values travel dual-rail: signal X is carried by species X0 and X1,
and a large majority on rail v reads as value v.  Circuits wire two-input
gates over dual-rail signals and are executed either layer by layer
(gate phase to a target output total, then an amplifier phase to consensus)
or as one combined network over a fixed time horizon.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .crn import (
    BirthSystem,
    Configuration,
    Network,
    Reaction,
    validate_birth_system,
)
from .engine import (
    AnyOf,
    Consensus,
    MaxEvents,
    RecordAtStopOnly,
    SimulationOptions,
    TargetCount,
    TimeHorizon,
    Trajectory,
    simulate_exact,
    simulate_tau_leap,
)
from .seeding import mix64

__all__ = [
    "SignalOverlap",
    "GapViolation",
    "CircuitParseError",
    "DualRailSignal",
    "SignalSpec",
    "GateSpec",
    "GATE_TABLES",
    "CONJUGATION_GATE_TABLE",
    "GateNode",
    "Circuit",
    "ab_network",
    "amplifier_network",
    "gate_network",
    "biological_gate_network",
    "biological_amplifier_reactions",
    "biological_gate_assembly",
    "make_signal",
    "read_signal",
    "PhaseRecord",
    "CircuitResult",
    "run_circuit",
    "xor_circuit",
    "parse_circuit",
    "format_circuit",
    "load_circuit",
    "save_circuit",
]


class SignalOverlap(ValueError):
    """Two signals that must be disjoint share a rail species."""


class GapViolation(ValueError):
    """Requested rail counts cannot satisfy the (n, delta) correctness gap."""


class CircuitParseError(ValueError):
    """A circuit description line could not be parsed."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {line!r}")


@dataclass(frozen=True)
class DualRailSignal:
    """A Boolean signal carried by two species, one per value.

    `rail0` holds the count voting for value 0 and `rail1` for value 1;
    the signal's total is the sum of both rails.
    """

    name: str
    rail0: str
    rail1: str

    def __post_init__(self):
        if self.rail0 == self.rail1:
            raise ValueError("rail species must be distinct")

    @classmethod
    def named(cls, name: str) -> "DualRailSignal":
        """Signal with the conventional rail names `<name>0` and `<name>1`."""
        return cls(name, f"{name}0", f"{name}1")

    @property
    def rails(self) -> tuple[str, str]:
        return (self.rail0, self.rail1)

    def rail(self, value: int) -> str:
        return self.rail1 if value else self.rail0


@dataclass(frozen=True)
class SignalSpec:
    """Initial-condition contract for a dual-rail signal.

    A signal is (n, delta)-correct with value v when its total is at least
    n and the wrong rail holds at most (n - delta)/2, which forces a rail
    gap of at least delta.
    """

    n: int
    delta: int
    value: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not 0 <= self.delta <= self.n:
            raise ValueError("delta must satisfy 0 <= delta <= n")
        if self.value not in (0, 1):
            raise ValueError("value must be 0 or 1")


_TABLE_ORDER = ((0, 0), (0, 1), (1, 0), (1, 1))

GATE_TABLES: Mapping[str, str] = {
    "NAND": "1110",
    "AND": "0001",
    "OR": "0111",
    "NOR": "1000",
    "XOR": "0110",
    "XNOR": "1001",
}

TruthTable = Union[str, Callable[[int, int], int], Mapping[tuple[int, int], int]]


def _normalize_table(table: TruthTable) -> tuple[int, int, int, int]:
    if isinstance(table, str):
        if table.upper() in GATE_TABLES:
            table = GATE_TABLES[table.upper()]
        if not re.fullmatch(r"[01]{4}", table):
            raise ValueError(
                "string truth table must be 4 bits in input order "
                "(0,0),(0,1),(1,0),(1,1), or a known gate name"
            )
        return tuple(int(ch) for ch in table)  # type: ignore[return-value]
    if callable(table):
        out = tuple(int(bool(table(a, b))) for a, b in _TABLE_ORDER)
        return out  # type: ignore[return-value]
    out = tuple(int(table[(a, b)]) for a, b in _TABLE_ORDER)
    if any(v not in (0, 1) for v in out):
        raise ValueError("truth table entries must be 0 or 1")
    return out  # type: ignore[return-value]


@dataclass(frozen=True)
class GateSpec:
    """A two-input Boolean function plus the logic-reaction rate constant.

    The table is stored as four bits in input order (0,0), (0,1), (1,0),
    (1,1); the constructor accepts that bit string, a gate name from
    GATE_TABLES, a callable, or a mapping.
    """

    truth_table: tuple[int, int, int, int]
    rate: float = 1.0

    def __init__(self, truth_table: TruthTable = "NAND", rate: float = 1.0):
        object.__setattr__(self, "truth_table", _normalize_table(truth_table))
        object.__setattr__(self, "rate", float(rate))
        if self.rate <= 0:
            raise ValueError("gate rate must be positive")

    def __call__(self, a: int, b: int) -> int:
        return self.truth_table[2 * int(a) + int(b)]

    @property
    def bits(self) -> str:
        return "".join(str(v) for v in self.truth_table)


# Truth table realized by the five-reaction conjugation gate below: only
# the (0, 0) input pair produces the 1 rail.
CONJUGATION_GATE_TABLE = "1000"


def _duplications(names: Iterable[str], gamma: float) -> list[Reaction]:
    return [Reaction({n: 1}, {n: 2}, gamma, tag="duplication") for n in names]


def _check_disjoint(*signals: DualRailSignal) -> None:
    seen: dict[str, str] = {}
    for sig in signals:
        for rail in sig.rails:
            if rail in seen:
                raise SignalOverlap(
                    f"species {rail!r} is shared by signals "
                    f"{seen[rail]!r} and {sig.name!r}"
                )
            seen[rail] = sig.name


def ab_network(gamma: float, delta: float) -> BirthSystem:
    """The two-species consensus protocol: duplications plus annihilation.

    Species A and B each duplicate at rate gamma and annihilate pairwise
    at rate delta; the first species to die out loses, so the network
    computes (with high probability) the initial majority.
    """
    if gamma <= 0 or delta <= 0:
        raise ValueError("gamma and delta must be positive")
    reactions = [
        Reaction({"A": 1}, {"A": 2}, gamma, tag="duplication"),
        Reaction({"B": 1}, {"B": 2}, gamma, tag="duplication"),
        Reaction({"A": 1, "B": 1}, {}, delta, tag="death"),
    ]
    net = Network.from_names(("A", "B"), reactions)
    return validate_birth_system(net, gamma, inputs=("A", "B"), outputs=("A", "B"))


def amplifier_network(signal: DualRailSignal, gamma: float, delta: float) -> BirthSystem:
    """The consensus protocol instantiated on a signal's two rails."""
    if gamma <= 0 or delta <= 0:
        raise ValueError("gamma and delta must be positive")
    r0, r1 = signal.rails
    reactions = [
        Reaction({r0: 1}, {r0: 2}, gamma, tag="duplication"),
        Reaction({r1: 1}, {r1: 2}, gamma, tag="duplication"),
        Reaction({r0: 1, r1: 1}, {}, delta, tag="death"),
    ]
    net = Network.from_names((r0, r1), reactions)
    return validate_birth_system(net, gamma, inputs=(r0, r1), outputs=(r0, r1))


def gate_network(
    inputs: tuple[DualRailSignal, DualRailSignal],
    output: DualRailSignal,
    spec: GateSpec,
    gamma: float,
) -> BirthSystem:
    """Catalytic two-input gate: four logic reactions plus six duplications.

    For each input pair (a, b) there is one reaction that regenerates both
    input rails and produces one copy of the output rail selected by the
    truth table.  Output rails start at zero.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    sig_a, sig_b = inputs
    _check_disjoint(sig_a, sig_b, output)
    logic = []
    for a, b in _TABLE_ORDER:
        ra, rb = sig_a.rail(a), sig_b.rail(b)
        ry = output.rail(spec(a, b))
        logic.append(
            Reaction({ra: 1, rb: 1}, {ra: 1, rb: 1, ry: 1}, spec.rate, tag="logic")
        )
    names = sig_a.rails + sig_b.rails + output.rails
    net = Network.from_names(names, logic + _duplications(names, gamma))
    return validate_birth_system(
        net,
        gamma,
        inputs=sig_a.rails + sig_b.rails,
        outputs=output.rails,
        initial_counts={output.rail0: 0, output.rail1: 0},
    )


def biological_gate_network(
    inputs: tuple[DualRailSignal, DualRailSignal],
    output: DualRailSignal,
    delta_conj: float,
    gamma: float,
) -> BirthSystem:
    """Conjugation-style gate: five sender-preserving logic reactions.

    Each reaction consumes the receiver input and converts it into an
    output rail while the sender input is preserved.  Three reactions
    produce the 0 rail and two produce the 1 rail, so only the (0, 0)
    input pair yields output value 1 (the table CONJUGATION_GATE_TABLE).
    Output rails start at zero.
    """
    if gamma <= 0 or delta_conj <= 0:
        raise ValueError("gamma and delta_conj must be positive")
    sig_a, sig_b = inputs
    _check_disjoint(sig_a, sig_b, output)
    a0, a1 = sig_a.rail0, sig_a.rail1
    b0, b1 = sig_b.rail0, sig_b.rail1
    y0, y1 = output.rail0, output.rail1
    conj = [
        Reaction({a1: 1, b0: 1}, {a1: 1, y0: 1}, delta_conj, tag="conjugation"),
        Reaction({a0: 1, b1: 1}, {a0: 1, y0: 1}, delta_conj, tag="conjugation"),
        Reaction({a1: 1, b1: 1}, {a1: 1, y0: 1}, delta_conj, tag="conjugation"),
        Reaction({a0: 1, b0: 1}, {a0: 1, y1: 1}, delta_conj, tag="conjugation"),
        Reaction({a0: 1, b0: 1}, {y1: 1, b0: 1}, delta_conj, tag="conjugation"),
    ]
    names = sig_a.rails + sig_b.rails + output.rails
    net = Network.from_names(names, conj + _duplications(names, gamma))
    return validate_birth_system(
        net,
        gamma,
        inputs=sig_a.rails + sig_b.rails,
        outputs=output.rails,
        initial_counts={y0: 0, y1: 0},
    )


def biological_amplifier_reactions(
    signal: DualRailSignal, delta: float
) -> list[Reaction]:
    """Sender-preserving amplifier pair for one signal.

    The opposite rails annihilate one copy at a time with the sender kept:
    X0 + X1 -> X1 and X0 + X1 -> X0, both at rate delta.  Either rail can
    be the sender, hence two reactions.
    """
    r0, r1 = signal.rails
    return [
        Reaction({r0: 1, r1: 1}, {r1: 1}, delta, tag="death"),
        Reaction({r0: 1, r1: 1}, {r0: 1}, delta, tag="death"),
    ]


def biological_gate_assembly(
    sig_a: DualRailSignal,
    sig_b: DualRailSignal,
    sig_y: DualRailSignal,
    gamma: float,
    delta: float,
) -> BirthSystem:
    """Conjugation gate with amplifiers on inputs and output, in parallel.

    One network holding the five conjugation logic reactions, the
    sender-preserving amplifier pair for each of the three signals, and
    the six duplications (5 + 6 + 6 = 17 reactions).
    """
    gate = biological_gate_network((sig_a, sig_b), sig_y, delta, gamma)
    conj = [r for r in gate.network.reactions if r.tag == "conjugation"]
    amp = []
    for sig in (sig_a, sig_b, sig_y):
        amp.extend(biological_amplifier_reactions(sig, delta))
    names = sig_a.rails + sig_b.rails + sig_y.rails
    net = Network.from_names(names, conj + amp + _duplications(names, gamma))
    return validate_birth_system(
        net,
        gamma,
        inputs=sig_a.rails + sig_b.rails,
        outputs=sig_y.rails,
        initial_counts={sig_y.rail0: 0, sig_y.rail1: 0},
    )


def make_signal(
    signal: DualRailSignal, spec: SignalSpec, error_fraction: float = 0.0
) -> dict[str, int]:
    """Initial rail counts encoding `spec.value` with a given error level.

    The wrong rail receives round(error_fraction * n) individuals (ties to
    even) and the right rail the remaining n; the result is checked to be
    (n, delta)-correct.
    """
    if not 0.0 <= error_fraction < 1.0:
        raise ValueError("error_fraction must be in [0, 1)")
    wrong = round(error_fraction * spec.n)
    if 2 * wrong > spec.n - spec.delta:
        raise GapViolation(
            f"wrong-rail count {wrong} exceeds (n - delta)/2 = "
            f"{(spec.n - spec.delta) / 2:g} for n={spec.n}, delta={spec.delta}"
        )
    right = spec.n - wrong
    return {
        signal.rail(spec.value): right,
        signal.rail(1 - spec.value): wrong,
    }


def read_signal(
    config: Configuration, signal: DualRailSignal, theta: float = 0.75
) -> int | None:
    """Decode a dual-rail signal: value v iff rail v holds a theta majority.

    Returns None when the signal is empty or neither rail reaches the
    threshold fraction theta of the signal total.
    """
    if not 0.5 < theta <= 1.0:
        raise ValueError("theta must be in (1/2, 1]")
    c0 = config.counts.get(signal.rail0, 0)
    c1 = config.counts.get(signal.rail1, 0)
    total = c0 + c1
    if total == 0:
        return None
    if c1 >= theta * total:
        return 1
    if c0 >= theta * total:
        return 0
    return None


# --------------------------------------------------------------------------
# Circuits
# --------------------------------------------------------------------------

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


@dataclass(frozen=True)
class GateNode:
    """One two-input gate instance wired between named signals."""

    name: str
    spec: GateSpec
    in_a: str
    in_b: str
    out: str

    def __post_init__(self):
        for label in (self.name, self.in_a, self.in_b, self.out):
            if not _NAME_RE.fullmatch(label):
                raise ValueError(f"invalid identifier {label!r}")
        if self.out in (self.in_a, self.in_b):
            raise ValueError(f"gate {self.name!r} feeds its own input")


@dataclass(frozen=True)
class Circuit:
    """A DAG of two-input gates over dual-rail signals.

    Signals are names; each gate consumes two and produces one, every
    signal is produced by at most one gate, and the wiring must be acyclic
    so that evaluation layers are well defined.  `schedule_mode` selects
    layer-by-layer execution ("sequential") or one combined network
    ("parallel"); `amp_cap_constant` scales the sequential amplifier-phase
    time cap c * ln(n) / gamma.
    """

    gates: tuple[GateNode, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    schedule_mode: str = "sequential"
    amp_cap_constant: float = 8.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.schedule_mode not in ("sequential", "parallel"):
            raise ValueError("schedule_mode must be 'sequential' or 'parallel'")
        if self.amp_cap_constant <= 0:
            raise ValueError("amp_cap_constant must be positive")
        if not self.gates:
            raise ValueError("circuit needs at least one gate")
        names = [g.name for g in self.gates]
        if len(set(names)) != len(names):
            raise ValueError("gate names must be unique")
        produced = [g.out for g in self.gates]
        if len(set(produced)) != len(produced):
            raise ValueError("every signal may be produced by at most one gate")
        produced_set = set(produced)
        if produced_set & set(self.inputs):
            raise ValueError("circuit inputs cannot be gate outputs")
        known = set(self.inputs) | produced_set
        for g in self.gates:
            for src in (g.in_a, g.in_b):
                if src not in known:
                    raise ValueError(
                        f"gate {g.name!r} reads undeclared signal {src!r}"
                    )
        for out in self.outputs:
            if out not in known:
                raise ValueError(f"output signal {out!r} is never produced")
        self.layers()  # raises on cycles

    def signal_names(self) -> tuple[str, ...]:
        """All signal names: declared inputs first, then gate outputs in
        declaration order."""
        return self.inputs + tuple(g.out for g in self.gates)

    def signals(self) -> dict[str, DualRailSignal]:
        """Dual-rail signals with conventional `<name>0`/`<name>1` rails."""
        sigs = {name: DualRailSignal.named(name) for name in self.signal_names()}
        _check_disjoint(*sigs.values())
        return sigs

    def layers(self) -> tuple[tuple[GateNode, ...], ...]:
        """Topological layers: a gate sits one layer after its deepest input."""
        depth: dict[str, int] = {name: 0 for name in self.inputs}
        pending = list(self.gates)
        layers: dict[int, list[GateNode]] = {}
        while pending:
            progress = False
            for g in list(pending):
                if g.in_a in depth and g.in_b in depth:
                    d = max(depth[g.in_a], depth[g.in_b]) + 1
                    depth[g.out] = d
                    layers.setdefault(d, []).append(g)
                    pending.remove(g)
                    progress = True
            if not progress:
                cyclic = sorted(g.name for g in pending)
                raise ValueError(f"circuit has a cycle through gates {cyclic}")
        return tuple(tuple(layers[d]) for d in sorted(layers))


def xor_circuit(
    in_a: str = "A", in_b: str = "B", out: str = "Y", rate: float = 1.0
) -> Circuit:
    """XOR as the classical four-NAND composition."""
    nand = GateSpec("NAND", rate=rate)
    return Circuit(
        gates=(
            GateNode("g1", nand, in_a, in_b, "C"),
            GateNode("g2", nand, in_a, "C", "D"),
            GateNode("g3", nand, "C", in_b, "E"),
            GateNode("g4", nand, "D", "E", out),
        ),
        inputs=(in_a, in_b),
        outputs=(out,),
    )


@dataclass(frozen=True)
class PhaseRecord:
    """One executed phase of a circuit run."""

    label: str
    trajectory: Trajectory
    n_target: int | None = None
    time_cap: float | None = None


@dataclass(frozen=True)
class CircuitResult:
    """Readouts and the executed phases of one circuit run.

    `readouts` maps each declared output signal to 0, 1, or None
    (unresolved); `values` covers every signal for diagnostics; `counts`
    is the final rail census.
    """

    readouts: dict[str, int | None]
    values: dict[str, int | None]
    counts: dict[str, int]
    phases: tuple[PhaseRecord, ...]

    @property
    def unresolved(self) -> tuple[str, ...]:
        return tuple(k for k, v in self.readouts.items() if v is None)


def _signal_config(counts: Mapping[str, int], sig: DualRailSignal) -> Configuration:
    return Configuration(
        {sig.rail0: counts.get(sig.rail0, 0), sig.rail1: counts.get(sig.rail1, 0)}
    )


def run_circuit(
    circuit: Circuit,
    input_specs: Mapping[str, SignalSpec],
    gamma: float = 1.0,
    delta: float = 1.0,
    error_fraction: float = 0.0,
    theta: float = 0.75,
    options: SimulationOptions | None = None,
    method: str = "exact",
    time_horizon: float | None = None,
    max_events_per_phase: int = 10**8,
) -> CircuitResult:
    """Execute a circuit and decode every declared output.

    Sequential mode runs each layer's gates to a target output total (the
    minimum of the gate's input totals at phase start), then amplifies each
    fresh output to consensus or until the time cap c * ln(n) / gamma.
    Parallel mode builds one combined network (all gates plus an amplifier
    for every signal) and runs it to `time_horizon`.

    Unresolved outputs are reported in the result, not raised.
    """
    if method not in ("exact", "tau"):
        raise ValueError("method must be 'exact' or 'tau'")
    if set(input_specs) != set(circuit.inputs):
        raise ValueError(
            f"input specs must cover exactly {sorted(circuit.inputs)}, "
            f"got {sorted(input_specs)}"
        )
    opts = options if options is not None else SimulationOptions(sampling=RecordAtStopOnly())
    simulate = simulate_exact if method == "exact" else simulate_tau_leap
    sigs = circuit.signals()
    counts: dict[str, int] = {}
    for name in circuit.inputs:
        counts.update(make_signal(sigs[name], input_specs[name], error_fraction))

    phases: list[PhaseRecord] = []
    phase_index = 0

    def phase_options() -> SimulationOptions:
        nonlocal phase_index
        seed = mix64(opts.seed, phase_index)
        phase_index += 1
        return SimulationOptions(
            seed=seed,
            growth=opts.growth,
            tau_epsilon=opts.tau_epsilon,
            tau_exact_switch=opts.tau_exact_switch,
            sampling=opts.sampling,
        )

    if circuit.schedule_mode == "parallel":
        if time_horizon is None or time_horizon <= 0:
            raise ValueError("parallel mode requires a positive time_horizon")
        names: list[str] = []
        for name in circuit.signal_names():
            names.extend(sigs[name].rails)
        reactions: list[Reaction] = []
        for g in circuit.gates:
            gate = gate_network(
                (sigs[g.in_a], sigs[g.in_b]), sigs[g.out], g.spec, gamma
            )
            reactions.extend(r for r in gate.network.reactions if r.tag == "logic")
        for name in circuit.signal_names():
            r0, r1 = sigs[name].rails
            reactions.append(Reaction({r0: 1, r1: 1}, {}, delta, tag="death"))
        reactions.extend(_duplications(names, gamma))
        net = Network.from_names(names, reactions)
        input_rails = tuple(
            rail for name in circuit.inputs for rail in sigs[name].rails
        )
        output_rails = tuple(
            rail for name in circuit.outputs for rail in sigs[name].rails
        )
        system = validate_birth_system(
            net, gamma, inputs=input_rails, outputs=output_rails
        )
        init = dict(counts)
        for g in circuit.gates:
            init.setdefault(sigs[g.out].rail0, 0)
            init.setdefault(sigs[g.out].rail1, 0)
        stop = AnyOf(TimeHorizon(time_horizon), MaxEvents(max_events_per_phase))
        traj = simulate(system, init, stop, phase_options())
        counts = dict(traj.terminal.config.counts)
        phases.append(PhaseRecord("parallel", traj, time_cap=time_horizon))
    else:
        for layer in circuit.layers():
            for g in layer:
                sig_a, sig_b, sig_y = sigs[g.in_a], sigs[g.in_b], sigs[g.out]
                total_a = counts[sig_a.rail0] + counts[sig_a.rail1]
                total_b = counts[sig_b.rail0] + counts[sig_b.rail1]
                n_target = min(total_a, total_b)
                gate = gate_network((sig_a, sig_b), sig_y, g.spec, gamma)
                init = {rail: counts[rail] for rail in sig_a.rails + sig_b.rails}
                init[sig_y.rail0] = 0
                init[sig_y.rail1] = 0
                stop = AnyOf(
                    TargetCount(sig_y.rails, n_target),
                    MaxEvents(max_events_per_phase),
                )
                traj = simulate(gate, init, stop, phase_options())
                counts.update(traj.terminal.config.counts)
                phases.append(
                    PhaseRecord(f"gate:{g.name}", traj, n_target=n_target)
                )

                amp = amplifier_network(sig_y, gamma, delta)
                cap = circuit.amp_cap_constant * math.log(max(n_target, 2)) / gamma
                stop = AnyOf(Consensus(sig_y.rails), TimeHorizon(cap))
                amp_init = {rail: counts[rail] for rail in sig_y.rails}
                traj = simulate(amp, amp_init, stop, phase_options())
                counts.update(traj.terminal.config.counts)
                phases.append(
                    PhaseRecord(f"amplifier:{g.out}", traj, time_cap=cap)
                )

    values = {
        name: read_signal(_signal_config(counts, sigs[name]), sigs[name], theta)
        for name in circuit.signal_names()
    }
    readouts = {name: values[name] for name in circuit.outputs}
    return CircuitResult(
        readouts=readouts, values=values, counts=counts, phases=tuple(phases)
    )


# --------------------------------------------------------------------------
# Circuit description files
# --------------------------------------------------------------------------

_GATE_LINE = re.compile(
    r"gate\s+(?P<name>\w[\w']*)\s*=\s*(?P<func>[A-Za-z01]+)\s*"
    r"\(\s*(?P<a>\w[\w']*)\s*,\s*(?P<b>\w[\w']*)\s*\)\s*->\s*(?P<y>\w[\w']*)$"
)


def parse_circuit(text: str) -> Circuit:
    """Parse the line-oriented circuit description format.

    Grammar (one directive per line, `#` starts a comment):

        input  <signal>
        output <signal>
        mode   sequential | parallel
        gate <name> = <FUNC>(<sigA>, <sigB>) -> <sigY>

    `<FUNC>` is a gate name from GATE_TABLES (NAND, AND, OR, NOR, XOR,
    XNOR) or a 4-bit truth-table literal in input order (0,0), (0,1),
    (1,0), (1,1), e.g. `gate g = 0110(A, B) -> Y`.
    """
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[GateNode] = []
    mode = "sequential"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("input"):
                name = line[len("input"):].strip()
                if not _NAME_RE.fullmatch(name):
                    raise ValueError(f"invalid signal name {name!r}")
                inputs.append(name)
            elif line.startswith("output"):
                name = line[len("output"):].strip()
                if not _NAME_RE.fullmatch(name):
                    raise ValueError(f"invalid signal name {name!r}")
                outputs.append(name)
            elif line.startswith("mode"):
                mode = line[len("mode"):].strip()
            elif line.startswith("gate"):
                m = _GATE_LINE.fullmatch(line)
                if not m:
                    raise ValueError("malformed gate line")
                spec = GateSpec(m.group("func"))
                gates.append(
                    GateNode(
                        m.group("name"), spec, m.group("a"), m.group("b"), m.group("y")
                    )
                )
            else:
                raise ValueError("unknown directive")
        except ValueError as exc:
            raise CircuitParseError(lineno, raw, str(exc)) from exc
    try:
        return Circuit(
            gates=tuple(gates),
            inputs=tuple(inputs),
            outputs=tuple(outputs),
            schedule_mode=mode,
        )
    except ValueError as exc:
        raise CircuitParseError(0, "<circuit>", str(exc)) from exc


def format_circuit(circuit: Circuit) -> str:
    """Render a circuit back into the description format (round-trips)."""
    bits_to_name = {v: k for k, v in GATE_TABLES.items()}
    lines = [f"mode {circuit.schedule_mode}"]
    lines.extend(f"input {name}" for name in circuit.inputs)
    lines.extend(f"output {name}" for name in circuit.outputs)
    for g in circuit.gates:
        func = bits_to_name.get(g.spec.bits, g.spec.bits)
        lines.append(f"gate {g.name} = {func}({g.in_a}, {g.in_b}) -> {g.out}")
    return "\n".join(lines) + "\n"


def load_circuit(path) -> Circuit:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def save_circuit(path, circuit: Circuit) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_circuit(circuit))
