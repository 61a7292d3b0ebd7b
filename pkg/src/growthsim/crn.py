"""Static data model for reaction networks and birth systems.

Species live in a `Network` in declaration order; reactions reference them
by name.  A `BirthSystem` wraps a network in which every species carries
exactly one duplication reaction ``X -> 2X`` at a shared rate.  All types
are immutable values: applying a reaction returns a new `Configuration`.

Counts are plain Python integers validated against the unsigned 64-bit
range; the simulation engine additionally requires signed 64-bit counts at
compile time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

__all__ = [
    "REACTION_TAGS",
    "SpeciesId",
    "StoichVector",
    "Reaction",
    "Configuration",
    "Network",
    "BirthSystem",
    "NotApplicable",
    "CountOverflow",
    "InvalidBirthSystem",
    "MissingDuplication",
    "RateMismatch",
    "DuplicateDuplication",
    "ReactionParseError",
    "propensity",
    "apply_reaction",
    "validate_birth_system",
    "total_population",
    "parse_network",
    "format_network",
    "load_network",
    "save_network",
]

REACTION_TAGS = ("duplication", "death", "logic", "conjugation", "other")

_UINT64_MAX = 2**64 - 1


class NotApplicable(ValueError):
    """A reaction was applied to a configuration lacking its reactants."""


class CountOverflow(ValueError):
    """A species count or total left the unsigned 64-bit range."""


class InvalidBirthSystem(ValueError):
    """A network failed birth-system validation."""


class MissingDuplication(InvalidBirthSystem):
    def __init__(self, species: str):
        self.species = species
        super().__init__(f"species {species!r} has no duplication reaction")


class RateMismatch(InvalidBirthSystem):
    def __init__(self, species: str, found: float, expected: float):
        self.species = species
        self.found = found
        self.expected = expected
        super().__init__(
            f"duplication of {species!r} has rate {found!r}, expected {expected!r}"
        )


class DuplicateDuplication(InvalidBirthSystem):
    def __init__(self, species: str):
        self.species = species
        super().__init__(f"species {species!r} has more than one duplication reaction")


class ReactionParseError(ValueError):
    """A reaction-file line does not match the grammar."""

    def __init__(self, lineno: int, line: str, reason: str):
        self.lineno = lineno
        self.line = line
        self.reason = reason
        super().__init__(f"line {lineno}: {reason}: {line!r}")


@dataclass(frozen=True)
class SpeciesId:
    """A species handle: dense index within its network plus a unique name."""

    index: int
    name: str

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"species index must be non-negative, got {self.index}")
        if not self.name:
            raise ValueError("species name must be non-empty")


def _frozen_counts(counts: Mapping[str, int], what: str, keep_zero: bool) -> Mapping[str, int]:
    clean: dict[str, int] = {}
    for name, c in counts.items():
        if not isinstance(c, int) or isinstance(c, bool):
            raise TypeError(f"{what} count for {name!r} must be an integer, got {c!r}")
        if c < 0:
            raise ValueError(f"{what} count for {name!r} must be >= 0, got {c}")
        if c > _UINT64_MAX:
            raise CountOverflow(f"{what} count for {name!r} exceeds 64-bit range")
        if c > 0 or keep_zero:
            clean[name] = c
    return MappingProxyType(clean)


@dataclass(frozen=True)
class StoichVector:
    """Non-negative multiset of species, e.g. the reactant side ``A + B``.

    Zero entries are dropped so two vectors are equal exactly when they
    describe the same multiset.
    """

    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "counts", _frozen_counts(self.counts, "stoichiometric", False))

    def __getitem__(self, name: str) -> int:
        return self.counts.get(name, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def items(self):
        return self.counts.items()

    def is_empty(self) -> bool:
        return not self.counts


@dataclass(frozen=True)
class Configuration:
    """Species counts, one non-negative integer per species name."""

    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "counts", _frozen_counts(self.counts, "species", True))
        if sum(self.counts.values()) > _UINT64_MAX:
            raise CountOverflow("total population exceeds 64-bit range")

    def __getitem__(self, name: str) -> int:
        return self.counts.get(name, 0)

    def get(self, name: str, default: int = 0) -> int:
        return self.counts.get(name, default)

    def items(self):
        return self.counts.items()

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class Reaction:
    """One reaction ``reactants -> products`` with a mass-action rate constant.

    `tag` is a role label from `REACTION_TAGS`; the engine treats tags as
    metadata except where a growth model scales duplication reactions.
    """

    reactants: StoichVector
    products: StoichVector
    rate_constant: float
    tag: str = "other"

    def __post_init__(self):
        if isinstance(self.reactants, Mapping):
            object.__setattr__(self, "reactants", StoichVector(self.reactants))
        if isinstance(self.products, Mapping):
            object.__setattr__(self, "products", StoichVector(self.products))
        if self.rate_constant < 0:
            raise ValueError(f"rate constant must be >= 0, got {self.rate_constant}")
        if self.reactants.is_empty() and self.products.is_empty():
            raise ValueError("reaction must have a non-empty side")
        if self.tag not in REACTION_TAGS:
            raise ValueError(f"unknown tag {self.tag!r}, expected one of {REACTION_TAGS}")

    def species(self) -> set[str]:
        return set(self.reactants) | set(self.products)


@dataclass(frozen=True)
class Network:
    """An immutable reaction network: species, reactions, and a volume.

    Species indices are dense in declaration order and names are unique;
    every reaction may reference declared species only.  The volume divides
    every propensity uniformly and defaults to 1.
    """

    species: tuple[SpeciesId, ...]
    reactions: tuple[Reaction, ...]
    volume: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        if self.volume <= 0:
            raise ValueError(f"volume must be > 0, got {self.volume}")
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ValueError("species names must be unique")
        for pos, s in enumerate(self.species):
            if s.index != pos:
                raise ValueError(
                    f"species indices must be dense 0..S-1; {s.name!r} has index "
                    f"{s.index} at position {pos}"
                )
        declared = set(names)
        for r in self.reactions:
            undeclared = r.species() - declared
            if undeclared:
                raise ValueError(f"reaction references undeclared species {sorted(undeclared)}")

    @classmethod
    def from_names(
        cls, names: Iterable[str], reactions: Iterable[Reaction], volume: float = 1.0
    ) -> "Network":
        ids = tuple(SpeciesId(i, n) for i, n in enumerate(names))
        return cls(ids, tuple(reactions), volume)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.species)

    def species_by_name(self, name: str) -> SpeciesId:
        for s in self.species:
            if s.name == name:
                return s
        raise KeyError(name)


@dataclass(frozen=True)
class BirthSystem:
    """A network where every species duplicates at one shared rate.

    `inputs`, `outputs`, and `internals` partition the species by role;
    `initial_counts` covers internal and output species (inputs are set per
    run).  Construct through `validate_birth_system`, which enforces the
    one-duplication-per-species invariant.
    """

    network: Network
    inputs: frozenset[str]
    outputs: frozenset[str]
    internals: frozenset[str]
    duplication_rate: float
    initial_counts: Configuration


def _binom(c: int, r: int) -> int:
    if c < r:
        return 0
    out = 1
    for m in range(r):
        out = out * (c - m) // (m + 1)
    return out


def propensity(reaction: Reaction, config: Configuration, volume: float = 1.0) -> float:
    """Mass-action propensity (rate/volume) * prod_S binom(c(S), r(S)).

    Zero exactly when the reaction is not applicable.  The fast path for
    unary and binary reactant entries avoids general binomials.
    """
    a = reaction.rate_constant / volume
    for name, r in reaction.reactants.items():
        c = config[name]
        if c < r:
            return 0.0
        if r == 1:
            a *= c
        elif r == 2:
            a *= c * (c - 1) / 2
        else:
            a *= _binom(c, r)
    return a


def apply_reaction(config: Configuration, reaction: Reaction) -> Configuration:
    """Return the configuration c - r + p; raises `NotApplicable` if r > c."""
    for name, r in reaction.reactants.items():
        if config[name] < r:
            raise NotApplicable(
                f"need {r} of {name!r} but have {config[name]}"
            )
    out = dict(config.counts)
    for name, r in reaction.reactants.items():
        out[name] = out.get(name, 0) - r
    for name, p in reaction.products.items():
        out[name] = out.get(name, 0) + p
    return Configuration(out)


def total_population(config: Configuration, species: Iterable[str] | None = None) -> int:
    """Sum of counts over a species subset (all species when omitted)."""
    if species is None:
        return config.total()
    return sum(config[name] for name in set(species))


def _is_duplication_of(reaction: Reaction, name: str) -> bool:
    return (
        dict(reaction.reactants.items()) == {name: 1}
        and dict(reaction.products.items()) == {name: 2}
    )


def validate_birth_system(
    candidate: Network,
    gamma: float,
    inputs: Iterable[str] = (),
    outputs: Iterable[str] = (),
    internals: Iterable[str] | None = None,
    initial_counts: Configuration | Mapping[str, int] | None = None,
) -> BirthSystem:
    """Check the one-duplication-per-species invariant and wrap the network.

    Every declared species must carry exactly one reaction ``X -> 2X`` and
    all of them must share the rate `gamma`.  Species are scanned in
    declaration order, so the first offender determines the error:
    `MissingDuplication`, `DuplicateDuplication`, or `RateMismatch`.
    """
    if gamma <= 0:
        raise ValueError(f"duplication rate must be > 0, got {gamma}")
    for sid in candidate.species:
        dups = [r for r in candidate.reactions if _is_duplication_of(r, sid.name)]
        if not dups:
            raise MissingDuplication(sid.name)
        if len(dups) > 1:
            raise DuplicateDuplication(sid.name)
        if dups[0].rate_constant != gamma:
            raise RateMismatch(sid.name, dups[0].rate_constant, gamma)
    inputs = frozenset(inputs)
    outputs = frozenset(outputs)
    declared = set(candidate.names)
    if internals is None:
        internals_set = frozenset(declared - inputs - outputs)
    else:
        internals_set = frozenset(internals)
    for role, subset in (("input", inputs), ("output", outputs), ("internal", internals_set)):
        unknown = subset - declared
        if unknown:
            raise ValueError(f"{role} species not in network: {sorted(unknown)}")
    if initial_counts is None:
        initial = Configuration({})
    elif isinstance(initial_counts, Configuration):
        initial = initial_counts
    else:
        initial = Configuration(initial_counts)
    outside = set(initial.counts) - (internals_set | outputs)
    if outside:
        raise ValueError(
            f"initial counts cover internal and output species only; got {sorted(outside)}"
        )
    return BirthSystem(
        network=candidate,
        inputs=inputs,
        outputs=outputs,
        internals=internals_set,
        duplication_rate=gamma,
        initial_counts=initial,
    )


# --------------------------------------------------------------------------
# Reaction-file format
#
#   line    = reaction | comment | blank
#   comment = "#" anything            (only when "#" is the first character)
#   reaction= side "->" side "@" rate ["#" tag]
#   side    = "0" | "" | term ("+" term)*
#   term    = [count] name            (count a positive integer, default 1)
#   name    = identifier  [A-Za-z_][A-Za-z0-9_']*
# --------------------------------------------------------------------------

_TERM_RE = re.compile(r"^(?:(\d+)\s*)?([A-Za-z_][A-Za-z0-9_']*)$")


def _parse_side(text: str, lineno: int, line: str) -> StoichVector:
    text = text.strip()
    if text == "" or text == "0":
        return StoichVector({})
    counts: dict[str, int] = {}
    for term in text.split("+"):
        m = _TERM_RE.match(term.strip())
        if not m:
            raise ReactionParseError(lineno, line, f"bad species term {term.strip()!r}")
        count = int(m.group(1)) if m.group(1) else 1
        if count == 0:
            raise ReactionParseError(lineno, line, "explicit zero coefficient")
        name = m.group(2)
        counts[name] = counts.get(name, 0) + count
    return StoichVector(counts)


def parse_network(text: str, volume: float = 1.0) -> Network:
    """Parse the textual reaction format into a `Network`.

    Species are declared implicitly, indexed in order of first appearance
    (reactants before products, line by line).
    """
    reactions: list[Reaction] = []
    order: list[str] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        body, tag = line, "other"
        if "#" in line:
            body, tag_text = line.split("#", 1)
            tag = tag_text.strip()
            if tag not in REACTION_TAGS:
                raise ReactionParseError(lineno, raw, f"unknown tag {tag!r}")
        if "->" not in body:
            raise ReactionParseError(lineno, raw, "missing '->'")
        lhs, rest = body.split("->", 1)
        if "@" not in rest:
            raise ReactionParseError(lineno, raw, "missing '@ rate'")
        rhs, rate_text = rest.rsplit("@", 1)
        try:
            rate = float(rate_text.strip())
        except ValueError:
            raise ReactionParseError(lineno, raw, f"bad rate {rate_text.strip()!r}") from None
        reactants = _parse_side(lhs, lineno, raw)
        products = _parse_side(rhs, lineno, raw)
        try:
            reaction = Reaction(reactants, products, rate, tag)
        except ValueError as exc:
            raise ReactionParseError(lineno, raw, str(exc)) from None
        reactions.append(reaction)
        for name in list(reactants) + list(products):
            if name not in seen:
                seen.add(name)
                order.append(name)
    return Network.from_names(order, reactions, volume)


def _format_side(sv: StoichVector) -> str:
    if sv.is_empty():
        return "0"
    return " + ".join(f"{c} {n}" if c != 1 else n for n, c in sv.items())


def format_network(network: Network) -> str:
    """Render a network back into the reaction-file format (round-trips)."""
    lines = []
    for r in network.reactions:
        line = f"{_format_side(r.reactants)} -> {_format_side(r.products)} @ {r.rate_constant!r}"
        if r.tag != "other":
            line += f" # {r.tag}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def load_network(path, volume: float = 1.0) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read(), volume=volume)


def save_network(path, network: Network) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_network(network))
