"""Command-line interface.

Subcommands:

* ``ab-sweep``     win-probability sweep over initial count differences
* ``ab-time-grid`` consensus-time heatmap grids (rate plane, count plane)
* ``nand-sim``     conjugation gate at bacterial scale under tau-leaping
* ``circuit-run``  execute a circuit description file and decode outputs
* ``couple-check`` coupled-chain invariant and law checks (exit 3 on violation)
* ``bounds-audit`` closed-form bounds against exact/Monte Carlo oracles
* ``beta``         regularized incomplete beta values and related constants

Every command accepts ``--config FILE`` (INI, one section per command;
keys match the long option names with underscores) plus ``--seed``,
``--trials``, ``--out``, and ``--workers`` where meaningful.  Explicit
command-line flags override config-file values, which override defaults.
Exit codes: 0 success, 2 configuration error, 3 invariant violation found
by couple-check.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import os
import shlex
import sys
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from . import __version__
from .analysis import (
    AUDIT_KINDS,
    bounds_audit,
    omega_lower_bound,
    reg_inc_beta,
    reg_inc_beta_exact,
)
from .couplings import couple_check_report
from .engine import SimulationOptions
from .harness import (
    ExperimentConfig,
    RunManifest,
    ab_diff_config,
    ab_time_grid_configs,
    emit_nand_sim,
    emit_report,
    nand_sim,
    run_ensemble,
)
from .protocols import SignalSpec, load_circuit, run_circuit
from .seeding import mix64

__all__ = ["main", "ConfigError"]


class ConfigError(ValueError):
    """A command cannot run with the given flags/config file."""


class _Resolver:
    """Layered option lookup: CLI flag, then config section, then default."""

    def __init__(self, args: argparse.Namespace, section: Mapping[str, str]):
        self._args = args
        self._section = section

    def _raw(self, name: str):
        return getattr(self._args, name.replace("-", "_"), None)

    def get(self, name: str, default, convert: Callable):
        cli = self._raw(name)
        if cli is not None:
            return cli
        key = name.replace("-", "_")
        if key in self._section:
            try:
                return convert(self._section[key])
            except ValueError as exc:
                raise ConfigError(f"config key {key!r}: {exc}") from exc
        return default

    def get_int(self, name: str, default: int | None) -> int | None:
        return self.get(name, default, int)

    def get_float(self, name: str, default: float | None) -> float | None:
        return self.get(name, default, float)

    def get_str(self, name: str, default: str | None) -> str | None:
        return self.get(name, default, str)

    def get_int_list(self, name: str, default: Sequence[int]) -> Sequence[int]:
        return self.get(name, default, lambda s: [int(tok) for tok in s.split()])

    def get_str_list(self, name: str, default: Sequence[str]) -> Sequence[str]:
        return self.get(name, default, lambda s: s.split())


def _load_section(path: str | None, command: str) -> Mapping[str, str]:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    if parser.has_section(command):
        return dict(parser.items(command))
    return {}


def _manifest(args_command: str, config: Mapping) -> RunManifest:
    return RunManifest(
        command=shlex.join([os.path.basename(sys.argv[0])] + sys.argv[1:])
        if sys.argv
        else args_command,
        config=config,
        master_seed=int(config.get("master_seed", 0)),
    )


def _cmd_ab_sweep(args: argparse.Namespace) -> int:
    opt = _Resolver(args, _load_section(args.config, "ab-sweep"))
    totals = opt.get_int_list("totals", (100, 1000, 10000))
    cfg = ab_diff_config(
        totals=totals,
        delta_points=opt.get_int("delta-points", 21),
        trials=opt.get_int("trials", 10000),
        master_seed=opt.get_int("seed", 0),
        gamma=opt.get_float("gamma", 1.0),
        delta=opt.get_float("delta", 1.0),
    )
    out = opt.get_str("out", "out-ab-sweep")
    stats, manifest = run_ensemble(cfg, workers=opt.get_int("workers", 1))
    manifest = dataclasses.replace(
        manifest, command=_manifest("ab-sweep", manifest.config).command
    )
    paths, _ = emit_report(stats, manifest, fmt="both", out_dir=out)
    print("\n".join(paths))
    return 0


def _cmd_ab_time_grid(args: argparse.Namespace) -> int:
    opt = _Resolver(args, _load_section(args.config, "ab-time-grid"))
    rate_cfg, count_cfg = ab_time_grid_configs(
        grid_points=opt.get_int("grid-points", 12),
        trials=opt.get_int("trials", 1000),
        master_seed=opt.get_int("seed", 0),
        a0=opt.get_int("a0", 100),
        b0=opt.get_int("b0", 100),
        count_gamma=opt.get_float("count-gamma", 0.01),
        count_delta=opt.get_float("count-delta", 1.0),
    )
    out = opt.get_str("out", "out-ab-time-grid")
    workers = opt.get_int("workers", 1)
    stats_r, manifest = run_ensemble(rate_cfg, workers=workers)
    manifest = dataclasses.replace(
        manifest,
        command=_manifest("ab-time-grid", manifest.config).command,
        config={
            "kind": "ab-time-grid",
            "rates": dataclasses.asdict(rate_cfg),
            "counts": dataclasses.asdict(count_cfg),
        },
    )
    paths, manifest = emit_report(
        stats_r, manifest, fmt="both", out_dir=out, basename="rates"
    )
    stats_c, _ = run_ensemble(count_cfg, workers=workers)
    more, _ = emit_report(
        stats_c, manifest, fmt="both", out_dir=out, basename="counts"
    )
    print("\n".join(paths[:-1] + more))
    return 0


def _cmd_nand_sim(args: argparse.Namespace) -> int:
    opt = _Resolver(args, _load_section(args.config, "nand-sim"))
    params = {
        "samples": opt.get_int("samples", 30),
        "gamma": opt.get_float("gamma", 0.016),
        "delta": opt.get_float("delta", 1e-11),
        "capacity": opt.get_float("capacity", 1e9),
        "n_per_signal": opt.get_int("n-per-signal", 250_000_000),
        "error": opt.get_float("error", 0.1),
        "t_end": opt.get_float("t-end", 30.0),
        "dt": opt.get_float("dt", 0.5),
        "master_seed": opt.get_int("seed", 0),
    }
    out = opt.get_str("out", "out-nand-sim")
    results = nand_sim(workers=opt.get_int("workers", 1), **params)
    manifest = _manifest(
        "nand-sim", {"kind": "nand-sim", **params}
    )
    paths, _ = emit_nand_sim(results, manifest, out_dir=out)
    print("\n".join(paths))
    worst = min(r.dominance for r in results)
    print(f"minimum dominance across combos: {worst}/{params['samples']}")
    return 0


def _parse_values(text: str) -> dict[str, int]:
    values: dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, _, val = part.partition("=")
        if val not in ("0", "1"):
            raise ConfigError(f"input value must be 0 or 1: {part!r}")
        values[name.strip()] = int(val)
    if not values:
        raise ConfigError("no input values given")
    return values


def _cmd_circuit_run(args: argparse.Namespace) -> int:
    opt = _Resolver(args, _load_section(args.config, "circuit-run"))
    path = opt.get_str("circuit", None)
    if path is None:
        raise ConfigError("circuit-run requires --circuit FILE")
    values_text = opt.get_str("values", None)
    if values_text is None:
        raise ConfigError("circuit-run requires --values like 'A=1,B=0'")
    try:
        circuit = load_circuit(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load circuit {path}: {exc}") from exc
    values = _parse_values(values_text)
    if set(values) != set(circuit.inputs):
        raise ConfigError(
            f"values must cover inputs {sorted(circuit.inputs)}, got {sorted(values)}"
        )
    n = opt.get_int("n", 10000)
    gap = opt.get_int("gap", 7000)
    specs = {name: SignalSpec(n, gap, values[name]) for name in circuit.inputs}
    trials = opt.get_int("trials", 1)
    seed = opt.get_int("seed", 0)
    horizon = opt.get_float("horizon", None)
    freq: dict[str, dict[str, int]] = {
        name: {"0": 0, "1": 0, "unresolved": 0} for name in circuit.outputs
    }
    for trial in range(trials):
        res = run_circuit(
            circuit,
            specs,
            gamma=opt.get_float("gamma", 1.0),
            delta=opt.get_float("delta", 1.0),
            error_fraction=opt.get_float("error", 0.0),
            theta=opt.get_float("theta", 0.75),
            options=SimulationOptions(seed=mix64(seed, trial)),
            method=opt.get_str("method", "exact"),
            time_horizon=horizon,
        )
        for name, val in res.readouts.items():
            freq[name]["unresolved" if val is None else str(val)] += 1
    report = {
        "circuit": path,
        "inputs": values,
        "n": n,
        "gap": gap,
        "trials": trials,
        "readout_frequencies": freq,
    }
    out = opt.get_str("out", None)
    text = json.dumps(report, indent=1)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        rpath = os.path.join(out, "circuit-run.json")
        with open(rpath, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        manifest = _manifest("circuit-run", {"kind": "circuit-run", **report})
        mpath = os.path.join(out, "manifest.json")
        with open(mpath, "w", encoding="utf-8") as fh:
            fh.write(manifest.to_json() + "\n")
        print(rpath)
    else:
        print(text)
    return 0


def _cmd_couple_check(args: argparse.Namespace) -> int:
    opt = _Resolver(args, _load_section(args.config, "couple-check"))
    report = couple_check_report(
        a0=opt.get_int("a0", 3),
        b0=opt.get_int("b0", 2),
        runs=opt.get_int("runs", opt.get_int("trials", 10000)),
        master_seed=opt.get_int("seed", 0),
        gamma=opt.get_float("gamma", 1.0),
        delta=opt.get_float("delta", 1.0),
        ratio_pair=(opt.get_int("ratio-x0", 1), opt.get_int("ratio-y0", 1)),
        ratio_n_max=opt.get_int("ratio-nmax", 100_000),
        stutter_waits=opt.get_int("stutter-waits", 4000),
    )
    text = json.dumps(report, indent=1)
    out = opt.get_str("out", None)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        rpath = os.path.join(out, "couple-check.json")
        with open(rpath, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(rpath)
    else:
        print(text)
    violations = sum(report["violations"].values())
    if violations:
        print(f"INVARIANT VIOLATIONS: {violations}", file=sys.stderr)
        return 3
    return 0


def _cmd_bounds_audit(args: argparse.Namespace) -> int:
    opt = _Resolver(args, _load_section(args.config, "bounds-audit"))
    kinds = opt.get_str_list("kinds", list(AUDIT_KINDS))
    reports = bounds_audit(
        kinds=kinds,
        trials=opt.get_int("trials", 100_000),
        seed=opt.get_int("seed", 0),
    )
    payload = [r.to_dict() for r in reports]
    text = json.dumps(payload, indent=1)
    out = opt.get_str("out", None)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        rpath = os.path.join(out, "bounds-audit.json")
        with open(rpath, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        print(rpath)
    else:
        print(text)
    for r in reports:
        flag = "ok" if r.fraction_satisfied == 1.0 else "VIOLATIONS FOUND"
        print(
            f"{r.name}: {flag} (fraction satisfied {r.fraction_satisfied:.4f}, "
            f"max violation {r.max_violation:.3g})",
            file=sys.stderr,
        )
    return 0


def _cmd_beta(args: argparse.Namespace) -> int:
    if args.omega is not None:
        x0, y0 = args.omega
        result = {"x0": x0, "y0": y0, "omega": omega_lower_bound(x0, y0)}
    else:
        if args.z is None or args.a is None or args.b is None:
            raise ConfigError("beta requires Z A B arguments (or --omega X0 Y0)")
        try:
            z = Fraction(args.z)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"cannot parse z={args.z!r}: {exc}") from exc
        result = {"z": float(z), "a": args.a, "b": args.b,
                  "value": reg_inc_beta(z, args.a, args.b)}
        if args.exact:
            frac = reg_inc_beta_exact(z, args.a, args.b)
            result["exact"] = f"{frac.numerator}/{frac.denominator}"
    print(json.dumps(result, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="growthsim",
        description="Stochastic simulation and analysis of replicating reaction networks.",
    )
    parser.add_argument("--version", action="version", version=f"growthsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, trials: bool = True) -> None:
        p.add_argument("--config", help="INI config file (section per command)")
        p.add_argument("--seed", type=int, help="master seed")
        if trials:
            p.add_argument("--trials", type=int, help="trials per grid point")
        p.add_argument("--out", help="output directory")
        p.add_argument("--workers", type=int, help="parallel worker processes")

    p = sub.add_parser("ab-sweep", help="win probability vs initial difference")
    common(p)
    p.add_argument("--totals", type=int, nargs="+", help="population totals")
    p.add_argument("--delta-points", type=int, help="points per total")
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)

    p = sub.add_parser("ab-time-grid", help="consensus-time heatmap grids")
    common(p)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--a0", type=int)
    p.add_argument("--b0", type=int)
    p.add_argument("--count-gamma", type=float)
    p.add_argument("--count-delta", type=float)

    p = sub.add_parser("nand-sim", help="conjugation gate at bacterial scale")
    common(p, trials=False)
    p.add_argument("--samples", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--capacity", type=float)
    p.add_argument("--n-per-signal", type=int)
    p.add_argument("--error", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)

    p = sub.add_parser("circuit-run", help="run a circuit description file")
    common(p)
    p.add_argument("--circuit", help="circuit description file")
    p.add_argument("--values", help="input values, e.g. 'A=1,B=0'")
    p.add_argument("--n", type=int, help="initial total per input signal")
    p.add_argument("--gap", type=int, help="initial rail gap per input signal")
    p.add_argument("--error", type=float, help="wrong-rail fraction")
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--theta", type=float, help="readout majority threshold")
    p.add_argument("--method", choices=("exact", "tau"))
    p.add_argument("--horizon", type=float, help="time horizon (parallel mode)")

    p = sub.add_parser("couple-check", help="coupling invariants and limit laws")
    common(p)
    p.add_argument("--a0", type=int)
    p.add_argument("--b0", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--gamma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--ratio-x0", type=int)
    p.add_argument("--ratio-y0", type=int)
    p.add_argument("--ratio-nmax", type=int)
    p.add_argument("--stutter-waits", type=int)

    p = sub.add_parser("bounds-audit", help="audit closed-form bounds")
    common(p)
    p.add_argument("--kinds", nargs="+", choices=AUDIT_KINDS)

    p = sub.add_parser("beta", help="regularized incomplete beta values")
    p.add_argument("z", nargs="?", help="threshold, e.g. 0.75 or 3/4")
    p.add_argument("a", nargs="?", type=int)
    p.add_argument("b", nargs="?", type=int)
    p.add_argument("--exact", action="store_true", help="also print the exact rational")
    p.add_argument("--omega", type=int, nargs=2, metavar=("X0", "Y0"),
                   help="infimum of I_3/4 over the growth lattice instead")

    return parser


_HANDLERS = {
    "ab-sweep": _cmd_ab_sweep,
    "ab-time-grid": _cmd_ab_time_grid,
    "nand-sim": _cmd_nand_sim,
    "circuit-run": _cmd_circuit_run,
    "couple-check": _cmd_couple_check,
    "bounds-audit": _cmd_bounds_audit,
    "beta": _cmd_beta,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
