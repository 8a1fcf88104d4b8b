"""Command-line entry point: ``qbattery <subcommand> --config PATH --out DIR``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .oracle import MAX_N, SCOPES, oracle_check
from .pauli import CapabilityError, ConstructionError
from .util import write_json

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2


def _add_common(p: argparse.ArgumentParser, need_config: bool = True) -> None:
    p.add_argument("--config", required=need_config, help="experiment config (YAML)")
    p.add_argument("--out", default="out", help="output directory (default: ./out)")
    p.add_argument("--seed", type=int, default=None, help="unsigned 64-bit seed; overrides the config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbattery", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("run", "all analyses enabled in the config"),
        ("simulate", "charging trajectory CSV"),
        ("aklh", "projector-sandwich audit CSV and summary"),
        ("bounds", "power bound report JSON"),
        ("decompose", "commuting-layer decomposition and certificate"),
        ("profile", "locality and extensivity profiles"),
    ]:
        _add_common(sub.add_parser(name, help=help_))
    o = sub.add_parser("oracle", help="compare the main path with brute-force recomputation")
    _add_common(o, need_config=False)
    o.add_argument("--scope", choices=SCOPES + ("all",), default="all")
    o.add_argument("--n-max", type=int, default=MAX_N)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "oracle":
        scopes = SCOPES if args.scope == "all" else (args.scope,)
        try:
            summary = oracle_check(scopes, args.n_max)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_json(Path(args.out) / "oracle.json", summary.to_dict())
        print(f"oracle: {summary.checks} checks, {len(summary.mismatches)} mismatches")
        for m in summary.mismatches:
            print(f"  {m}")
        return EXIT_OK if summary.passed else EXIT_VIOLATION

    try:
        cfg = harness.load_config(args.config)
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise harness.ConfigError("--seed must be an unsigned 64-bit integer")
        exp = harness.Experiment(cfg, args.out, args.seed)
    except (harness.ConfigError, ConstructionError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    exp.write_config()
    if args.command == "run":
        summary = exp.run()
        print(json.dumps({"violations": summary["violations"]}, indent=2))
    elif args.command == "simulate":
        traj = exp.simulate()
        print(f"max |P| = {traj.max_power:.12g} over {len(traj.times)} points")
    elif args.command == "aklh":
        table = exp.aklh()
        s = table.summary()
        print(f"aklh: {s['n_entries']} entries, {s['n_flagged']} flagged, max violation {s['max_violation']:.3e}")
    elif args.command == "bounds":
        rep = exp.bounds()
        print(json.dumps({"measured": rep.measured_max_power, "bounds": rep.bounds}, indent=2))
    elif args.command == "decompose":
        res, cert = exp.decompose()
        print(f"{res.k_bar} groups (paper count {res.paper_group_count}), error {cert['reconstruction_error']:.6g}")
        for f in cert["findings"]:
            print(f"  finding: {f}")
    elif args.command == "profile":
        payload = exp.profile()
        print(f"g_B = {payload['battery']['g']:.12g}, q = {payload['battery']['locality_degree']}, "
              f"g_C = {payload['charger']['g']:.12g}, k = {payload['charger']['locality_degree']}")

    for v in exp.violations:
        print(f"VIOLATION {v}", file=sys.stderr)
    return EXIT_VIOLATION if exp.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
