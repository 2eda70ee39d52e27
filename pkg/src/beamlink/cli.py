"""Command-line interface: sweep, budget, and inspect subcommands."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config
from .errors import BeamlinkError, ConfigurationError, EmitError
from .overhead import BUDGET_FAMILIES, feedback_budget
from .protocol import (ALL_SCHEMES, SCHEME_BEAM_ZF_IMPERFECT,
                       draw_csit_errors, evaluate_realization, realize)
from .sweep import emit_results, run_rng, csit_rng, run_sweep

__all__ = ["main", "build_parser"]


def _parse_list(text: str, kind, field: str) -> tuple:
    try:
        return tuple(kind(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigurationError(f"invalid value for {field}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamlink",
        description="Monte Carlo link-level simulator for beam-domain "
                    "multi-user interference channels")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run the full SNR sweep experiment")
    _scenario_flags(sweep)
    sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    sweep.add_argument("--output", default=None,
                       help="output file (default: stdout)")
    sweep.add_argument("--workers", type=int, default=1,
                       help="parallel worker processes (results identical "
                            "for any value)")

    budget = sub.add_parser("budget", help="feedback-overhead table for a "
                                           "K,L grid")
    budget.add_argument("--k", default="2", help="comma list of user counts")
    budget.add_argument("--l", default="4", help="comma list of beams per TX")
    budget.add_argument("--schemes", default=",".join(BUDGET_FAMILIES),
                        help="comma list of scheme families or identifiers")
    budget.add_argument("--format", choices=("csv", "json"), default="csv")
    budget.add_argument("--output", default=None)

    inspect = sub.add_parser(
        "inspect", help="dump one realization: selected combinations, power "
                        "factors, per-user SINRs (JSON)")
    _scenario_flags(inspect)
    inspect.add_argument("--run-index", type=int, default=0,
                         help="which realization substream to inspect")
    inspect.add_argument("--output", default=None)
    return parser


def _scenario_flags(cmd: argparse.ArgumentParser) -> None:
    cmd.add_argument("--config", default=None, help="scenario JSON file")
    cmd.add_argument("--seed", type=int, default=None)
    cmd.add_argument("--runs", type=int, default=None)
    cmd.add_argument("--snr", default=None, help="comma list of SNR points (dB)")
    cmd.add_argument("--schemes", default=None, help="comma list of schemes")
    cmd.add_argument("--csit-error", default=None,
                     help="comma list of CSIT error variances")


def _scenario_from_args(args) -> ScenarioConfig:
    config = load_config(args.config) if args.config else ScenarioConfig()
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.runs is not None:
        updates["runs"] = args.runs
    if args.snr is not None:
        updates["snr_grid_db"] = _parse_list(args.snr, float, "snr")
    if args.schemes is not None:
        updates["schemes"] = _parse_list(args.schemes, str, "schemes")
    if args.csit_error is not None:
        updates["csit_error_variances"] = _parse_list(args.csit_error, float,
                                                      "csit-error")
    return config.with_updates(**updates) if updates else config


def _cmd_sweep(args) -> int:
    config = _scenario_from_args(args)
    result = run_sweep(config, workers=args.workers)
    emit_results(result, format=args.format, destination=args.output)
    return 0


def _cmd_budget(args) -> int:
    ks = _parse_list(args.k, int, "k")
    ls = _parse_list(args.l, int, "l")
    schemes = _parse_list(args.schemes, str, "schemes")
    rows = [{"scheme": scheme, "k": k, "l": l,
             "feedback_real": feedback_budget(k, l, scheme).real_scalars,
             "feedback_complex": feedback_budget(k, l, scheme).complex_scalars}
            for k in ks for l in ls for scheme in schemes]
    if args.format == "json":
        text = json.dumps(rows, indent=2) + "\n"
    else:
        lines = ["scheme,k,l,feedback_real,feedback_complex"]
        lines += [f"{r['scheme']},{r['k']},{r['l']},{r['feedback_real']},"
                  f"{r['feedback_complex']}" for r in rows]
        text = "\n".join(lines) + "\n"
    _write(text, args.output)
    return 0


def _cmd_inspect(args) -> int:
    config = _scenario_from_args(args)
    rng = run_rng(config.seed, args.run_index)
    realization = realize(config, rng)
    views = None
    if SCHEME_BEAM_ZF_IMPERFECT in config.schemes:
        views = {variance: draw_csit_errors(
                     realization, variance,
                     csit_rng(config.seed, args.run_index, j))
                 for j, variance in enumerate(config.csit_error_variances)}
    outcomes = evaluate_realization(realization, config, views)

    diag = np.abs(np.diag(realization.omni_channel)) ** 2
    dump = {
        "seed": config.seed,
        "run_index": args.run_index,
        "normalization_constant": realization.normalization_constant,
        "omni_direct_gains": diag.tolist(),
        "cells": [],
    }
    for (scheme, snr_db, variance), outcome in sorted(
            outcomes.items(), key=lambda kv: (kv[0][1], kv[0][0], kv[0][2] or 0.0)):
        noise = config.noise_for(snr_db)
        cell = {
            "scheme": scheme,
            "snr_db": snr_db,
            "error_variance": variance,
            "rejected": outcome.rejected,
            "combination": list(outcome.combination.indices)
                           if outcome.combination else None,
            "beta": outcome.beta,
            "sinrs": list(outcome.report.sinrs) if outcome.report else None,
            "rates": list(outcome.report.rates) if outcome.report else None,
            "sum_rate": outcome.report.sum_rate if outcome.report else None,
            "direct_snr": (diag * noise.symbol_variance
                           / noise.noise_variance).tolist(),
        }
        dump["cells"].append(cell)
    _write(json.dumps(dump, indent=2) + "\n", args.output)
    return 0


def _write(text: str, destination) -> None:
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    try:
        Path(destination).write_text(text)
    except OSError as exc:
        raise EmitError(f"cannot write to {destination}: {exc}") from exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"sweep": _cmd_sweep, "budget": _cmd_budget,
                "inspect": _cmd_inspect}
    try:
        return handlers[args.command](args)
    except BeamlinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
