"""Command-line interface: ``blowup1d <command> [key=value ...] [flags]``.

Commands: profile, sim, verify, collapse, cusp, report.  Exit codes: 0 all
checks pass, 1 a check failed, 2 usage or configuration error, 3 numerical
breakdown.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

from .checks import TOLERANCES
from .commands import COMMANDS, EXIT_USAGE, Breakdown, Outcome
from .config import ConfigError, ExperimentConfig, parse_config
from .report import OutputError, ensure_writable, list_files, manifest, write_json

__all__ = ["main", "parse_config", "ExperimentConfig", "ConfigError"]


def _parser():
    p = argparse.ArgumentParser(
        prog="blowup1d",
        description="Self-similar blow-up profiles, simulations and checks for "
                    "omega_t + a u omega_x = 2 omega u_x.",
        epilog="Settings are key=value tokens (e.g. 'branch=holder n=3 terms=8 a=0.1'); "
               "tolerances.<name>=<value> overrides one acceptance tolerance.")
    p.add_argument("command", nargs="?", choices=sorted(COMMANDS),
                   help="what to run (may instead come from the config file)")
    p.add_argument("settings", nargs="*", metavar="key=value")
    p.add_argument("--config", help="file of key=value settings with optional [sections]")
    p.add_argument("--out", help="output directory (default 'out')")
    p.add_argument("--tol-scale", type=float, help="multiply every upper tolerance")
    p.add_argument("--seed", type=int, help="seed for randomized test families")
    p.add_argument("--jobs", type=int, help="worker processes for sweeps")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress")
    return p


def _overrides(args):
    out = []
    if args.command:
        out.append((None, "command", args.command, 0))
    for tok in args.settings:
        if "=" not in tok:
            raise ConfigError(f"command line: expected key=value, got {tok!r}")
        key, value = tok.split("=", 1)
        section = None
        if key.startswith("tolerances."):
            section, key = "tolerances", key.split(".", 1)[1]
        out.append((section, key, value, 0))
    for flag, key in (("out", "out"), ("tol_scale", "tol_scale"), ("seed", "seed"), ("jobs", "jobs")):
        v = getattr(args, flag)
        if v is not None:
            out.append((None, key, str(v), 0))
    return out


def load_config(args) -> ExperimentConfig:
    text = ""
    if args.config:
        try:
            with open(args.config) as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    return parse_config(text, _overrides(args), TOLERANCES)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args)
        ensure_writable(cfg.out)
    except (ConfigError, OutputError) as exc:
        print(f"blowup1d: {exc}", file=sys.stderr)
        return EXIT_USAGE

    start = time.perf_counter()
    try:
        outcome = COMMANDS[cfg.command](cfg, cfg.out)
    except Breakdown as exc:
        outcome = Outcome(breakdown=str(exc))
    except ValueError as exc:
        print(f"blowup1d: {exc}", file=sys.stderr)
        return EXIT_USAGE
    elapsed = time.perf_counter() - start

    for c in outcome.checks:
        print(c.line())
    if outcome.breakdown:
        print(f"BREAKDOWN {outcome.breakdown}", file=sys.stderr)
    code = outcome.code
    status = {0: "pass", 1: "fail", 3: "breakdown"}[code]
    write_json(os.path.join(cfg.out, "manifest.json"),
               manifest(cfg, outcome.checks, list_files(cfg.out), status,
                        dict(outcome.extra, breakdown=outcome.breakdown)))
    # wall-clock lives outside the JSON so that reruns give byte-identical JSON
    with open(os.path.join(cfg.out, "timing.txt"), "w") as fh:
        fh.write(f"wall_clock_seconds {elapsed:.3f}\n")
    return code
