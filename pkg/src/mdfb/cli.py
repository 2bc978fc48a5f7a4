"""Command-line runner: ``mdfb reproduce <experiment>``, ``mdfb verify`` and ``mdfb run --config FILE``.

Exit codes: 0 success, 1 a verification check failed, 2 configuration
error, 3 numeric failure (the message names ``module.operation``).
"""

import argparse
import configparser
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from ._parallel import max_workers
from .errors import ConsistencyError, MdfbError, NumericalError, ParameterError
from .experiments import EXPERIMENTS, STOCHASTIC, config_fields, describe, versions

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# command-line flags that map onto config fields
FLAG_FIELDS = {"lam": "lam", "K": "K", "xi": "xi", "rounds": "rounds", "seed": "seed"}


class ConfigError(MdfbError):
    """Invalid experiment configuration."""


# -- value parsing ------------------------------------------------------------------


def _parse_scalar(kind, text, key):
    text = text.strip()
    try:
        if kind is int:
            value = float(text)
            if not value.is_integer():
                raise ValueError
            return int(value)
        if kind is float:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError
            return value
    except ValueError:
        raise ConfigError(f"{key}: expected {kind.__name__}, got {text!r}") from None
    return text


def parse_value(field, text):
    """Convert ``text`` to the type of ``field``'s default (tuples are comma-separated)."""
    default = field.default
    if isinstance(default, tuple):
        kind = type(default[0]) if default else str
        items = [t for t in text.split(",") if t.strip()]
        if not items and default:
            raise ConfigError(f"{field.name}: empty list")
        return tuple(_parse_scalar(kind, t, field.name) for t in items)
    return _parse_scalar(type(default), str(text), field.name)


def build_config(experiment, values):
    """Typed config for ``experiment`` from string ``values``; unknown keys are rejected."""
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    known = config_fields(experiment)
    unknown = sorted(set(values) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) for {experiment}: {', '.join(unknown)}; allowed: {', '.join(known)}")
    kwargs = {k: parse_value(known[k], v) for k, v in values.items()}
    return EXPERIMENTS[experiment][0](**kwargs)


def read_config_file(path):
    """Flat ``key = value`` file; ``#`` and ``;`` start comments; no sections."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string("[config]\n" + text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc.message if hasattr(exc, 'message') else exc}") from None
    if len(parser.sections()) != 1:
        raise ConfigError(f"{path}: sections are not allowed")
    return dict(parser["config"])


def parse_overrides(pairs):
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        k, v = pair.split("=", 1)
        out[k.strip()] = v.strip()
    return out


# -- output --------------------------------------------------------------------------


def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_cell(row.get(c)) for c in columns])


def meta_path(csv_path):
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.jsonl")


def write_meta(path, experiment, cfg, meta):
    header = {
        "experiment": experiment,
        "config": describe(cfg),
        "seed": getattr(cfg, "seed", None),
        "versions": versions(),
        "threads": max_workers(),
    }
    with open(path, "w") as fh:
        for record in [header, *meta]:
            fh.write(json.dumps(record, sort_keys=True, default=float) + "\n")


def execute(experiment, values, out=None, require_seed=False):
    """Build, run and write one experiment; returns the process exit code."""
    cfg = build_config(experiment, values)
    if require_seed and experiment in STOCHASTIC and "seed" not in values:
        raise ConfigError(f"{experiment} is stochastic: a seed is required")
    result = EXPERIMENTS[experiment][1](cfg)
    out = Path(out or f"{experiment}.csv")
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True)
    write_csv(out, result.columns, result.rows)
    write_meta(meta_path(out), experiment, cfg, result.meta)
    print(f"{experiment}: wrote {len(result.rows)} rows to {out}")
    if experiment == "verify":
        failed = [r["label"] for r in result.rows if not r["passed"]]
        for r in result.rows:
            print(f"  {'PASS' if r['passed'] else 'FAIL'} {r['label']}: {r['detail']}")
        return EXIT_CHECK_FAILED if failed else EXIT_OK
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------


def _add_common(p):
    p.add_argument("--out", help="CSV output path (metadata goes next to it as <stem>.meta.jsonl)")
    p.add_argument("--seed", type=str, help="64-bit seed for stochastic experiments")
    p.add_argument("--trials", type=str, help="Monte-Carlo trials (fig2) or vector count L (fig8)")
    p.add_argument("--lambda", dest="lam", type=str, help="exponential source rate (fig2)")
    p.add_argument("--K", type=str, help="descriptions per round (comma list where the experiment takes several)")
    p.add_argument("--xi", type=str, help="TVQ threshold (fig7)")
    p.add_argument("--rounds", type=str, help="number of rounds (fig7)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


def build_parser():
    parser = argparse.ArgumentParser(prog="mdfb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    rep = sub.add_parser("reproduce", help="reproduce one figure or table as CSV")
    rep.add_argument("experiment", choices=[e for e in EXPERIMENTS if e != "verify"])
    _add_common(rep)
    ver = sub.add_parser("verify", help="run the information-identity check suite")
    ver.add_argument("--out", help="CSV output path")
    ver.add_argument("--set", action="append", metavar="KEY=VALUE")
    run = sub.add_parser("run", help="run an experiment described by a config file")
    run.add_argument("--config", required=True, help="flat key = value file with an 'experiment' key")
    _add_common(run)
    return parser


def _flag_values(args, experiment):
    values = {}
    known = config_fields(experiment)
    for attr, key in FLAG_FIELDS.items():
        v = getattr(args, attr, None)
        if v is not None:
            values[key] = v
    trials = getattr(args, "trials", None)
    if trials is not None:
        values["trials" if "trials" in known else "L"] = trials
    return values


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return execute("verify", parse_overrides(args.set), args.out)
        if args.command == "reproduce":
            values = {**_flag_values(args, args.experiment), **parse_overrides(args.set)}
            return execute(args.experiment, values, args.out)
        values = read_config_file(args.config)
        experiment = values.pop("experiment", None)
        if experiment is None:
            raise ConfigError(f"{args.config}: missing 'experiment' key")
        out = values.pop("out", None)
        values.update(_flag_values(args, experiment) if experiment in EXPERIMENTS else {})
        values.update(parse_overrides(args.set))
        return execute(experiment, values, args.out or out, require_seed=True)
    except (ConfigError, ParameterError) as exc:
        print(f"mdfb: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ConsistencyError, MdfbError, FloatingPointError) as exc:
        print(f"mdfb: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
