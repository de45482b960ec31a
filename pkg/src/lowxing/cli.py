"""
Command-line entry point, ``lowxing`` or ``python -m lowxing``.

Data goes to ``--out`` (standard output by default); diagnostics go to
standard error.  Exit codes: 0 success, 1 invalid arguments or
configuration, 2 a ``verify`` suite failed one of its checks.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import contextmanager

from . import experiments
from .crossing import lowest_crossing, path_csv
from .events import EventSpec, compile_event, event_domain
from .lattice import Domain
from .sampling import sample

__all__ = ["main", "build_parser"]

SEED_ENV = "LOWXING_SEED"
COMMANDS = ("demo", "estimate", "moments", "sweep", "verify", "oracle", "dump-path")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- flag validation ------------------------------------------------------


def _ranged(name, kind, lo=None, hi=None, lo_open=False):
    def conv(text):
        try:
            val = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {kind.__name__}, got {text!r}")
        if lo is not None and (val <= lo if lo_open else val < lo):
            raise argparse.ArgumentTypeError(
                f"must be {'>' if lo_open else '>='} {lo}, got {val}")
        if hi is not None and val > hi:
            raise argparse.ArgumentTypeError(f"must be <= {hi}, got {val}")
        return val
    return conv


FLAGS = {
    "n": dict(type=_ranged("n", int, 1)),
    "m": dict(type=_ranged("m", int, 1)),
    "k": dict(type=_ranged("k", int)),
    "event": dict(type=str),
    "trials": dict(type=_ranged("trials", int, 1)),
    "seed": dict(type=_ranged("seed", int, 0)),
    "workers": dict(type=_ranged("workers", int, 1)),
    "truncation_factor": dict(type=_ranged("truncation-factor", float, 0, lo_open=True)),
    "p": dict(type=_ranged("p", float, 0.0, 1.0)),
    "format": dict(choices=("csv", "json")),
    "out": dict(type=str),
}

DEFAULTS = {
    "n": None, "m": None, "k": None, "event": None, "trials": 10_000,
    "seed": experiments.DEFAULT_SEED, "workers": 1, "truncation_factor": None,
    "p": 0.5, "format": "json", "out": "-",
}

# flags each command accepts, beyond --config
ACCEPTS = {
    "demo": ("n", "m", "seed", "p", "truncation_factor", "format", "out"),
    "estimate": ("event", "trials", "seed", "workers", "truncation_factor", "p", "format", "out"),
    "moments": ("n", "m", "trials", "seed", "workers", "truncation_factor", "p", "format", "out"),
    "sweep": ("event", "n", "m", "k", "trials", "seed", "workers", "truncation_factor", "p",
              "format", "out"),
    "verify": ("seed", "workers", "format", "out"),
    "oracle": ("event", "n", "truncation_factor", "format", "out"),
    "dump-path": ("n", "seed", "p", "truncation_factor", "out"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lowxing", description="Lowest crossings of critical site percolation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "demo": "sample one configuration and summarise its lowest crossing",
        "estimate": "estimate one event probability",
        "moments": "lowest-crossing statistics at one (n, m)",
        "sweep": "estimate an event kind over n = 4, 8, ... up to --n (plot-ready CSV)",
        "verify": "run a verification suite",
        "oracle": "exact event probability on a tiny domain by enumeration",
        "dump-path": "lowest crossing of one sample as q,r CSV",
    }
    for cmd in COMMANDS:
        p = sub.add_parser(cmd, help=helps[cmd])
        if cmd == "verify":
            p.add_argument("suite", choices=experiments.SUITES)
        for name in ACCEPTS[cmd]:
            flag = "--" + name.replace("_", "-")
            p.add_argument(flag, dest=name, default=argparse.SUPPRESS, **FLAGS[name])
        p.add_argument("--config", default=None, help="JSON file preloading any flag")
    return parser


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}")
    if not isinstance(data, dict):
        raise UsageError("--config: expected a JSON object")
    out = {}
    for key, val in data.items():
        name = key.replace("-", "_")
        if name not in FLAGS:
            raise UsageError(f"--config: unknown flag {key!r}")
        conv = FLAGS[name].get("type")
        try:
            val = conv(str(val)) if conv else val
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"--config: {key}: {exc}")
        if "choices" in FLAGS[name] and val not in FLAGS[name]["choices"]:
            raise UsageError(f"--config: {key} must be one of {FLAGS[name]['choices']}")
        out[name] = val
    return out


def resolve(argv) -> argparse.Namespace:
    """Parsed arguments with config-file and environment defaults applied."""
    ns = build_parser().parse_args(argv)
    opts = dict(DEFAULTS)
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            opts["seed"] = FLAGS["seed"]["type"](env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{SEED_ENV}: {exc}")
    cfg = _load_config(ns.config)
    for key in cfg:
        if key not in ACCEPTS[ns.command]:
            raise UsageError(f"--config: flag {key!r} does not apply to {ns.command}")
    opts.update(cfg)
    opts.update({k: v for k, v in vars(ns).items() if k in FLAGS})
    opts["command"] = ns.command
    opts["suite"] = getattr(ns, "suite", None)
    return argparse.Namespace(**opts)


# --- output -----------------------------------------------------------------


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _dump(obj, fmt):
    if fmt == "json":
        return experiments.report_json(obj)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(obj))
    w.writerow([experiments._fmt(v) for v in obj.values()])
    return buf.getvalue()


def _need(opts, *names):
    for name in names:
        if getattr(opts, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required for {opts.command}")


def _event(text):
    try:
        return EventSpec.parse(text)
    except ValueError as exc:
        raise UsageError(f"--event: {exc}")


# --- commands ---------------------------------------------------------------


def cmd_demo(o):
    _need(o, "n")
    m = o.m
    if m is not None and (o.n % m or m > o.n // 2):
        raise UsageError(f"--m: must divide --n and be at most n/2, got m={m}, n={o.n}")
    dom = Domain(o.n, o.truncation_factor or 2.0)
    res = lowest_crossing(sample(dom, o.p, o.seed, 0), m=m)
    out = {
        "n": o.n, "m": m, "seed": o.seed, "p": o.p,
        "truncation_factor": dom.truncation_factor,
        "exists": res is not None,
        "min_distance": None if res is None else res.min_distance_to_AB,
        "X": (0 if res is None else res.X) if m is not None else None,
        "contacts": 0 if res is None else len(res.contact_points),
        "path_length": 0 if res is None else len(res.path),
        "touched_truncation": False if res is None else res.touched_truncation,
    }
    return _dump(out, o.format), 0


def cmd_estimate(o):
    _need(o, "event")
    rec = experiments.run_estimate(
        _event(o.event), {"truncation_factor": o.truncation_factor or 4.0}, o.trials, o.seed,
        p=o.p, workers=o.workers)
    if o.format == "csv":
        return experiments.records_csv([rec]), 0
    return experiments.report_json(rec), 0


def cmd_moments(o):
    _need(o, "n", "m")
    rec = experiments.run_moments(o.n, o.m, o.trials, o.seed, o.truncation_factor or 2.0,
                                  p=o.p, workers=o.workers)
    if o.format == "csv":
        return experiments.records_csv([rec]), 0
    return experiments.report_json(rec), 0


def cmd_sweep(o):
    _need(o, "event", "n")
    kind = o.event.strip()
    if "(" in kind:
        raise UsageError("--event: give only the event kind for sweep, e.g. --event G")
    ns = []
    x = 4
    while x <= o.n:
        ns.append(x)
        x *= 2
    if not ns:
        raise UsageError("--n: sweep needs --n >= 4")
    recs = []
    for n in ns:
        kw = {"n": n}
        if kind in ("D", "D_annulus", "F", "G"):
            kw["v"] = 0
        for name in ("m", "k"):
            if getattr(o, name) is not None:
                kw[name] = getattr(o, name)
        try:
            spec = EventSpec(kind, **kw)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"--event: {exc}")
        recs.append(experiments.run_estimate(
            spec, {"truncation_factor": o.truncation_factor or 4.0}, o.trials, o.seed,
            p=o.p, workers=o.workers))
    if o.format == "csv":
        return experiments.records_csv(recs), 0
    return experiments.report_json({"records": recs}), 0


def cmd_verify(o):
    report = experiments.verify_suite(o.suite, master_seed=o.seed, workers=o.workers)
    for name, v in report["verdicts"].items():
        if not v["pass"]:
            print(f"FAIL {name}", file=sys.stderr)
    if o.format == "csv":
        text = experiments.records_csv(
            [r for r in report["records"] if isinstance(r, experiments.EstimateRecord)])
    else:
        text = experiments.report_json(report)
    return text, 0 if report["pass"] else 2


def cmd_oracle(o):
    from .oracle import enumerate_probability

    _need(o, "event")
    spec = _event(o.event)
    if o.n is not None and o.n != spec.n:
        raise UsageError("--n: conflicts with the n inside --event")
    dom = event_domain(spec, o.truncation_factor or 2.0)
    prob = enumerate_probability(dom, compile_event(spec, dom))
    out = {
        "event": str(spec), "sites": dom.site_count, "numerator": str(prob.numerator),
        "log2_denominator": prob.log2_denominator, "probability": prob.float_value,
    }
    return _dump(out, o.format), 0


def cmd_dump_path(o):
    _need(o, "n")
    dom = Domain(o.n, o.truncation_factor or 2.0)
    res = lowest_crossing(sample(dom, o.p, o.seed, 0))
    if res is None:
        print("no crossing inside the domain", file=sys.stderr)
        return "q,r\n", 0
    return path_csv(res), 0


HANDLERS = {
    "demo": cmd_demo, "estimate": cmd_estimate, "moments": cmd_moments, "sweep": cmd_sweep,
    "verify": cmd_verify, "oracle": cmd_oracle, "dump-path": cmd_dump_path,
}


def main(argv=None) -> int:
    try:
        opts = resolve(sys.argv[1:] if argv is None else argv)
        text, code = HANDLERS[opts.command](opts)
    except UsageError as exc:
        print(f"lowxing: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as exc:
        print(f"lowxing: error: {exc}", file=sys.stderr)
        return 1
    with _sink(opts.out) as fh:
        fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
