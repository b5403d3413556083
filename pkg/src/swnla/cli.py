"""Command-line entry point ``swnla``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import experiment
from .errors import SwnlaError
from .io import read_stream, write_stream
from .oracle import WindowOracle, oracle_metrics
from .streams import GENERATORS, StreamSpec, generate

SKETCHES = ("spectral-det", "spectral-sample", "pcp", "online-lra", "l1", "cov")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="stream file (text or binary)")
    p.add_argument("--output", help="where to write the sketch rows (text format)")
    p.add_argument("--window", type=int, default=16)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1, help="independent seeds; the summary reports the success rate")
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--mode", default=None, help="embedding kind, residual mode, or cov words/bits")
    p.add_argument("--c", type=float, default=None, help="override the oversampling constant")
    p.add_argument("--verify", action="store_true", help="compare against the exact window")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="swnla", description="Sliding-window matrix sketches.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name in SKETCHES:
        _common(sub.add_parser(name, help=f"run the {name} sketch over a stream file"))
    chk = sub.add_parser("check", help="run an experiment config against the exact oracle")
    chk.add_argument("config")
    chk.add_argument("--output", help="write the JSON report here")
    chk.add_argument("--seed", type=int)
    chk.add_argument("--trials", type=int)
    chk.add_argument("--no-timing", action="store_true", help="omit timing fields from the report")
    gen = sub.add_parser("gen", help="write a generated stream")
    gen.add_argument("--generator", choices=GENERATORS, default="gaussian")
    gen.add_argument("--dim", type=int, required=True)
    gen.add_argument("--length", type=int, required=True)
    gen.add_argument("--window", type=int, default=16)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    gen.add_argument("--binary", action="store_true")
    gen.add_argument("--output", required=True)
    return ap


def _run_sketch(args) -> int:
    rows = read_stream(args.input)
    n = rows.shape[1]
    cfg = experiment.validate_config(
        {
            "algorithm": args.cmd,
            "stream": {"generator": "gaussian", "dim": n, "length": rows.shape[0]},
            "window": args.window,
            "eps": args.eps,
            "rank": args.rank,
            "batch": args.batch,
            "mode": args.mode,
            "c": args.c,
        }
    )
    passes, summary = [], {}
    out = None
    for seed in range(args.seed, args.seed + args.trials):
        sk = experiment.make_sketch(cfg, seed)
        oracle = WindowOracle(n, args.window)
        for r in rows:
            sk.ingest(r)
            oracle.push(r)
        out = experiment.sketch_output(args.cmd, sk)
        summary = {"algorithm": args.cmd, "seed": seed, "stored": int(getattr(sk, "size", 0))}
        if args.verify:
            source = rows if args.cmd == "online-lra" else oracle
            kind = experiment._METRIC_KIND[args.cmd]
            m = oracle_metrics(source, out, kind, args.eps, k=args.rank, seed=seed)
            passes.append(bool(m["pass"]))
            summary["metrics"] = m
    if args.trials > 1 and passes:
        summary["success_rate"] = sum(passes) / len(passes)
    if args.output:
        write_stream(args.output, np.atleast_2d(out) if np.size(out) else np.zeros((0, n)))
    print(json.dumps(summary, sort_keys=True, default=experiment._jsonable))
    return 0 if all(passes) else 1


def _run_check(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = json.load(fh)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.trials is not None:
        cfg["trials"] = args.trials
    report = experiment.run_experiment(cfg)
    text = report.to_json(timing=not args.no_timing)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(json.dumps({"passed": report.passed, **report.aggregate}, sort_keys=True))
    return 0 if report.passed else 1


def _parse_value(v: str):
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def _run_gen(args) -> int:
    params = {}
    for item in args.param:
        key, sep, val = item.partition("=")
        if not sep:
            raise SwnlaError(f"--param expects KEY=VALUE, got {item!r}")
        params[key] = _parse_value(val)
    spec = StreamSpec(args.generator, args.dim, args.length, args.window, args.seed, params)
    write_stream(args.output, generate(spec), binary=args.binary)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.cmd == "check":
            return _run_check(args)
        if args.cmd == "gen":
            return _run_gen(args)
        return _run_sketch(args)
    except (SwnlaError, OSError, json.JSONDecodeError) as exc:
        print(f"swnla: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
