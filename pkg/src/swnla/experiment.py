"""Run a sketch and the exact window in lockstep, and report the comparison."""

from __future__ import annotations

import copy
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cov_approx import CovSketchState
from .errors import InputError
from .l1_sliding import L1SlidingState
from .lowrank_pcp import PcpState
from .online_lra import OnlineLraState
from .oracle import WindowOracle, check_budget, oracle_metrics
from .reverse_sampler import MetaState, SamplerConfig
from .smooth_histogram import frobenius_histogram
from .spectral_histogram import SpectralHistogram
from .streams import StreamSpec, generate

SCHEMA = 1
ALGORITHMS = ("spectral-det", "spectral-sample", "pcp", "online-lra", "l1", "cov", "smooth-frobenius")
TIMING_KEYS = ("wall_time",)
_METRIC_KIND = {
    "spectral-det": "spectral-det",
    "spectral-sample": "spectral",
    "pcp": "pcp",
    "online-lra": "online",
    "l1": "l1",
    "cov": "cov",
}

DEFAULTS = {
    "schema": SCHEMA,
    "window": 16,
    "eps": 0.25,
    "rank": 2,
    "seed": 0,
    "trials": 1,
    "batch": 1,
    "mode": None,
    "c": None,
    "check_every": None,
    "min_success_rate": None,
}


def validate_config(raw: dict) -> dict:
    """Fill defaults and reject malformed configurations."""
    if not isinstance(raw, dict):
        raise InputError("config must be a JSON object")
    unknown = set(raw) - set(DEFAULTS) - {"algorithm", "stream"}
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    cfg = {**DEFAULTS, **copy.deepcopy(raw)}
    if cfg["schema"] != SCHEMA:
        raise InputError(f"unsupported schema {cfg['schema']!r}")
    if cfg.get("algorithm") not in ALGORITHMS:
        raise InputError(f"algorithm must be one of {ALGORITHMS}")
    s = cfg.get("stream")
    if not isinstance(s, dict) or not {"generator", "dim", "length"} <= set(s):
        raise InputError("stream needs generator, dim and length")
    for key in ("window", "trials", "batch"):
        if not isinstance(cfg[key], int) or cfg[key] < 1:
            raise InputError(f"{key} must be a positive integer")
    if not (0 < float(cfg["eps"]) < 1):
        raise InputError("eps must lie in (0, 1)")
    if not isinstance(cfg["rank"], int) or cfg["rank"] < 1:
        raise InputError("rank must be a positive integer")
    check_budget(cfg["window"], int(s["dim"]))
    if cfg["check_every"] is None:
        cfg["check_every"] = 1 if cfg["algorithm"] in ("spectral-det", "smooth-frobenius") else 0
    return cfg


def make_sketch(cfg: dict, seed: int):
    alg, n, W, eps, k = cfg["algorithm"], int(cfg["stream"]["dim"]), cfg["window"], float(cfg["eps"]), cfg["rank"]
    if alg == "spectral-det":
        return SpectralHistogram(n, eps, W, batch=cfg["batch"])
    if alg == "spectral-sample":
        return MetaState(SamplerConfig(n, W, eps, seed=seed, c=cfg["c"], batch=cfg["batch"]))
    if alg == "pcp":
        return PcpState(n, W, k, eps, seed=seed, c=cfg["c"], embed_kind=cfg["mode"] or "osnap")
    if alg == "online-lra":
        return OnlineLraState(n, k, eps, seed=seed, mode=cfg["mode"] or "frequent-directions", c=cfg["c"])
    if alg == "l1":
        return L1SlidingState(n, W, eps, seed=seed)
    if alg == "cov":
        return CovSketchState(n, W, eps, seed=seed, mode=cfg["mode"] or "words", c=cfg["c"])
    return frobenius_histogram(W)


def sketch_output(alg: str, sk):
    if alg == "spectral-det":
        return sk.query()[0]
    if alg == "online-lra":
        return sk.result()
    if alg == "smooth-frobenius":
        return sk.query()[0]
    return sk.query()


def _metrics(cfg: dict, oracle: WindowOracle, full: np.ndarray, out, seed: int) -> dict:
    alg = cfg["algorithm"]
    if alg == "smooth-frobenius":
        exact = float(np.sum(oracle.matrix() ** 2))
        q = float(out)
        return {"pass": bool(q / 2 - 1e-9 * (1 + q) <= exact <= q + 1e-9 * (1 + q)), "value": q, "exact": exact}
    source = full if alg == "online-lra" else oracle
    return oracle_metrics(source, out, _METRIC_KIND[alg], float(cfg["eps"]), k=cfg["rank"], seed=seed)


def _size(sk) -> int:
    return int(getattr(sk, "size", 0))


def run_trial(cfg: dict, seed: int) -> dict:
    s = cfg["stream"]
    spec = StreamSpec(s["generator"], int(s["dim"]), int(s["length"]), cfg["window"], seed, dict(s.get("params", {})))
    rows = generate(spec)
    n = rows.shape[1]
    oracle = WindowOracle(n, cfg["window"])
    sk = make_sketch({**cfg, "stream": {**s, "dim": n}}, seed)
    steps = []
    every = cfg["check_every"]
    start = time.perf_counter()
    for i, r in enumerate(rows, start=1):
        sk.ingest(r)
        oracle.push(r)
        if every and i % every == 0:
            m = _metrics(cfg, oracle, rows[:i], sketch_output(cfg["algorithm"], sk), seed)
            steps.append({"t": i, "stored": _size(sk), **m})
    final = _metrics(cfg, oracle, rows, sketch_output(cfg["algorithm"], sk), seed)
    final["stored"] = _size(sk)
    return {
        "seed": seed,
        "steps": steps,
        "final": final,
        "pass": bool(final["pass"] and all(st["pass"] for st in steps)),
        "wall_time": time.perf_counter() - start,
    }


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SWNLA_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class Report:
    algorithm: str
    config: dict
    trials: list[dict] = field(default_factory=list)
    aggregate: dict = field(default_factory=dict)
    passed: bool = True
    schema: int = SCHEMA

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "algorithm": self.algorithm,
            "config": self.config,
            "trials": self.trials,
            "aggregate": self.aggregate,
            "passed": self.passed,
        }

    def to_json(self, timing: bool = True) -> str:
        d = self.to_dict() if timing else strip_timing(self.to_dict())
        return json.dumps(d, indent=2, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    raise TypeError(f"cannot serialise {type(v).__name__}")


def strip_timing(d):
    if isinstance(d, dict):
        return {k: strip_timing(v) for k, v in d.items() if k not in TIMING_KEYS}
    if isinstance(d, list):
        return [strip_timing(v) for v in d]
    return d


def run_experiment(config: dict | str) -> Report:
    """Validate ``config`` (a dict, or a path to a JSON file) and run every trial."""
    if isinstance(config, (str, os.PathLike)):
        with open(config, encoding="utf-8") as fh:
            config = json.load(fh)
    cfg = validate_config(config)
    seeds = [cfg["seed"] + i for i in range(cfg["trials"])]
    workers = min(_threads(), len(seeds))
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            trials = list(pool.map(run_trial, [cfg] * len(seeds), seeds))
    else:
        trials = [run_trial(cfg, s) for s in seeds]
    rate = sum(t["pass"] for t in trials) / len(trials)
    stored = [t["final"]["stored"] for t in trials]
    steps = [st["pass"] for t in trials for st in t["steps"]]
    aggregate = {
        "success_rate": rate,
        "mean_stored": float(np.mean(stored)),
        "max_stored": int(max(stored)),
        "step_pass_rate": float(np.mean(steps)) if steps else None,
    }
    need = cfg["min_success_rate"]
    passed = rate >= (1.0 if need is None else float(need))
    return Report(cfg["algorithm"], cfg, trials, aggregate, passed)
