"""Randomized sliding-window spectral approximation by reverse-online sampling.

Every arrival is stored with probability 1. Then each older stored row is
re-tested against the Gram of the rows kept after it. Its target probability
is ``min(2c·l, 1)``, where ``l`` is its ridge score with respect to itself
plus that later Gram. Cumulative keep probabilities only shrink, and a kept
row is stored as ``raw / √p``. Rows that leave the window are discarded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._rng import TAG_BATCHED, TAG_DOWNSAMPLE, TAG_META, keyed_generator, keyed_uniform
from .errors import DimensionError, InputError
from .linalg import as_row, ridge_quadratic

EXACT_SCORE_LIMIT = 512


@dataclass
class SampledRow:
    """A stored row: the raw arrival, its cumulative keep probability and time."""

    raw: np.ndarray
    prob: float
    time: int

    @property
    def row(self) -> np.ndarray:
        return self.raw / math.sqrt(self.prob)

    @property
    def raw_norm(self) -> float:
        return float(np.linalg.norm(self.raw))

    def to_dict(self) -> dict:
        return {"raw": self.raw.tolist(), "prob": self.prob, "time": self.time}

    @classmethod
    def from_dict(cls, d: dict) -> "SampledRow":
        return cls(np.asarray(d["raw"], dtype=float), float(d["prob"]), int(d["time"]))


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters of a reverse-online sampler.

    ``c`` defaults to ``alpha_os · ln(n) / eps²`` with ``alpha_os = 12 p`` and
    ``p`` the smallest exponent with ``W < n^p``. Passing ``c`` directly
    overrides the derivation (useful for observing sampling at desk scale).
    """

    dim: int
    window: int
    eps: float
    lam: float = 0.0
    seed: int = 0
    alpha_os: float | None = None
    p_exponent: float | None = None
    c: float | None = None
    batch: int = 64
    exact_limit: int = EXACT_SCORE_LIMIT

    def __post_init__(self):
        if self.dim < 1 or self.window < 1:
            raise InputError("dim and window must be positive")
        if not (0 < self.eps < 1):
            raise InputError("eps must lie in (0, 1)")
        if self.lam < 0:
            raise InputError("lam must be nonnegative")
        if self.batch < 1:
            raise InputError("batch must be positive")
        if self.c is not None and self.c <= 0:
            raise InputError("c must be positive")

    @property
    def exponent(self) -> float:
        if self.p_exponent is not None:
            return self.p_exponent
        if self.dim < 2:
            return 1.0
        return math.log(self.window + 1) / math.log(self.dim)

    @property
    def oversampling(self) -> float:
        if self.c is not None:
            return float(self.c)
        alpha = self.alpha_os if self.alpha_os is not None else 12.0 * self.exponent
        return max(1.0, alpha * math.log(max(self.dim, 2)) / self.eps**2)

    def space_budget(self) -> float:
        """``40 (n/ε²) log n log(n/ε)`` rows, the empirical storage yardstick."""
        n, e = max(self.dim, 2), self.eps
        return 40.0 * (n / e**2) * math.log(n) * math.log(n / e)


def _sketch_score(G: np.ndarray, x: np.ndarray, p: float, lam: float) -> float:
    """``x (a⊤a + G + λI)^† x⊤`` where ``a = x/√p`` is the stored copy of ``x``."""
    u, novel = ridge_quadratic(G, x, lam)
    if novel:
        return p
    if u <= 0.0:
        return 0.0
    return p * u / (p + u)


def _surely_kept(G: np.ndarray, x: np.ndarray, p: float, lam: float, c2: float) -> bool:
    """Cheap certificate that ``min(p, c2·score) == p``.

    With ``u = x (G + λI)^† x⊤`` the score is ``p u / (p + u)``, so the row keeps
    its probability whenever ``u (c2 - 1) >= p``; ``u >= ‖x‖² / (tr G + λ)``
    gives a sufficient test without an eigendecomposition.
    """
    xx = float(x @ x)
    if xx == 0.0 or c2 <= 1.0:
        return False
    denom = float(np.trace(G)) + lam
    if denom <= 0.0:
        return True
    return (xx / denom) * (c2 - 1.0) >= p


def downsample(
    rows: Sequence[SampledRow],
    gram_tail: np.ndarray,
    cfg: SamplerConfig,
    lam: float | Sequence[float] | None = None,
    nonce: int = 0,
    tag: int = TAG_DOWNSAMPLE,
    ledger: list | None = None,
) -> tuple[list[SampledRow], np.ndarray]:
    """Re-test ``rows`` newest to oldest against the Gram of later kept rows.

    Returns the surviving rows (oldest first, probabilities updated) and the
    Gram of those survivors plus ``gram_tail``. When ``ledger`` is a list it
    receives ``(time, keep_probability, kept)`` for every row examined.
    """
    n = cfg.dim
    G = np.array(gram_tail, dtype=float, copy=True)
    if G.shape != (n, n):
        raise DimensionError(f"gram_tail must be {n}x{n}")
    if lam is None:
        lams = [cfg.lam] * len(rows)
    elif np.isscalar(lam):
        lams = [float(lam)] * len(rows)
    else:
        lams = [float(v) for v in lam]
        if len(lams) != len(rows):
            raise DimensionError("one lambda per row is required")
    c2 = 2.0 * cfg.oversampling
    kept: list[SampledRow] = []
    for idx in range(len(rows) - 1, -1, -1):
        row = rows[idx]
        if row.raw.shape[0] != n:
            raise DimensionError("row dimension mismatch")
        p = row.prob
        if _surely_kept(G, row.raw, p, lams[idx], c2):
            q = p
        else:
            score = min(_sketch_score(G, row.raw, p, lams[idx]), 1.0)
            q = min(p, c2 * score, 1.0)
        keep_prob = q / p if p > 0 else 0.0
        if keep_prob >= 1.0:
            keep = True
        elif keep_prob <= 0.0:
            keep = False
        else:
            keep = keyed_uniform(cfg.seed, tag, row.time, nonce) < keep_prob
        if ledger is not None:
            ledger.append((row.time, keep_prob, keep))
        if keep:
            new = SampledRow(row.raw, q, row.time)
            kept.append(new)
            a = new.row
            G += np.outer(a, a)
    kept.reverse()
    return kept, G


def approx_reverse_scores_batched(
    rows: Sequence[SampledRow] | np.ndarray, embed_dim: int = 64, seed: int = 0, nonce: int = 0
) -> np.ndarray:
    """Sign-sketch estimates of the reverse-online scores of the stored rows.

    For row ``i`` with suffix Gram ``G_i`` (rows ``i`` onward) the exact score
    is ``‖X_i G_i^† a_i‖²``, with ``X_i`` the suffix matrix. Replacing ``X_i``
    by ``Π X_i`` for a random ``embed_dim``-row sign matrix gives the estimate,
    and the suffix products ``Π X_i`` are accumulated in one backward sweep.
    """
    if isinstance(rows, np.ndarray):
        X = np.atleast_2d(np.asarray(rows, dtype=float))
    else:
        X = np.asarray([r.row for r in rows], dtype=float)
    m = X.shape[0]
    if m == 0:
        return np.zeros(0)
    n = X.shape[1]
    g = keyed_generator(seed, TAG_BATCHED, nonce)
    Pi = np.where(g.integers(0, 2, size=(m, embed_dim)) == 1, 1.0, -1.0) / math.sqrt(embed_dim)
    Y = np.zeros((embed_dim, n))
    G = np.zeros((n, n))
    out = np.zeros(m)
    eps = np.finfo(float).eps
    for i in range(m - 1, -1, -1):
        a = X[i]
        Y += np.outer(Pi[i], a)
        G += np.outer(a, a)
        if not np.any(a):
            continue
        w, V = np.linalg.eigh(G)
        cut = max(w[-1], 0.0) * n * eps
        inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
        z = V @ (inv * (V.T @ a))
        v = Y @ z
        out[i] = min(float(v @ v), 1.0)
    return out


@dataclass
class MetaState:
    """State of the reverse-online sampler over a sliding window."""

    cfg: SamplerConfig
    rows: list[SampledRow] = field(default_factory=list)
    now: int = 0
    pending: list[SampledRow] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.rows) + len(self.pending)

    def ingest(self, r, t: int | None = None, lams: Sequence[float] | None = None) -> "MetaState":
        x = as_row(r, self.cfg.dim)
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError(f"timestamp {t} is not after {self.now}")
        self.now = t
        self.pending.append(SampledRow(x, 1.0, t))
        if len(self.pending) >= self.cfg.batch:
            self.flush(lams)
        return self

    def flush(self, lams: Sequence[float] | None = None) -> None:
        if not self.pending:
            return
        fresh = self.pending
        self.pending = []
        tail = np.zeros((self.cfg.dim, self.cfg.dim))
        for s in fresh:
            tail += np.outer(s.raw, s.raw)
        if len(self.rows) + len(fresh) <= self.cfg.exact_limit:
            kept, _ = downsample(self.rows, tail, self.cfg, lams, nonce=self.now, tag=TAG_META)
        else:
            kept = self._downsample_estimated(fresh)
        self.rows = kept + fresh
        self._expire()

    def _downsample_estimated(self, fresh: list[SampledRow]) -> list[SampledRow]:
        # Above the exact-score limit: one sign-sketch pass over the pre-pass
        # suffix, with a factor-2 inflation covering the estimate's slack.
        est = approx_reverse_scores_batched(self.rows + fresh, seed=self.cfg.seed, nonce=self.now)
        c2 = 2.0 * self.cfg.oversampling
        kept = []
        for row, e in zip(self.rows, est[: len(self.rows)]):
            p = row.prob
            q = min(p, c2 * min(2.0 * p * e, 1.0), 1.0)
            keep_prob = q / p
            if keep_prob >= 1.0 or (keep_prob > 0 and keyed_uniform(self.cfg.seed, TAG_META, row.time, self.now) < keep_prob):
                kept.append(SampledRow(row.raw, q, row.time))
        return kept

    def _expire(self) -> None:
        start = self.now - self.cfg.window + 1
        while self.rows and self.rows[0].time < start:
            self.rows.pop(0)

    # -- queries --------------------------------------------------------------
    def window_start(self) -> int:
        return self.now - self.cfg.window + 1

    def suffix_rows(self, cut: int | None = None) -> list[SampledRow]:
        """Stored rows with time ≥ ``cut`` (default: the window start)."""
        cut = self.window_start() if cut is None else max(int(cut), self.window_start())
        return [s for s in self.rows + self.pending if s.time >= cut]

    def query(self, cut: int | None = None) -> np.ndarray:
        """Rescaled stored rows approximating the suffix from ``cut`` (default: the window)."""
        rows = self.suffix_rows(cut)
        if not rows:
            return np.zeros((0, self.cfg.dim))
        return np.asarray([s.row for s in rows])

    def query_gram(self, cut: int | None = None) -> np.ndarray:
        M = self.query(cut)
        return M.T @ M

    # -- persistence ----------------------------------------------------------
    def to_dict(self) -> dict:
        cfg = {k: getattr(self.cfg, k) for k in self.cfg.__dataclass_fields__}
        return {
            "cfg": cfg,
            "now": self.now,
            "rows": [s.to_dict() for s in self.rows],
            "pending": [s.to_dict() for s in self.pending],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MetaState":
        return cls(
            SamplerConfig(**d["cfg"]),
            [SampledRow.from_dict(s) for s in d["rows"]],
            int(d["now"]),
            [SampledRow.from_dict(s) for s in d["pending"]],
        )


def new_meta(cfg: SamplerConfig) -> MetaState:
    return MetaState(cfg)


def meta_ingest(st: MetaState, r, t: int | None = None) -> MetaState:
    return st.ingest(r, t)


def meta_query(st: MetaState, cut: int | None = None) -> np.ndarray:
    return st.query(cut)


__all__ = [
    "SampledRow",
    "SamplerConfig",
    "MetaState",
    "downsample",
    "approx_reverse_scores_batched",
    "new_meta",
    "meta_ingest",
    "meta_query",
]
