"""Sliding-window rank-k projection-cost-preserving samples.

Two structures advance in lockstep. The first, :class:`EstimateState`, embeds
rows into a few dimensions with a seeded random map. It runs a coarse
reverse-online sampler on the embedded rows and answers, for any cut time, a
constant-factor underestimate ``ζ`` of the rank-k residual of the suffix
starting there.

The second, :class:`PcpState`, is the reverse-online sampler again, except
that a stored row from time ``t_j`` is scored with ridge parameter
``λ_j = ζ(t_j)``. Ridge regularisation keeps far fewer rows than pure
spectral sampling while preserving every rank-k projection cost.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import TAG_PCP
from .errors import InputError
from .linalg import EmbeddingSpec, apply_embedding, as_row
from .reverse_sampler import MetaState, SampledRow, SamplerConfig, downsample

# ζ is the suffix-sketch residual times this factor; see the decisions ledger.
ESTIMATE_FACTOR = 1.0 / math.sqrt(8.0)
ESTIMATE_ETA = 0.5


def default_embed_dim(k: int, window: int) -> int:
    return k + int(math.ceil(math.log2(max(window, 2)))) + 8


@dataclass
class EstimateState:
    dim: int
    window: int
    k: int
    seed: int = 0
    kind: str = "osnap"
    embed_dim: int | None = None
    factor: float = ESTIMATE_FACTOR
    inner_c: float | None = None
    embed: EmbeddingSpec = field(init=False)
    inner: MetaState = field(init=False)

    def __post_init__(self):
        if self.k < 0:
            raise InputError("k must be nonnegative")
        d = self.embed_dim or default_embed_dim(self.k, self.window)
        self.embed_dim = d
        self.embed = EmbeddingSpec(self.kind, self.dim, d, seed=self.seed)
        cfg = SamplerConfig(d, self.window, ESTIMATE_ETA, seed=self.seed + 1, c=self.inner_c, batch=1)
        self.inner = MetaState(cfg)

    @property
    def now(self) -> int:
        return self.inner.now

    def ingest(self, r, t: int | None = None) -> "EstimateState":
        x = as_row(r, self.dim)
        self.inner.ingest(apply_embedding(self.embed, x), t)
        return self

    def query(self, cut: int) -> float:
        """``ζ`` for the suffix starting at time ``cut``."""
        return float(self.query_many([cut])[0])

    def query_many(self, cuts) -> np.ndarray:
        """``ζ`` for several cut times, sharing one backward accumulation.

        A cut uses the stored embedded rows with time at or after it.
        """
        rows = self.inner.suffix_rows()
        cuts = [int(c) for c in cuts]
        out = np.zeros(len(cuts))
        if not rows or not cuts:
            return out
        times = [s.time for s in rows]
        d = self.embed_dim
        suffix = np.zeros((len(rows) + 1, d, d))
        for i in range(len(rows) - 1, -1, -1):
            a = rows[i].row
            suffix[i] = suffix[i + 1] + np.outer(a, a)
        idx = [bisect.bisect_left(times, c) for c in cuts]
        w = np.linalg.eigvalsh(suffix[idx])
        w = np.maximum(w[:, ::-1], 0.0)
        resid = np.sum(w[:, self.k :], axis=1)
        return self.factor * resid


@dataclass
class PcpState:
    """Sliding-window projection-cost-preserving sampler."""

    dim: int
    window: int
    k: int
    eps: float
    seed: int = 0
    c: float | None = None
    alpha_os: float | None = None
    embed_kind: str = "osnap"
    embed_dim: int | None = None
    estimate_factor: float = ESTIMATE_FACTOR
    cfg: SamplerConfig = field(init=False)
    est: EstimateState = field(init=False)
    rows: list[SampledRow] = field(default_factory=list)
    now: int = 0

    def __post_init__(self):
        self.cfg = SamplerConfig(self.dim, self.window, self.eps, seed=self.seed, c=self.c, alpha_os=self.alpha_os, batch=1)
        self.est = EstimateState(
            self.dim, self.window, self.k, seed=self.seed * 7919 + 17, kind=self.embed_kind,
            embed_dim=self.embed_dim, factor=self.estimate_factor,
        )

    @property
    def size(self) -> int:
        return len(self.rows)

    def ingest(self, r, t: int | None = None) -> "PcpState":
        x = as_row(r, self.dim)
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError(f"timestamp {t} is not after {self.now}")
        self.now = t
        self.est.ingest(x, t)
        lams = self.est.query_many([s.time for s in self.rows]) if self.rows else []
        kept, _ = downsample(self.rows, np.outer(x, x), self.cfg, lam=list(lams), nonce=t, tag=TAG_PCP)
        self.rows = kept + [SampledRow(x, 1.0, t)]
        start = t - self.window + 1
        while self.rows and self.rows[0].time < start:
            self.rows.pop(0)
        return self

    def query(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.dim))
        return np.asarray([s.row for s in self.rows])


def estimate_ingest(st: EstimateState, r, t: int | None = None) -> EstimateState:
    return st.ingest(r, t)


def estimate_query(st: EstimateState, cut: int) -> float:
    return st.query(cut)


def pcp_ingest(st: PcpState, r, t: int | None = None) -> PcpState:
    return st.ingest(r, t)


def pcp_query(st: PcpState) -> np.ndarray:
    return st.query()
