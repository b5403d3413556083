"""Sliding-window covariance approximation by squared-norm sampling.

Rows live in buckets. Each bucket carries a start time and the exact squared
Frobenius norm ``g`` of every row from that start to now. A stored row keeps
the bookkeeping value ``p = c·‖r‖²/g_bucket`` with ``c = 18/ε²``. Its
actual keep probability is ``min(p, 1)``. Each arrival grows every ``g``,
and each stored row is downsampled to match the new ratio. Buckets merge
whenever ``g`` has not halved, so the first bucket's ``g`` is within a factor
of two of the window's. The query rescales each row by ``1/√min(p, 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import TAG_COV, keyed_uniform
from .errors import InputError
from .linalg import as_row
from .reverse_sampler import SampledRow

_UPDATE, _MERGE = 0, 1


@dataclass
class Bucket:
    start: int
    g: float
    rows: list[SampledRow] = field(default_factory=list)


def round_entry(v: float, eps: float) -> float:
    """Round ``v`` to the nearest signed power of ``1 + ε/6`` (in log scale)."""
    if v == 0:
        return 0.0
    base = 1.0 + eps / 6.0
    m = round(math.log(abs(v)) / math.log(base))
    return math.copysign(base**m, v)


def encode_bits(row, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Exponents (``int16``) and sign/zero codes (``int8``: -1, 0, +1) of a rounded row."""
    x = np.asarray(row, float)
    base = math.log1p(eps / 6.0)
    sign = np.sign(x).astype(np.int8)
    exps = np.zeros(x.shape, dtype=np.int16)
    nz = x != 0
    m = np.rint(np.log(np.abs(x[nz])) / base)
    if m.size and (m.min() < np.iinfo(np.int16).min or m.max() > np.iinfo(np.int16).max):
        raise InputError("exponent does not fit in 16 bits")
    exps[nz] = m.astype(np.int16)
    return exps, sign


def decode_bits(exps: np.ndarray, sign: np.ndarray, eps: float) -> np.ndarray:
    base = 1.0 + eps / 6.0
    return sign.astype(float) * np.power(base, exps.astype(float))


@dataclass
class CovSketchState:
    """Covariance sketch; ``mode="bits"`` stores rows rounded to powers of ``1+ε/6``.

    In bits mode the sampler itself runs at ``ε/8``.
    """

    dim: int
    window: int
    eps: float
    seed: int = 0
    mode: str = "words"
    c: float | None = None
    buckets: list[Bucket] = field(default_factory=list)
    now: int = 0

    def __post_init__(self):
        if self.dim < 1 or self.window < 1:
            raise InputError("dim and window must be positive")
        if not (0 < self.eps < 1):
            raise InputError("eps must lie in (0, 1)")
        if self.mode not in ("words", "bits"):
            raise InputError(f"unknown mode {self.mode!r}")
        self.inner_eps = self.eps / 8.0 if self.mode == "bits" else self.eps
        if self.c is None:
            self.c = 18.0 / self.inner_eps**2

    @property
    def size(self) -> int:
        return sum(len(b.rows) for b in self.buckets)

    def _keep(self, row: SampledRow, q: float, phase: int) -> bool:
        ratio = min(q, 1.0) / min(row.prob, 1.0)
        if ratio >= 1.0:
            return True
        return ratio > 0 and keyed_uniform(self.seed, TAG_COV, phase, row.time, self.now) < ratio

    def ingest(self, r, t: int | None = None) -> "CovSketchState":
        x = as_row(r, self.dim)
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError(f"timestamp {t} is not after {self.now}")
        self.now = t
        w = float(x @ x)
        # Downsample every stored row to its new ratio.
        for b in self.buckets:
            old = b.g
            b.g = old + w
            if w == 0.0:
                continue
            survivors = []
            for row in b.rows:
                q = row.prob * old / b.g
                if self._keep(row, q, _UPDATE):
                    survivors.append(SampledRow(row.raw, q, row.time))
            b.rows = survivors
        stored = x if self.mode == "words" else np.array([round_entry(v, self.eps) for v in x])
        fresh = Bucket(t, w, [SampledRow(stored, self.c, t)] if w > 0 else [])
        self.buckets.append(fresh)
        self._compress()
        self._expire()
        return self

    def _compress(self) -> None:
        i = 0
        while i < len(self.buckets) - 2:
            gi = self.buckets[i].g
            j = i + 1
            while j + 1 < len(self.buckets) and self.buckets[j + 1].g >= 0.5 * gi:
                j += 1
            if j > i + 1:
                target = self.buckets[i]
                for b in self.buckets[i + 1 : j]:
                    for row in b.rows:
                        q = row.prob * b.g / gi if gi > 0 else row.prob
                        if self._keep(row, q, _MERGE):
                            target.rows.append(SampledRow(row.raw, q, row.time))
                del self.buckets[i + 1 : j]
            i += 1

    def _expire(self) -> None:
        start = self.now - self.window + 1
        if self.buckets:
            self.buckets[0].rows = [s for s in self.buckets[0].rows if s.time >= start]
        while len(self.buckets) >= 2 and self.buckets[1].start <= start:
            del self.buckets[0]

    def check_bookkeeping(self, norms: dict[int, float], rtol: float = 1e-12) -> bool:
        """Every stored ``p`` equals ``c·‖r‖²/g_bucket``; ``norms`` maps time to ``‖r‖²``."""
        for b in self.buckets:
            for s in b.rows:
                want = self.c * norms[s.time] / b.g
                if abs(s.prob - want) > rtol * max(abs(want), 1.0):
                    return False
        return True

    def query(self) -> np.ndarray:
        rows = [s.raw / math.sqrt(min(s.prob, 1.0)) for b in self.buckets for s in b.rows]
        if not rows:
            return np.zeros((0, self.dim))
        return np.asarray(rows)


def cov_ingest(st: CovSketchState, r, t: int | None = None) -> CovSketchState:
    return st.ingest(r, t)


def cov_query(st: CovSketchState) -> np.ndarray:
    return st.query()
