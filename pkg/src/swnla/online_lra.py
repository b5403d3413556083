"""Online rank-k projection-cost-preserving row sampling.

Each arriving row is kept or discarded on the spot, and the decision is
never revisited. A row is kept with probability ``min(2c·τ, 1)``, where ``τ``
is its ridge score against the kept rows plus itself. The ridge parameter is
half of a running estimate of ``‖A - A_k‖_F² / k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import TAG_ONLINE, keyed_uniform
from .errors import InputError
from .linalg import as_row, residual_from_gram, ridge_quadratic


class ExactResidual:
    """Exact ``‖A - A_k‖_F² / k`` from the running Gram of every row seen."""

    mode = "exact-oracle"

    def __init__(self, dim: int, k: int):
        self.k = k
        self.G = np.zeros((dim, dim))

    def update(self, r) -> None:
        x = np.asarray(r, float)
        self.G += np.outer(x, x)

    def query(self) -> float:
        if self.k == 0:
            return float(np.trace(self.G))
        return residual_from_gram(self.G, self.k) / self.k


class FrequentDirectionsResidual:
    """Residual estimate from a frequent-directions sketch.

    The sketch ``B`` has ``2k + ceil(1/η)`` rows, and the total shrinkage ``Δ``
    is tracked. Because ``0 ⪯ A⊤A - B⊤B ⪯ Δ·I``, each of the top ``k``
    eigenvalues of ``A⊤A`` lies within ``Δ`` of the matching one for ``B⊤B``.
    The estimate uses the midpoint, ``‖A‖_F² - top_k(B) - kΔ/2``.
    """

    mode = "frequent-directions"

    def __init__(self, dim: int, k: int, eta: float = 0.5):
        if not (0 < eta <= 1):
            raise InputError("eta must lie in (0, 1]")
        self.k = k
        self.ell = 2 * k + int(math.ceil(1.0 / eta))
        self.B = np.zeros((self.ell, dim))
        self.next_free = 0
        self.shrink = 0.0
        self.frob = 0.0

    def update(self, r) -> None:
        x = np.asarray(r, float)
        self.frob += float(x @ x)
        if self.next_free == self.ell:
            _, s, Vt = np.linalg.svd(self.B, full_matrices=False)
            s2 = s**2
            delta = s2[-1]
            s = np.sqrt(np.maximum(s2 - delta, 0.0))
            s[-1] = 0.0
            self.B = np.zeros_like(self.B)
            self.B[: s.size] = s[:, None] * Vt
            self.shrink += delta
            self.next_free = int(np.count_nonzero(s > 0))
            self.B[self.next_free :] = 0.0
        self.B[self.next_free] = x
        self.next_free += 1

    def query(self) -> float:
        s2 = np.linalg.svd(self.B, compute_uv=False) ** 2
        top = float(np.sum(s2[: self.k]))
        est = max(self.frob - top - 0.5 * self.k * self.shrink, 0.0)
        return est / self.k if self.k else self.frob


def make_residual(mode: str, dim: int, k: int, eta: float = 0.5):
    if mode == "exact-oracle":
        return ExactResidual(dim, k)
    if mode == "frequent-directions":
        return FrequentDirectionsResidual(dim, k, eta)
    raise InputError(f"unknown residual mode {mode!r}")


def residual_update(rs, r):
    rs.update(r)
    return rs


def residual_query(rs) -> float:
    return rs.query()


@dataclass
class OnlineLraState:
    dim: int
    k: int
    eps: float
    seed: int = 0
    mode: str = "frequent-directions"
    horizon: int = 10**6
    c: float | None = None
    kept: list[np.ndarray] = field(default_factory=list)
    kept_times: list[int] = field(default_factory=list)
    probs: list[float] = field(default_factory=list)
    lambdas: list[float] = field(default_factory=list)
    now: int = 0

    def __post_init__(self):
        if not (0 < self.eps <= 0.5):
            raise InputError("eps must lie in (0, 1/2]")
        if self.k < 1:
            raise InputError("k must be positive")
        self.residual = make_residual(self.mode, self.dim, self.k)
        self.G = np.zeros((self.dim, self.dim))

    @property
    def oversampling(self) -> float:
        if self.c is not None:
            return float(self.c)
        d = max(self.dim, 2)
        alpha = max(1.0, math.log(max(self.horizon, 2)) / math.log(d))
        return 6.0 * alpha * math.log(d) / self.eps**2

    @property
    def size(self) -> int:
        return len(self.kept)

    def ingest(self, r, t: int | None = None) -> "OnlineLraState":
        x = as_row(r, self.dim)
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError(f"timestamp {t} is not after {self.now}")
        self.now = t
        self.residual.update(x)
        lam = 0.5 * self.residual.query()
        self.lambdas.append(lam)
        u, novel = ridge_quadratic(self.G, x, lam)
        if float(x @ x) == 0.0:
            score = 0.0
        elif novel:
            score = 1.0
        else:
            score = u / (1.0 + u)
        p = min(2.0 * self.oversampling * score, 1.0)
        self.probs.append(p)
        if p >= 1.0 or (p > 0.0 and keyed_uniform(self.seed, TAG_ONLINE, t) < p):
            a = x / math.sqrt(p)
            self.kept.append(a)
            self.kept_times.append(t)
            self.G += np.outer(a, a)
        return self

    def result(self) -> np.ndarray:
        if not self.kept:
            return np.zeros((0, self.dim))
        return np.asarray(self.kept)


def online_ingest(st: OnlineLraState, r, t: int | None = None) -> OnlineLraState:
    return st.ingest(r, t)


def online_result(st: OnlineLraState) -> np.ndarray:
    return st.result()
