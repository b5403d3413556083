"""ℓ1 subspace embeddings over a sliding window.

This module has three layers:

- well-conditioned bases, computed by iterative ellipsoidal rounding;
- a streaming ℓ1 sampler that keeps rows in proportion to local ℓ1 leverage
  scores and rescales them by ``1/p``;
- a sliding-window driver that attaches one such sampler to every row
  retained by a fine-grained reverse-online spectral sampler.

The driver is meant for integer rows bounded by ``n^c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from ._rng import TAG_L1, keyed_uniform
from .errors import InputError, ResourceError
from .linalg import as_matrix, as_row
from .reverse_sampler import MetaState, SampledRow, SamplerConfig

_EPS = np.finfo(float).eps


@dataclass
class L1Basis:
    U: np.ndarray
    S: np.ndarray
    alpha: float
    beta: float
    iterations: int

    @property
    def rank(self) -> int:
        return self.U.shape[1]


def _exact_beta(U: np.ndarray) -> float:
    """``max_x ‖x‖_∞ / ‖Ux‖_1``, solved as one small LP per coordinate."""
    m, r = U.shape
    worst = 0.0
    # Variables (x, s) with -s <= Ux <= s; minimise sum(s) subject to x_j = 1.
    c = np.concatenate([np.zeros(r), np.ones(m)])
    A_ub = np.block([[U, -np.eye(m)], [-U, -np.eye(m)]])
    b_ub = np.zeros(2 * m)
    bounds = [(None, None)] * r + [(0, None)] * m
    for j in range(r):
        A_eq = np.zeros((1, r + m))
        A_eq[0, j] = 1.0
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")
        if res.status == 0 and res.fun > 0:
            worst = max(worst, 1.0 / res.fun)
    return worst


def well_conditioned_basis(A, max_iter: int = 50, rtol: float = 0.05, exact_beta: bool = False) -> L1Basis:
    """An ℓ1 well-conditioned basis ``U`` with ``U S = A``.

    ``A`` is first factored as ``QR`` with orthonormal ``Q`` (through an SVD,
    so rank deficiency is handled). The rounding ellipsoid
    ``{x : x⊤ F x ≤ 1}`` of the body ``{x : ‖Qx‖_1 ≤ 1}`` is refined by the
    fixed-point map ``F ← Q⊤ diag(1/w) Q`` with ``w_i = (q_i F⁻¹ q_i⊤)^{1/2}``.
    The map stops once ``‖U‖_1`` moves by less than ``rtol``. The result is
    ``U = Q G⁻¹`` with ``G = F^{1/2}``.

    ``alpha`` is the entrywise ``‖U‖_1``. ``beta`` bounds
    ``‖x‖_∞ / ‖Ux‖_1``: by default the certified ``1/σ_min(U)``, or the exact
    LP value when ``exact_beta`` is set.
    """
    M = as_matrix(A, "A")
    Us, s, Vt = np.linalg.svd(M, full_matrices=False)
    cutoff = (s[0] if s.size else 0.0) * max(M.shape) * _EPS
    r = int(np.sum(s > cutoff))
    if r == 0:
        raise InputError("input has rank zero")
    Q = Us[:, :r]
    R = s[:r, None] * Vt[:r]
    w = np.maximum(np.linalg.norm(Q, axis=1), 1e-300)
    prev = None
    it = 0
    G = np.eye(r)
    Ginv = np.eye(r)
    for it in range(1, max_iter + 1):
        F = Q.T @ (Q / w[:, None])
        ev, EV = np.linalg.eigh(F)
        ev = np.maximum(ev, ev[-1] * 1e-15)
        G = (EV * np.sqrt(ev)) @ EV.T
        Ginv = (EV / np.sqrt(ev)) @ EV.T
        Fi = (EV / ev) @ EV.T
        w = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", Q, Fi, Q), 0.0))
        w = np.maximum(w, 1e-300)
        norm1 = float(np.abs(Q @ Ginv).sum())
        if prev is not None and abs(norm1 - prev) <= rtol * prev:
            break
        prev = norm1
    U = Q @ Ginv
    S = G @ R
    alpha = float(np.abs(U).sum())
    if exact_beta:
        beta = _exact_beta(U)
    else:
        smin = np.linalg.svd(U, compute_uv=False)[-1]
        beta = float(1.0 / smin)
    return L1Basis(U, S, alpha, beta, it)


def l1_leverage_scores(basis: L1Basis | np.ndarray) -> np.ndarray:
    """Row-wise ℓ1 norms of the basis."""
    U = basis.U if isinstance(basis, L1Basis) else np.asarray(basis, float)
    return np.abs(U).sum(axis=1)


def sampling_rates(n: int, alpha: float, beta: float, eps: float, delta: float) -> tuple[float, float]:
    """``(r1, r2)``: the sampling multiplier and the local-to-global slack."""
    r1 = 32.0 * alpha * beta / eps**2 * (n * math.log(12.0 / eps) + math.log(2.0 / delta))
    r2 = n * alpha * beta
    return r1, r2


@dataclass
class L1SamplerState:
    """Streaming ℓ1 sampler: local ℓ1 scores, cumulative probabilities, 1/p rescale."""

    dim: int
    eps: float
    delta: float
    seed: int = 0
    tag: int = 0
    rate_scale: float = 1.0
    rows: list[SampledRow] = field(default_factory=list)
    last_rates: tuple[float, float] = (0.0, 0.0)

    def ingest(self, r, t: int, ledger: list | None = None) -> "L1SamplerState":
        x = as_row(r, self.dim)
        cand = self.rows + [SampledRow(x, 1.0, int(t))]
        live = [s for s in cand if np.any(s.raw)]
        if not live:
            self.rows = []
            return self
        basis = well_conditioned_basis(np.asarray([s.raw for s in live]))
        r1, r2 = sampling_rates(self.dim, basis.alpha, basis.beta, self.eps, self.delta)
        self.last_rates = (r1, r2)
        w = l1_leverage_scores(basis)
        total = float(w.sum())
        kept = []
        for s, wi in zip(live, w):
            tau = min(self.rate_scale * r1 * r2 * wi / total, 1.0)
            q = min(tau / s.prob, 1.0)
            if q >= 1.0:
                keep = True
            else:
                keep = q > 0 and keyed_uniform(self.seed, TAG_L1, self.tag, s.time, t) < q
            if ledger is not None:
                ledger.append((s.time, q, keep))
            if keep:
                kept.append(SampledRow(s.raw, q * s.prob, s.time))
        self.rows = kept
        return self

    def result(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.dim))
        return np.asarray([s.raw / s.prob for s in self.rows])


def l1_downsample(st: L1SamplerState, r_new, t: int) -> L1SamplerState:
    return st.ingest(r_new, t)


def l1_stream_result(st: L1SamplerState) -> np.ndarray:
    return st.result()


@dataclass
class L1SlidingState:
    """One ℓ1 sampler per row retained by a fine reverse-online spectral sampler."""

    dim: int
    window: int
    eps: float
    c_exp: int = 1
    seed: int = 0
    rate_scale: float = 1.0
    spectral_c: float | None = None
    allow_large: bool = False
    samplers: dict[int, L1SamplerState] = field(default_factory=dict)
    now: int = 0

    def __post_init__(self):
        if not self.allow_large and (self.dim > 5 or self.c_exp != 1):
            raise ResourceError("the l1 driver is limited to n <= 5 and c = 1")
        if not (0 < self.eps < 1):
            raise InputError("eps must lie in (0, 1)")
        self.bound = self.dim**self.c_exp
        self.eps_spectral = math.sqrt(self.eps) / (3.0 * self.bound)
        self.spectral = MetaState(
            SamplerConfig(self.dim, self.window, self.eps_spectral, seed=self.seed, c=self.spectral_c, batch=1)
        )

    def validate(self, x: np.ndarray) -> None:
        if np.any(x != np.round(x)):
            raise InputError("entries must be integers")
        if np.any(np.abs(x) > self.bound):
            raise InputError(f"entries must lie within ±{self.bound}")

    def ingest(self, r, t: int | None = None) -> "L1SlidingState":
        x = as_row(r, self.dim)
        self.validate(x)
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError(f"timestamp {t} is not after {self.now}")
        self.now = t
        delta = 1.0 / float(self.window) ** 3
        for sampler in self.samplers.values():
            sampler.ingest(x, t)
        fresh = L1SamplerState(self.dim, self.eps / 3.0, delta, self.seed, tag=t, rate_scale=self.rate_scale)
        fresh.ingest(x, t)
        self.samplers[t] = fresh
        self.spectral.ingest(x, t)
        alive = {s.time for s in self.spectral.rows}
        for key in [k for k in self.samplers if k not in alive]:
            del self.samplers[key]
        return self

    @property
    def size(self) -> int:
        """Rows stored across every sampler."""
        return sum(len(s.rows) for s in self.samplers.values())

    def anchor(self) -> int | None:
        """Start time of the sampler that answers queries."""
        return min(self.samplers) if self.samplers else None

    def query(self) -> np.ndarray:
        a = self.anchor()
        if a is None:
            return np.zeros((0, self.dim))
        return self.samplers[a].result()


def l1_sliding_ingest(st: L1SlidingState, r, t: int | None = None) -> L1SlidingState:
    return st.ingest(r, t)


def l1_sliding_query(st: L1SlidingState) -> np.ndarray:
    return st.query()


@dataclass
class L1UnboundedSliding:
    """Real-valued rows: rescale so entries reach ``n^c``, round, and scale back.

    ``entry_bound`` must dominate every absolute entry of the stream.
    """

    dim: int
    window: int
    eps: float
    entry_bound: float
    c_exp: int = 1
    seed: int = 0
    rate_scale: float = 1.0

    def __post_init__(self):
        if self.entry_bound <= 0:
            raise InputError("entry_bound must be positive")
        self.inner = L1SlidingState(self.dim, self.window, self.eps, self.c_exp, self.seed, self.rate_scale)
        self.scale = self.inner.bound / self.entry_bound

    def ingest(self, r, t: int | None = None) -> "L1UnboundedSliding":
        x = as_row(r, self.dim)
        if np.any(np.abs(x) > self.entry_bound * (1 + 1e-12)):
            raise InputError("entry exceeds the declared bound")
        y = np.clip(np.round(x * self.scale), -self.inner.bound, self.inner.bound)
        self.inner.ingest(y, t)
        return self

    def query(self) -> np.ndarray:
        return self.inner.query() / self.scale


def bridge_holds(A, B, x, eps: float, n: int, c_exp: int = 1, eta: float | None = None) -> bool:
    """The ℓ1→ℓ2 transfer: ``‖Bx‖_1 ≥ ε‖Ax‖_1`` implies ``‖Bx‖_2 ≥ η‖Ax‖_2``.

    ``η`` defaults to ``√ε/n^c``. Integer data only guarantees the weaker
    ``√(ε/n)/n^c``, since an entry of ``Ax`` can reach ``n^(2c+1)``.
    Vacuously true when the hypothesis fails.
    """
    A = np.atleast_2d(np.asarray(A, float))
    B = np.atleast_2d(np.asarray(B, float))
    x = np.asarray(x, float)
    ax = A @ x if A.size else np.zeros(0)
    bx = B @ x if B.size else np.zeros(0)
    if np.abs(bx).sum() < eps * np.abs(ax).sum():
        return True
    if eta is None:
        eta = math.sqrt(eps) / n**c_exp
    return bool(np.linalg.norm(bx) >= eta * np.linalg.norm(ax) * (1 - 1e-12))
