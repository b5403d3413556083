"""Dense linear-algebra building blocks.

Loewner-order tests, a cutoff pseudoinverse, ridge leverage scores in their
batch, online and reverse-online flavours, rank-k residuals, and seeded random
embeddings (dense sign matrices and OSNAP-style sparse maps).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._rng import TAG_JL, keyed_generator
from .errors import DimensionError, InputError

_EPS = np.finfo(float).eps
NOVEL_ROW_RTOL = 1e-9


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite 2-D float array, promoting a single row."""
    M = np.asarray(A, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InputError(f"{name} has non-finite entries")
    return M


def as_row(r, dim: int | None = None, name: str = "row") -> np.ndarray:
    v = np.asarray(r, dtype=float).reshape(-1)
    if dim is not None and v.shape[0] != dim:
        raise DimensionError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    return v


def gram(A) -> np.ndarray:
    M = np.asarray(A, dtype=float)
    if M.size == 0:
        n = M.shape[-1] if M.ndim == 2 else 0
        return np.zeros((n, n))
    return M.T @ M


# --------------------------------------------------------------------------
# Loewner order


def _psd_scale(X: np.ndarray, Y: np.ndarray) -> float:
    return 1.0 + max(abs(float(np.trace(X))), abs(float(np.trace(Y))))


def psd_dominates(X, Y, tol: float = 1e-9) -> bool:
    """True iff ``X ⪯ Y``, i.e. ``Y - X`` is positive semidefinite.

    The test is ``λ_min(Y - X) >= -tol * (1 + max(|tr X|, |tr Y|))`` using a
    symmetric eigensolver, so indefinite differences are handled.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape != Y.shape:
        raise DimensionError(f"need equal square shapes, got {X.shape} and {Y.shape}")
    scale = _psd_scale(X, Y)
    for name, M in (("X", X), ("Y", Y)):
        if M.size and np.max(np.abs(M - M.T)) > tol * scale:
            raise InputError(f"{name} is not symmetric within tolerance")
    if X.size == 0:
        return True
    D = Y - X
    D = 0.5 * (D + D.T)
    return bool(np.linalg.eigvalsh(D)[0] >= -tol * scale)


def psd_dominates_many(Xs: np.ndarray, Ys: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vectorised :func:`psd_dominates` over stacks of matrices (no symmetry check)."""
    Xs = np.asarray(Xs, dtype=float)
    Ys = np.asarray(Ys, dtype=float)
    if Xs.shape != Ys.shape or Xs.ndim != 3:
        raise DimensionError("need two equal-shape stacks of square matrices")
    if Xs.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    tx = np.abs(np.trace(Xs, axis1=1, axis2=2))
    ty = np.abs(np.trace(Ys, axis1=1, axis2=2))
    scale = 1.0 + np.maximum(tx, ty)
    D = Ys - Xs
    D = 0.5 * (D + np.swapaxes(D, 1, 2))
    return np.linalg.eigvalsh(D)[:, 0] >= -tol * scale


def spectral_sandwich(approx_gram, exact_gram, eps: float, tol: float = 1e-8) -> bool:
    """``(1-eps) G ⪯ A⊤A ⪯ G`` for a one-sided (overestimating) Gram ``G``."""
    G = np.asarray(approx_gram, float)
    E = np.asarray(exact_gram, float)
    return psd_dominates((1 - eps) * G, E, tol) and psd_dominates(E, G, tol)


def two_sided_sandwich(approx_gram, exact_gram, eps: float, tol: float = 1e-8) -> bool:
    """``(1-eps) A⊤A ⪯ M⊤M ⪯ (1+eps) A⊤A``."""
    G = np.asarray(approx_gram, float)
    E = np.asarray(exact_gram, float)
    return psd_dominates((1 - eps) * E, G, tol) and psd_dominates(G, (1 + eps) * E, tol)


# --------------------------------------------------------------------------
# Pseudoinverse and scores


def pseudoinverse(M) -> np.ndarray:
    """Moore-Penrose pseudoinverse with cutoff ``σ_max · max(m, n) · eps``."""
    A = as_matrix(M, "M")
    m, n = A.shape
    if A.size == 0:
        return np.zeros((n, m))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    cutoff = (s[0] if s.size else 0.0) * max(m, n) * _EPS
    inv = np.zeros_like(s)
    keep = s > cutoff
    inv[keep] = 1.0 / s[keep]
    return (Vt.T * inv) @ U.T


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not np.isfinite(lam) or lam < 0:
        raise InputError(f"lambda must be a finite nonnegative number, got {lam}")
    return lam


def ridge_quadratic(G: np.ndarray, x: np.ndarray, lam: float) -> tuple[float, bool]:
    """Return ``(x (G + lam I)^† x⊤, novel)`` for a PSD Gram ``G``.

    ``novel`` is only ever set when ``lam == 0``: it flags a row with a
    component outside the range of ``G`` (relative residual above
    ``NOVEL_ROW_RTOL``). The quadratic form then counts the in-range part only.
    """
    n = x.shape[0]
    xx = float(x @ x)
    if xx == 0.0:
        return 0.0, False
    w, V = np.linalg.eigh(G)
    w = np.maximum(w, 0.0)
    z = V.T @ x
    if lam > 0:
        return float(np.sum(z * z / (w + lam))), False
    cutoff = (w[-1] if n else 0.0) * n * _EPS
    mask = w > cutoff
    resid = float(np.sum(z[~mask] ** 2))
    novel = resid > (NOVEL_ROW_RTOL**2) * xx
    return float(np.sum(z[mask] ** 2 / w[mask])), novel


def ridge_leverage_scores(R, lam: float = 0.0, cap: bool = True) -> np.ndarray:
    """``r_i (R⊤R + λI)^† r_i⊤`` for every row, optionally capped at 1."""
    A = as_matrix(R, "R")
    lam = _check_lambda(lam)
    n = A.shape[1]
    P = pseudoinverse(A.T @ A + lam * np.eye(n))
    s = np.einsum("ij,jk,ik->i", A, P, A)
    s = np.maximum(s, 0.0)
    return np.minimum(s, 1.0) if cap else s


def online_ridge_scores(R, lam: float = 0.0, inclusive: bool = True, cap: bool = True) -> np.ndarray:
    """Online ridge scores of each row against the rows before it.

    The inclusive flavour puts the row itself into the Gram; the exclusive one
    uses the strict prefix and, for ``lam == 0``, scores a row outside the span
    of its predecessors as 1.
    """
    A = as_matrix(R, "R")
    lam = _check_lambda(lam)
    m, n = A.shape
    G = np.zeros((n, n))
    out = np.empty(m)
    for i in range(m):
        x = A[i]
        if inclusive:
            G += np.outer(x, x)
            u, _ = ridge_quadratic(G, x, lam)
        else:
            u, novel = ridge_quadratic(G, x, lam)
            if novel:
                u = 1.0
            G += np.outer(x, x)
        out[i] = u
    out = np.maximum(out, 0.0)
    return np.minimum(out, 1.0) if cap else out


def reverse_online_ridge_scores(R, lam: float = 0.0) -> np.ndarray:
    """Score of each row against itself and every later row, capped at 1."""
    A = as_matrix(R, "R")
    return online_ridge_scores(A[::-1], lam, inclusive=True, cap=True)[::-1].copy()


def best_rank_k_residual(A, k: int) -> float:
    """``‖A - A_k‖_F²``, the sum of squared singular values beyond the k-th."""
    if k < 0:
        raise InputError("k must be nonnegative")
    M = as_matrix(A, "A")
    if M.size == 0:
        return 0.0
    s = np.linalg.svd(M, compute_uv=False)
    return float(np.sum(s[k:] ** 2))


def residual_from_gram(G, k: int) -> float:
    """Same quantity as :func:`best_rank_k_residual`, from a Gram ``A⊤A``."""
    w = np.linalg.eigvalsh(np.asarray(G, float))
    w = np.maximum(w[::-1], 0.0)
    return float(np.sum(w[k:]))


def top_k_projector(A, k: int) -> np.ndarray:
    """Orthogonal projector onto the top-k right singular subspace of ``A``."""
    M = as_matrix(A, "A")
    n = M.shape[1]
    if M.shape[0] == 0 or k == 0:
        return np.zeros((n, n))
    _, _, Vt = np.linalg.svd(M, full_matrices=False)
    V = Vt[: min(k, Vt.shape[0])].T
    return V @ V.T


# --------------------------------------------------------------------------
# Random embeddings


@dataclass(frozen=True)
class EmbeddingSpec:
    """A seeded random map from ``input_dim`` to ``output_dim`` coordinates."""

    kind: str
    input_dim: int
    output_dim: int
    seed: int = 0
    osnap_sparsity: int = 8

    def __post_init__(self):
        if self.kind not in ("dense-jl", "osnap"):
            raise InputError(f"unknown embedding kind {self.kind!r}")
        if self.input_dim < 1 or self.output_dim < 1:
            raise InputError("embedding dimensions must be positive")
        if self.kind == "osnap" and self.osnap_sparsity < 1:
            raise InputError("osnap_sparsity must be positive")

    @property
    def sparsity(self) -> int:
        return min(self.osnap_sparsity, self.output_dim)


@lru_cache(maxsize=64)
def embedding_matrix(spec: EmbeddingSpec) -> np.ndarray:
    """Materialise ``J`` (``input_dim × output_dim``) so that ``r ↦ rJ``.

    Row ``i`` of ``J`` depends only on ``(seed, i)``. For OSNAP each input
    coordinate lands in ``s`` distinct output coordinates, one per contiguous
    block, with signs ``±1/√s``.
    """
    n, d = spec.input_dim, spec.output_dim
    J = np.zeros((n, d))
    if spec.kind == "dense-jl":
        val = 1.0 / np.sqrt(d)
        for i in range(n):
            g = keyed_generator(spec.seed, TAG_JL, i)
            J[i] = np.where(g.integers(0, 2, size=d) == 1, val, -val)
    else:
        s = spec.sparsity
        edges = np.linspace(0, d, s + 1).round().astype(int)
        val = 1.0 / np.sqrt(s)
        for i in range(n):
            g = keyed_generator(spec.seed, TAG_JL, i)
            for b in range(s):
                pos = int(g.integers(edges[b], edges[b + 1]))
                J[i, pos] = val if g.integers(0, 2) == 1 else -val
    J.setflags(write=False)
    return J


def apply_embedding(spec: EmbeddingSpec, r) -> np.ndarray:
    """``rJ`` for a row (or ``AJ`` for a stack of rows)."""
    x = np.asarray(r, dtype=float)
    if x.shape[-1] != spec.input_dim:
        raise DimensionError(f"expected input dimension {spec.input_dim}, got {x.shape[-1]}")
    return x @ embedding_matrix(spec)
