"""Exact brute-force window and the comparison metrics used by every check."""

from __future__ import annotations

from collections import deque

import numpy as np

from ._rng import TAG_STREAM, keyed_generator
from .errors import InputError, ResourceError
from .linalg import as_row, best_rank_k_residual, spectral_sandwich, top_k_projector, two_sided_sandwich

MAX_ENTRIES = 10**6
KINDS = ("spectral-det", "spectral", "pcp", "online", "cov", "l1")


def check_budget(window: int, dim: int) -> None:
    if window * dim > MAX_ENTRIES:
        raise ResourceError(f"window x dim = {window * dim} exceeds {MAX_ENTRIES}")


class WindowOracle:
    """The last ``window`` raw rows, held verbatim."""

    def __init__(self, dim: int, window: int):
        check_budget(window, dim)
        self.dim = dim
        self.window = window
        self.rows: deque[np.ndarray] = deque(maxlen=window)
        self.now = 0

    def push(self, r) -> None:
        self.rows.append(as_row(r, self.dim))
        self.now += 1

    def matrix(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.dim))
        return np.asarray(self.rows)

    def gram(self) -> np.ndarray:
        A = self.matrix()
        return A.T @ A


def projection_cost(A: np.ndarray, P: np.ndarray) -> float:
    """``‖A - AP‖_F²``."""
    R = A - A @ P
    return float(np.sum(R * R))


def random_projectors(n: int, k: int, count: int, seed: int) -> list[np.ndarray]:
    g = keyed_generator(seed, TAG_STREAM, 1000 + k)
    out = []
    for _ in range(count):
        Q, _ = np.linalg.qr(g.standard_normal((n, k)))
        out.append(Q @ Q.T)
    return out


def pcp_check(A: np.ndarray, M: np.ndarray, k: int, eps: float, n_random: int = 50, seed: int = 0, tol: float = 1e-9) -> dict:
    """Projection-cost preservation on top-k(A), top-k(M) and random rank-k projectors."""
    n = A.shape[1]
    projectors = [top_k_projector(A, k), top_k_projector(M, k)] + random_projectors(n, k, n_random, seed)
    worst = 0.0
    ok = True
    for P in projectors:
        exact = projection_cost(A, P)
        approx = projection_cost(M, P)
        slack = tol * (1.0 + exact)
        if not ((1 - eps) * exact - slack <= approx <= (1 + eps) * exact + slack):
            ok = False
        if exact > 0:
            worst = max(worst, abs(approx / exact - 1.0))
        elif approx > slack:
            worst = np.inf
    return {"pass": ok, "worst_relative": float(worst), "projectors": len(projectors)}


def l1_check(A: np.ndarray, M: np.ndarray, eps: float, xs: np.ndarray) -> dict:
    a = np.abs(xs @ A.T).sum(axis=1)
    m = np.abs(xs @ M.T).sum(axis=1) if M.size else np.zeros(len(xs))
    bad = np.abs(m - a) > eps * a + 1e-9
    rel = np.where(a > 0, np.abs(m - a) / np.where(a > 0, a, 1.0), 0.0)
    return {"pass": bool(not bad.any()), "worst_relative": float(rel.max(initial=0.0))}


def oracle_metrics(o: WindowOracle | np.ndarray, output, kind: str, eps: float, k: int = 1, seed: int = 0, xs=None) -> dict:
    """Compare a sketch's output with the exact window.

    ``output`` is a Gram for ``spectral-det`` and a row matrix for every other
    kind. ``o`` may also be the exact matrix itself, which is how the online
    kind passes the whole stream.
    """
    if kind not in KINDS:
        raise InputError(f"unknown kind {kind!r}")
    A = o.matrix() if isinstance(o, WindowOracle) else np.asarray(o, float)
    exact = A.T @ A
    out = np.asarray(output, float)
    if kind == "spectral-det":
        return {"pass": spectral_sandwich(out, exact, eps)}
    M = out.reshape(-1, A.shape[1])
    base = {"rows": int(M.shape[0])}
    if kind == "spectral":
        return {**base, "pass": two_sided_sandwich(M.T @ M, exact, eps)}
    if kind in ("pcp", "online"):
        res = pcp_check(A, M, k, eps, seed=seed)
        res["residual_exact"] = best_rank_k_residual(A, k)
        return {**base, **res}
    if kind == "cov":
        err = float(np.linalg.norm(exact - M.T @ M))
        frob = float(np.trace(exact))
        return {**base, "pass": err <= eps * frob + 1e-12, "error": err, "frob2": frob}
    if xs is None:
        g = keyed_generator(seed, TAG_STREAM, 2000)
        xs = g.integers(-5, 6, size=(200, A.shape[1])).astype(float)
    return {**base, **l1_check(A, M, eps, np.asarray(xs, float))}
