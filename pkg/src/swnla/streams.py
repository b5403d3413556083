"""Seeded stream generators, including two hard-instance constructions.

Every generator returns a dense ``(length, dim)`` array. The construction is
a pure function of the spec, so equal specs give equal streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._rng import TAG_STREAM, keyed_generator
from .errors import DimensionError, InputError

GENERATORS = (
    "gaussian",
    "integer-bounded",
    "hypercube",
    "duplicate-heavy",
    "geometric-norm",
    "index-hard",
    "nonsmooth-lra",
    "nonsmooth-regression",
)


@dataclass(frozen=True)
class StreamSpec:
    generator: str
    dim: int
    length: int
    window: int
    seed: int = 0
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InputError(f"unknown generator {self.generator!r}")
        if self.dim < 1 or self.length < 0 or self.window < 1:
            raise DimensionError("dim, length and window must be positive")


def _rng(spec: StreamSpec) -> np.random.Generator:
    return keyed_generator(spec.seed, TAG_STREAM, GENERATORS.index(spec.generator))


def nonsmooth_lra_blocks(alpha: float = 0.5) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Blocks ``(head, tail, extra)``: the suffix ``tail`` nearly matches
    ``head + tail`` on rank-2 residual, yet appending ``extra`` splits them.

    With ``d = 2/α``: head is ``2d·e1, e2``; tail is ``2d·e3, e4 … e(3+d)``;
    extra is ``2d·e(4+d)``. Rows live in ``4 + d`` dimensions.
    """
    if not (0 < alpha < 1):
        raise InputError("alpha must lie in (0, 1)")
    d = int(round(2.0 / alpha))
    if abs(d - 2.0 / alpha) > 1e-9:
        raise InputError("2/alpha must be an integer")
    n = 4 + d
    E = np.eye(n)
    head = np.array([2 * d * E[0], E[1]])
    tail = np.array([2 * d * E[2]] + [E[2 + i] for i in range(1, d + 1)])
    extra = np.array([2 * d * E[3 + d]])
    return head, tail, extra


def nonsmooth_regression_blocks(alpha: float = 0.5) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Regression rows ``[a | b]`` in the same head/tail/extra arrangement."""
    head = np.array([[100, 0, 0, 0, 0, 100], [0, alpha, 0, 0, 0, 0]], dtype=float)
    tail = np.array([[0, 0, 1, 0, 0, 1], [0, 0, 0, 1, 0, 0]], dtype=float)
    extra = np.array([[0, 0, 0, 0, 1000, 2000]], dtype=float)
    return head, tail, extra


def index_hard_layout(n: int, eps: float) -> tuple[int, int]:
    """``(rows per block, number of blocks)`` for the sign-encoding construction."""
    per = 1.0 / (72.0 * eps) ** 2
    rows = int(round(per))
    if rows < 1 or abs(rows - per) > 1e-6:
        raise InputError("1/(72 eps)^2 must be a positive integer")
    if n % rows:
        raise InputError("n must be a multiple of the rows per block")
    levels = int(round(math.log2(n)))
    if 2**levels != n:
        raise InputError("n must be a power of two")
    return rows, levels


def index_hard_blocks(n: int, eps: float, seed: int = 0) -> tuple[list[np.ndarray], np.ndarray]:
    """Blocks ``[M_k | E_k]`` (``2n`` columns) and the random bit string they encode.

    ``M_k`` holds ``±72ε·2^(log n - k)`` per bit; row ``y`` of ``E_k`` holds
    ``2^(log n - k)`` on the ``y``-th group of ``n/rows`` columns.
    """
    rows, levels = index_hard_layout(n, eps)
    g = keyed_generator(seed, TAG_STREAM, GENERATORS.index("index-hard"))
    bits = g.integers(0, 2, size=(levels, rows, n))
    width = n // rows
    blocks = []
    for k in range(1, levels + 1):
        scale = 2.0 ** (levels - k)
        M = np.where(bits[k - 1] == 1, 1.0, -1.0) * 72.0 * eps * scale
        E = np.zeros((rows, n))
        for y in range(rows):
            E[y, y * width : (y + 1) * width] = scale
        blocks.append(np.hstack([M, E]))
    return blocks, bits


def generate(spec: StreamSpec) -> np.ndarray:
    """The rows of ``spec`` as a ``(length, dim)`` array."""
    g, n, L, prm = _rng(spec), spec.dim, spec.length, spec.params
    kind = spec.generator
    if kind == "gaussian":
        return g.standard_normal((L, n))
    if kind == "integer-bounded":
        c = int(prm.get("c", 1))
        b = n**c
        return g.integers(-b, b + 1, size=(L, n)).astype(float)
    if kind == "hypercube":
        return np.where(g.integers(0, 2, size=(L, n)) == 1, 1.0, -1.0)
    if kind == "duplicate-heavy":
        pool = g.standard_normal((int(prm.get("distinct", 3)), n))
        return pool[g.integers(0, pool.shape[0], size=L)] * g.choice([1.0, -1.0], size=(L, 1))
    if kind == "geometric-norm":
        growth = float(prm.get("growth", 1.05))
        return g.standard_normal((L, n)) * growth ** np.arange(L)[:, None]
    if kind == "index-hard":
        blocks, _ = index_hard_blocks(n // 2, float(prm.get("eps", 1 / 144)), spec.seed)
        rows = np.vstack(blocks)
        if rows.shape[1] != n:
            raise DimensionError(f"index-hard rows have dimension {rows.shape[1]}")
        pad = max(L - rows.shape[0], 0)
        return np.vstack([rows, np.zeros((pad, n))])[: max(L, rows.shape[0])]
    if kind == "nonsmooth-lra":
        rows = np.vstack(nonsmooth_lra_blocks(float(prm.get("alpha", 0.5))))
    else:
        rows = np.vstack(nonsmooth_regression_blocks(float(prm.get("alpha", 0.5))))
    if rows.shape[1] != n:
        raise DimensionError(f"{kind} rows have dimension {rows.shape[1]}")
    return rows
