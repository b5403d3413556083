"""Downstream uses of a spectral sketch."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, InputError
from .linalg import as_matrix, pseudoinverse


def solve_from_sketch(M, B, kind: str = "regression"):
    """Answer a query from sketch rows ``M``.

    ``regression``: ``argmin_X ‖M X - B‖_F`` through the normal equations
    ``(M⊤M) X = M⊤B``, with a pseudoinverse for rank deficiency. ``B`` has
    one row per row of ``M``.

    ``directional-variance``: ``x⊤ M⊤M x`` for the vector ``B``.
    """
    M = as_matrix(M, "M")
    if kind == "regression":
        Bm = np.asarray(B, float)
        vec = Bm.ndim == 1
        Bm = Bm.reshape(Bm.shape[0], -1)
        if Bm.shape[0] != M.shape[0]:
            raise DimensionError("B must have one row per sketch row")
        X = pseudoinverse(M.T @ M) @ (M.T @ Bm)
        return X[:, 0] if vec else X
    if kind == "directional-variance":
        x = np.asarray(B, float).ravel()
        if x.shape[0] != M.shape[1]:
            raise DimensionError("direction has the wrong dimension")
        v = M @ x
        return float(v @ v)
    raise InputError(f"unknown kind {kind!r}")
