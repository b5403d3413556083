"""Stream files.

Text: a ``dim=<n>`` header line, then one row per line as ``n``
space-separated decimals. Binary: the magic ``SWNLA1``, a little-endian
``u32`` dimension, then ``f64`` rows.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DimensionError, InputError

BINARY_MAGIC = b"SWNLA1"


def write_text(path, rows: np.ndarray) -> None:
    A = np.atleast_2d(np.asarray(rows, float))
    n = A.shape[1]
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"dim={n}\n")
        for r in A:
            fh.write(" ".join(repr(float(v)) for v in r) + "\n")


def read_text(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        head = fh.readline().strip()
        if not head.startswith("dim="):
            raise InputError("missing dim=<n> header")
        n = int(head[4:])
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            vals = [float(v) for v in line.split()]
            if len(vals) != n:
                raise DimensionError(f"line {lineno}: expected {n} values, got {len(vals)}")
            rows.append(vals)
    return np.asarray(rows, float).reshape(len(rows), n)


def write_binary(path, rows: np.ndarray) -> None:
    A = np.atleast_2d(np.asarray(rows, float))
    with open(path, "wb") as fh:
        fh.write(BINARY_MAGIC + struct.pack("<I", A.shape[1]))
        fh.write(A.astype("<f8").tobytes())


def read_binary(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:6] != BINARY_MAGIC:
        raise InputError("not a binary stream file")
    (n,) = struct.unpack("<I", blob[6:10])
    body = blob[10:]
    if n == 0 or len(body) % (8 * n):
        raise DimensionError("binary body is not a whole number of rows")
    return np.frombuffer(body, dtype="<f8").reshape(-1, n).astype(float)


def read_stream(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(6)
    return read_binary(path) if magic == BINARY_MAGIC else read_text(path)


def write_stream(path, rows: np.ndarray, binary: bool = False) -> None:
    (write_binary if binary else write_text)(path, rows)
