"""Deterministic sliding-window spectral approximation.

The state is a list of suffix Grams ``S_1 ⪰ S_2 ⪰ … ⪰ S_s`` with start
times ``t_1 < … < t_s``, where ``S_i`` is the exact Gram of every row from
``t_i`` to now. Neighbours two apart are kept spectrally separated: whenever
``S_j ⪰ (1-ε) S_i`` the Grams strictly between ``i`` and ``j`` are redundant and
dropped. ``S_1`` always covers the window, so ``(1-ε) S_1 ⪯ A⊤A ⪯ S_1``.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InputError
from .linalg import as_row, psd_dominates_many

_MAGIC = b"SWSH"
_VERSION = 1
COMPRESS_TOL = 1e-9


def default_batch(n: int, eps: float) -> int:
    return int(math.ceil(n * n / eps)) * (1 + int(math.floor(math.log2(max(n, 1)))))


@dataclass
class SpectralHistogram:
    dim: int
    eps: float
    window: int
    batch: int = 1
    mats: list[np.ndarray] = field(default_factory=list)
    times: list[int] = field(default_factory=list)
    now: int = 0
    pending: list[tuple[int, np.ndarray]] = field(default_factory=list)

    def __post_init__(self):
        if self.dim < 1:
            raise InputError("dim must be positive")
        if not (0 < self.eps < 1):
            raise InputError("eps must lie in (0, 1)")
        if self.window < 1:
            raise InputError("window must be positive")
        if self.batch < 1:
            raise InputError("batch must be positive")

    @property
    def size(self) -> int:
        return len(self.mats)

    # -- ingest ---------------------------------------------------------------
    def ingest(self, r, t: int | None = None) -> "SpectralHistogram":
        x = as_row(r, self.dim)
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError(f"timestamp {t} is not after {self.now}")
        self.now = t
        self.pending.append((t, x))
        if len(self.pending) >= self.batch:
            self.flush()
        return self

    def flush(self) -> None:
        """Apply buffered rows, then compress and expire."""
        if not self.pending:
            return
        for t, x in self.pending:
            R = np.outer(x, x)
            for S in self.mats:
                S += R
            self.mats.append(R.copy())
            self.times.append(t)
        self.pending.clear()
        self._compress()
        self._expire()

    def _compress(self) -> None:
        keep = 1.0 - self.eps
        i = 0
        while i <= len(self.mats) - 3:
            stack = np.asarray(self.mats)
            lower = keep * stack[i : len(self.mats) - 2]
            upper = stack[i + 2 :]
            hits = np.flatnonzero(psd_dominates_many(lower, upper, COMPRESS_TOL))
            if hits.size == 0:
                return
            i += int(hits[0])
            # Dominated indices form a prefix of i+1, i+2, ...: walk to its end.
            j = i + 2
            target = keep * self.mats[i]
            while j + 1 < len(self.mats) and psd_dominates_many(target[None], self.mats[j + 1][None], COMPRESS_TOL)[0]:
                j += 1
            del self.mats[i + 1 : j]
            del self.times[i + 1 : j]
            i += 1

    def _expire(self) -> None:
        start = self.now - self.window + 1
        while len(self.times) >= 2 and self.times[1] <= start:
            del self.mats[0]
            del self.times[0]

    # -- queries --------------------------------------------------------------
    def _settled(self) -> "SpectralHistogram":
        if not self.pending:
            return self
        twin = self.copy()
        twin.flush()
        return twin

    def query(self) -> tuple[np.ndarray, bool]:
        """Return ``(G, empty)`` with ``(1-ε) G ⪯ A⊤A ⪯ G`` for the window ``A``."""
        h = self._settled()
        if not h.mats:
            return np.zeros((self.dim, self.dim)), True
        return h.mats[0].copy(), False

    def eigen_range(self, rtol: float = 1e-10) -> tuple[float, float]:
        """Extremes ``(β, α)`` of the nonzero eigenvalues over the stored Grams."""
        h = self._settled()
        lo, hi = math.inf, 0.0
        for S in h.mats:
            w = np.linalg.eigvalsh(S)
            top = w[-1]
            nz = w[w > max(top, 0.0) * rtol]
            if nz.size:
                lo = min(lo, float(nz[0]))
                hi = max(hi, float(nz[-1]))
        return (lo, hi) if hi > 0 else (0.0, 0.0)

    def space_bound(self) -> float:
        """``(n/ε) · log(α/β) / log(1/(1-ε)) + 2`` for the current Grams."""
        lo, hi = self.eigen_range()
        ratio = hi / lo if lo > 0 else 1.0
        return (self.dim / self.eps) * math.log(ratio) / math.log(1.0 / (1.0 - self.eps)) + 2

    def copy(self) -> "SpectralHistogram":
        return SpectralHistogram(
            self.dim,
            self.eps,
            self.window,
            self.batch,
            [S.copy() for S in self.mats],
            list(self.times),
            self.now,
            [(t, x.copy()) for t, x in self.pending],
        )

    # -- binary persistence ---------------------------------------------------
    def to_bytes(self) -> bytes:
        """Little-endian layout: header, n, s, timestamps, Grams, pending rows."""
        n, s = self.dim, len(self.mats)
        head = _MAGIC + struct.pack("<IIIdqqqI", _VERSION, n, s, self.eps, self.window, self.now, self.batch, len(self.pending))
        parts = [head, np.asarray(self.times, dtype="<i8").tobytes()]
        if s:
            parts.append(np.asarray(self.mats, dtype="<f8").tobytes())
        for t, x in self.pending:
            parts.append(struct.pack("<q", t))
            parts.append(np.asarray(x, dtype="<f8").tobytes())
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, blob: bytes) -> "SpectralHistogram":
        if blob[:4] != _MAGIC:
            raise InputError("not a spectral histogram blob")
        fmt = "<IIIdqqqI"
        off = 4 + struct.calcsize(fmt)
        version, n, s, eps, window, now, batch, npend = struct.unpack(fmt, blob[4:off])
        if version != _VERSION:
            raise InputError(f"unsupported version {version}")
        times = np.frombuffer(blob, dtype="<i8", count=s, offset=off).tolist()
        off += 8 * s
        mats = []
        if s:
            arr = np.frombuffer(blob, dtype="<f8", count=s * n * n, offset=off).reshape(s, n, n)
            mats = [m.copy() for m in arr]
            off += 8 * s * n * n
        pending = []
        for _ in range(npend):
            (t,) = struct.unpack("<q", blob[off : off + 8])
            off += 8
            x = np.frombuffer(blob, dtype="<f8", count=n, offset=off).copy()
            off += 8 * n
            pending.append((t, x))
        if off != len(blob):
            raise DimensionError("trailing bytes in spectral histogram blob")
        return cls(n, eps, window, batch, mats, [int(v) for v in times], now, pending)


def det_ingest(st: SpectralHistogram, r, t: int | None = None) -> SpectralHistogram:
    return st.ingest(r, t)


def det_query(st: SpectralHistogram) -> tuple[np.ndarray, bool]:
    return st.query()
