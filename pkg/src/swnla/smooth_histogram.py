"""Smooth histograms for suffix-monotone functions over a sliding window.

The histogram keeps checkpoints ``x_1 < … < x_s``; checkpoint ``x_i`` owns an
instance tracking ``g(x_i, N)``, the function evaluated on the elements from
``x_i`` through the current time ``N``. After each arrival, checkpoints whose
value is sandwiched by neighbours are merged away, and checkpoints that are no
longer needed to cover the window are dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import InputError


class FrobeniusInstance:
    """Running squared Frobenius norm of the rows fed to it."""

    __slots__ = ("total",)

    def __init__(self, total: float = 0.0):
        self.total = float(total)

    def update(self, row) -> None:
        v = np.asarray(row, dtype=float)
        self.total += float(v @ v)

    def value(self) -> float:
        return self.total

    def state(self) -> float:
        return self.total

    @classmethod
    def from_state(cls, s) -> "FrobeniusInstance":
        return cls(float(s))


@dataclass
class SmoothHistogram:
    alpha: float
    beta: float
    window: int
    factory: Callable[[], Any] = FrobeniusInstance
    indices: list[int] = field(default_factory=list)
    instances: list[Any] = field(default_factory=list)
    now: int = 0

    def __post_init__(self):
        if not (0 < self.beta <= self.alpha <= 1):
            raise InputError("need 0 < beta <= alpha <= 1")
        if self.window < 1:
            raise InputError("window must be positive")

    # -- helpers ------------------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.indices)

    def values(self) -> list[float]:
        return [inst.value() for inst in self.instances]

    def window_start(self) -> int:
        return max(1, self.now - self.window + 1)

    def _expired(self, x: int) -> bool:
        return x < self.now - self.window + 1

    # -- maintenance --------------------------------------------------------
    def ingest(self, item, t: int | None = None) -> "SmoothHistogram":
        t = self.now + 1 if t is None else int(t)
        if t <= self.now:
            raise InputError("timestamps must increase")
        self.now = t
        for inst in self.instances:
            inst.update(item)
        fresh = self.factory()
        fresh.update(item)
        self.indices.append(t)
        self.instances.append(fresh)
        self._merge()
        self._expire()
        return self

    def _merge(self) -> None:
        keep = 1.0 - self.beta / 2.0
        i = 0
        while i <= len(self.indices) - 3:
            vals = self.values()
            gi = vals[i]
            j = i + 1
            for k in range(len(vals) - 1, i, -1):
                if vals[k] >= keep * gi:
                    j = k
                    break
            if j > i + 1:
                del self.indices[i + 1 : j]
                del self.instances[i + 1 : j]
            i += 1

    def _expire(self) -> None:
        for i in range(len(self.indices) - 1):
            if self._expired(self.indices[i]) and not self._expired(self.indices[i + 1]):
                if i > 0:
                    del self.indices[:i]
                    del self.instances[:i]
                return

    # -- queries ------------------------------------------------------------
    def query(self) -> tuple[float, bool]:
        """Return ``(estimate, empty)``.

        The estimate is ``g(x_1, N)``, except that when the second checkpoint
        sits exactly at the window start its exact value is returned instead.
        """
        if not self.indices:
            return 0.0, True
        start = self.now - self.window + 1
        if len(self.indices) >= 2 and self.indices[1] == start:
            return float(self.instances[1].value()), False
        return float(self.instances[0].value()), False

    def size_cap(self) -> int:
        """Checkpoint budget ``ceil((2/β) log₂ max g) + 2``."""
        vals = self.values()
        top = max(vals) if vals else 0.0
        return int(math.ceil((2.0 / self.beta) * math.log2(max(top, 1.0)))) + 2

    def check_structure(self, rtol: float = 1e-12) -> bool:
        """Check the checkpoint properties against the stored values."""
        vals = self.values()
        s = len(vals)
        if s == 0:
            return True
        if s >= 2 and self._expired(self.indices[1]):
            return False
        keep = 1.0 - self.beta / 2.0
        for i in range(s - 1):
            adjacent = self.indices[i + 1] == self.indices[i] + 1
            if not adjacent and vals[i + 1] < (1 - self.alpha) * vals[i] * (1 - rtol):
                return False
            if i + 2 < s and vals[i + 2] >= keep * vals[i] * (1 + rtol):
                return False
        return True

    # -- persistence --------------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "window": self.window,
            "now": self.now,
            "indices": list(self.indices),
            "instances": [inst.state() for inst in self.instances],
        }

    @classmethod
    def from_dict(cls, d: dict, factory: Callable[[], Any] = FrobeniusInstance) -> "SmoothHistogram":
        h = cls(d["alpha"], d["beta"], d["window"], factory)
        h.now = int(d["now"])
        h.indices = [int(x) for x in d["indices"]]
        h.instances = [factory.from_state(s) for s in d["instances"]]  # type: ignore[attr-defined]
        return h


def frobenius_histogram(window: int, alpha: float = 0.5, beta: float = 0.5) -> SmoothHistogram:
    """Smooth histogram of the squared Frobenius norm (a 2-approximation at the defaults)."""
    return SmoothHistogram(alpha, beta, window, FrobeniusInstance)


def sh_ingest(h: SmoothHistogram, row, t: int | None = None) -> SmoothHistogram:
    return h.ingest(row, t)


def sh_query(h: SmoothHistogram) -> tuple[float, bool]:
    return h.query()
