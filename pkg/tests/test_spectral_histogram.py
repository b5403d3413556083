import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from swnla.errors import DimensionError, InputError
from swnla.linalg import spectral_sandwich
from swnla.spectral_histogram import SpectralHistogram, default_batch, det_ingest, det_query


def exact_gram(rows, W):
    A = np.asarray(rows[-W:], float)
    return A.T @ A


def test_empty_query_returns_zero():
    G, empty = det_query(SpectralHistogram(3, 0.25, 4))
    assert empty and not G.any()


def test_single_row_is_exact():
    h = SpectralHistogram(2, 0.1, 4)
    det_ingest(h, [1.0, 2.0])
    G, _ = h.query()
    np.testing.assert_allclose(G, [[1, 2], [2, 4]])


def test_identical_rows_collapse():
    h = SpectralHistogram(2, 0.25, 100)
    for _ in range(50):
        h.ingest([1.0, 1.0])
    # Suffix Grams are multiples of one rank-one matrix: only log-many survive.
    assert h.size <= 2 * np.log2(50) / -np.log2(0.75) + 3


def test_validation():
    with pytest.raises(InputError):
        SpectralHistogram(2, 1.5, 4)
    h = SpectralHistogram(2, 0.1, 4)
    with pytest.raises(DimensionError):
        h.ingest([1.0])
    h.ingest([1.0, 0.0], t=5)
    with pytest.raises(InputError):
        h.ingest([1.0, 0.0], t=5)


def test_default_batch():
    assert default_batch(4, 0.5) == 32 * 3


def test_batched_query_flushes_a_copy():
    h = SpectralHistogram(3, 0.25, 10, batch=7)
    rows = np.random.default_rng(0).standard_normal((12, 3))
    for r in rows:
        h.ingest(r)
    assert len(h.pending) == 5
    G, _ = h.query()
    assert len(h.pending) == 5
    assert spectral_sandwich(G, exact_gram(rows, 10), 0.25)


def test_binary_roundtrip():
    h = SpectralHistogram(3, 0.2, 6, batch=4)
    for r in np.random.default_rng(1).standard_normal((15, 3)):
        h.ingest(r)
    twin = SpectralHistogram.from_bytes(h.to_bytes())
    assert twin.times == h.times and twin.now == h.now
    np.testing.assert_array_equal(twin.query()[0], h.query()[0])
    with pytest.raises(InputError):
        SpectralHistogram.from_bytes(b"XXXX" + h.to_bytes()[4:])


streams = st.integers(2, 4).flatmap(
    lambda n: arrays(float, st.tuples(st.integers(1, 40), st.just(n)), elements=st.floats(-5, 5, allow_nan=False))
)


@settings(max_examples=50, deadline=None)
@given(streams, st.integers(1, 12), st.sampled_from([0.1, 0.25, 0.5]))
def test_sandwich_and_ordering_every_step(rows, W, eps):
    n = rows.shape[1]
    h = SpectralHistogram(n, eps, W)
    for i, r in enumerate(rows, start=1):
        h.ingest(r)
        G, _ = h.query()
        assert spectral_sandwich(G, exact_gram(rows[:i], W), eps)
        assert h.times == sorted(h.times)
        assert len(h.times) < 2 or h.times[1] > i - W + 1
