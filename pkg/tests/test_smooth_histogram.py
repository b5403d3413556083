import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swnla.errors import InputError
from swnla.smooth_histogram import SmoothHistogram, frobenius_histogram, sh_ingest, sh_query


def window_frob(rows, W):
    tail = np.asarray(rows[-W:], float)
    return float(np.sum(tail * tail))


def test_empty_query():
    assert sh_query(frobenius_histogram(4)) == (0.0, True)


def test_first_rows_are_exact():
    h = frobenius_histogram(8)
    for r in ([1.0, 0.0], [0.0, 2.0], [1.0, 1.0]):
        sh_ingest(h, r)
    assert h.query() == (pytest.approx(7.0), False)


def test_exact_when_checkpoint_hits_window_start():
    h = frobenius_histogram(2)
    for v in (100.0, 1.0, 1.0):
        h.ingest([v])
    q, _ = h.query()
    assert q == pytest.approx(2.0)


def test_rejects_bad_parameters_and_time():
    with pytest.raises(InputError):
        SmoothHistogram(0.2, 0.5, 4)
    h = frobenius_histogram(4)
    h.ingest([1.0], t=3)
    with pytest.raises(InputError):
        h.ingest([1.0], t=3)


def test_roundtrip():
    h = frobenius_histogram(5)
    for i in range(20):
        h.ingest([float(i % 3), 1.0])
    twin = SmoothHistogram.from_dict(h.to_dict())
    assert twin.query() == h.query()
    assert twin.indices == h.indices


rows_strategy = st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=80)


@settings(max_examples=80, deadline=None)
@given(rows_strategy, st.integers(1, 20))
def test_two_approximation_and_structure(rows, W):
    h = frobenius_histogram(W)
    for i, r in enumerate(rows, start=1):
        h.ingest(r)
        q, empty = h.query()
        exact = window_frob(rows[:i], W)
        assert not empty
        assert q / 2 - 1e-9 <= exact <= q + 1e-9
        assert h.check_structure()
        assert h.size <= h.size_cap()
