import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swnla.cov_approx import CovSketchState, cov_ingest, cov_query, decode_bits, encode_bits, round_entry
from swnla.errors import InputError


def test_round_entry_examples():
    eps = 0.3
    assert round_entry(0.0, eps) == 0.0
    v = (1 + eps / 6) ** 7
    assert round_entry(v, eps) == pytest.approx(v)
    assert round_entry(-v, eps) == pytest.approx(-v)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e6), st.booleans(), st.sampled_from([0.1, 0.3, 0.9]))
def test_round_entry_relative_error(v, neg, eps):
    v = -v if neg else v
    r = round_entry(v, eps)
    assert math.copysign(1, r) == math.copysign(1, v)
    # Nearest power in log scale: within a half step of (1 + eps/6).
    assert abs(r - v) <= (math.sqrt(1 + eps / 6) - 1) * abs(v) + 1e-12 * abs(v)
    assert abs(r - v) <= (eps / 6) * abs(v)


def test_bits_roundtrip():
    row = np.array([0.0, 1.7, -3.2, 1e-3])
    exps, sign = encode_bits(row, 0.3)
    assert exps.dtype == np.int16 and sign.dtype == np.int8
    np.testing.assert_allclose(decode_bits(exps, sign, 0.3), [round_entry(v, 0.3) for v in row])


def test_single_row_window_is_exact():
    s = CovSketchState(3, 1, 0.3)
    for r in ([1.0, 2.0, 3.0], [0.0, -1.0, 2.0]):
        cov_ingest(s, r)
    np.testing.assert_allclose(cov_query(s), [[0.0, -1.0, 2.0]])


def test_tiny_stream_with_large_c_is_exact():
    rows = np.random.default_rng(0).standard_normal((10, 4))
    s = CovSketchState(4, 10, 0.3, c=1e9)
    for r in rows:
        s.ingest(r)
    B = s.query()
    np.testing.assert_allclose(B.T @ B, rows.T @ rows, atol=1e-9)


def test_validation():
    with pytest.raises(InputError):
        CovSketchState(3, 4, 0.3, mode="nibbles")
    with pytest.raises(InputError):
        CovSketchState(3, 4, 1.3)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 20), st.sampled_from([0.3, 0.9]))
def test_bookkeeping_and_bucket_invariants(seed, W, eps):
    g = np.random.default_rng(seed)
    rows = g.standard_normal((50, 3)) * g.exponential(1.0, (50, 1))
    rows[g.random(50) < 0.1] = 0.0
    s = CovSketchState(3, W, eps, seed=seed)
    norms = {}
    for t, r in enumerate(rows, start=1):
        s.ingest(r)
        norms[t] = float(r @ r)
        assert s.check_bookkeeping(norms)
        for b in s.buckets:
            assert b.g == pytest.approx(sum(norms[i] for i in range(b.start, t + 1)), rel=1e-9, abs=1e-12)
        gs = [b.g for b in s.buckets]
        for i in range(len(gs) - 2):
            assert gs[i + 2] < 0.5 * gs[i]
        assert all(row.time > t - W for b in s.buckets for row in b.rows)
        top = max(gs) if gs else 0.0
        low = min((v for v in gs if v > 0), default=1.0)
        assert len(gs) <= 2 * math.log2(max(top / low, 1.0)) + 4
