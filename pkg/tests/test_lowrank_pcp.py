import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swnla.linalg import best_rank_k_residual, ridge_leverage_scores
from swnla.lowrank_pcp import (
    ESTIMATE_FACTOR,
    EstimateState,
    PcpState,
    default_embed_dim,
    estimate_ingest,
    estimate_query,
    pcp_ingest,
    pcp_query,
)
from swnla.oracle import pcp_check


def test_default_embed_dim():
    assert default_embed_dim(2, 64) == 2 + 6 + 8


def test_low_rank_suffix_gives_zero_estimate():
    est = EstimateState(5, 16, 2, seed=1)
    basis = np.random.default_rng(0).standard_normal((2, 5))
    for c in np.random.default_rng(1).standard_normal((20, 2)):
        estimate_ingest(est, c @ basis)
    assert estimate_query(est, est.now - 10) == pytest.approx(0.0, abs=1e-8)


def test_estimate_is_monotone_in_the_cut():
    est = EstimateState(6, 32, 1, seed=2)
    for r in np.random.default_rng(3).standard_normal((40, 6)):
        est.ingest(r)
    vals = est.query_many(range(est.now - 31, est.now + 1))
    assert np.all(np.diff(vals) <= 1e-9)


def test_estimate_uses_factor_on_exact_suffix_when_everything_is_kept():
    est = EstimateState(4, 16, 1, seed=4)
    rows = np.random.default_rng(5).standard_normal((16, 4))
    for r in rows:
        est.ingest(r)
    J = est.embed
    from swnla.linalg import apply_embedding

    sketch = apply_embedding(J, rows[4:])
    assert est.query(5) == pytest.approx(ESTIMATE_FACTOR * best_rank_k_residual(sketch, 1))


def test_rank_k_stream_is_preserved_exactly():
    st_ = PcpState(5, 20, 2, 0.25, seed=0)
    basis = np.random.default_rng(6).standard_normal((2, 5))
    for c in np.random.default_rng(7).standard_normal((30, 2)):
        pcp_ingest(st_, c @ basis)
    A = (np.random.default_rng(7).standard_normal((30, 2)) @ basis)[-20:]
    assert pcp_check(A, pcp_query(st_), 2, 0.25)["pass"]


def test_newest_row_present_and_window_respected():
    st_ = PcpState(4, 10, 1, 0.25, seed=1, c=0.5)
    for t, r in enumerate(np.random.default_rng(8).standard_normal((25, 4)), start=1):
        st_.ingest(r)
        assert st_.rows[-1].time == t
        assert st_.rows[0].time >= t - 9


def test_direct_ridge_oversampling_passes_the_pcp_suite():
    # Sampling the exact window by its ridge scores isolates the sampling step.
    g = np.random.default_rng(9)
    passes = 0
    for trial in range(20):
        A = g.standard_normal((64, 8))
        k, eps = 2, 0.25
        lam = best_rank_k_residual(A, k) / k
        p = np.minimum(1.0, 40.0 * ridge_leverage_scores(A, lam) / eps**2 * 0.05)
        keep = g.random(64) < p
        M = A[keep] / np.sqrt(p[keep])[:, None]
        passes += pcp_check(A, M, k, eps, seed=trial)["pass"]
    assert passes >= 18


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 1000), st.integers(1, 3))
def test_probabilities_valid_under_reduced_oversampling(seed, k):
    st_ = PcpState(5, 12, k, 0.25, seed=seed, c=0.5)
    for r in np.random.default_rng(seed).standard_normal((20, 5)):
        st_.ingest(r)
        assert all(0 < s.prob <= 1 for s in st_.rows)
