import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from swnla.errors import InputError, ResourceError
from swnla.l1_sliding import (
    L1SamplerState,
    L1SlidingState,
    L1UnboundedSliding,
    bridge_holds,
    l1_leverage_scores,
    l1_sliding_ingest,
    l1_sliding_query,
    sampling_rates,
    well_conditioned_basis,
)
from swnla.oracle import l1_check


def test_basis_factorises_and_is_conditioned():
    A = np.random.default_rng(0).integers(-4, 5, (30, 4)).astype(float)
    b = well_conditioned_basis(A, exact_beta=True)
    np.testing.assert_allclose(b.U @ b.S, A, atol=1e-9)
    n = A.shape[1]
    assert b.alpha <= n**1.5 * 1.05
    assert b.beta <= 1.05


def test_certified_beta_bounds_exact_beta():
    A = np.random.default_rng(1).standard_normal((20, 3))
    assert well_conditioned_basis(A).beta >= well_conditioned_basis(A, exact_beta=True).beta - 1e-9


def test_rank_deficient_input():
    A = np.outer(np.arange(1.0, 7.0), [1.0, 2.0, 0.0])
    b = well_conditioned_basis(A)
    assert b.rank == 1
    np.testing.assert_allclose(b.U @ b.S, A, atol=1e-9)
    with pytest.raises(InputError):
        well_conditioned_basis(np.zeros((3, 2)))


def test_leverage_scores_sum_to_alpha():
    b = well_conditioned_basis(np.random.default_rng(2).standard_normal((15, 3)))
    assert l1_leverage_scores(b).sum() == pytest.approx(b.alpha)


def test_sampling_rates_formula():
    r1, r2 = sampling_rates(3, 2.0, 1.0, 0.5, 0.1)
    assert r1 == pytest.approx(32 * 2 / 0.25 * (3 * math.log(24) + math.log(20)))
    assert r2 == 6.0


def test_single_row_kept_with_probability_one():
    s = L1SamplerState(3, 0.3, 0.01)
    s.ingest([1.0, -2.0, 0.0], 1)
    assert [(r.prob, r.time) for r in s.rows] == [(1.0, 1)]


def test_guard_and_validation():
    with pytest.raises(ResourceError):
        L1SlidingState(6, 8, 0.4)
    st_ = L1SlidingState(3, 8, 0.4)
    with pytest.raises(InputError):
        st_.ingest([0.5, 0.0, 0.0])
    with pytest.raises(InputError):
        st_.ingest([4.0, 0.0, 0.0])


def test_sliding_window_is_exact_at_desk_scale():
    g = np.random.default_rng(3)
    rows = g.integers(-4, 5, (40, 4)).astype(float)
    st_ = L1SlidingState(4, 16, 0.4, seed=1)
    for r in rows:
        l1_sliding_ingest(st_, r)
    xs = g.integers(-5, 6, (100, 4)).astype(float)
    assert l1_check(rows[-16:], l1_sliding_query(st_), 0.4, xs)["pass"]
    assert st_.anchor() == 40 - 16 + 1


def test_unbounded_mode_additive_bound():
    g = np.random.default_rng(4)
    rows = g.standard_normal((30, 3))
    bound = float(np.abs(rows).max())
    st_ = L1UnboundedSliding(3, 10, 0.4, entry_bound=bound, seed=2)
    for r in rows:
        st_.ingest(r)
    A = rows[-10:]
    M = st_.query()
    for x in g.standard_normal((50, 3)):
        a, m = np.abs(A @ x).sum(), np.abs(M @ x).sum()
        # Rounding moves each entry by at most bound/(2 n^c); summed over the window.
        additive = A.shape[0] * bound * np.abs(x).sum() / (2 * 3)
        assert abs(m - a) <= 0.4 * a + additive + 1e-9


def test_bridge_needs_an_extra_factor_of_n_in_the_worst_case():
    n, eps = 4, 0.4
    A = np.array([[4.0, 4.0, 4.0, 4.0]])
    B = np.tile([1.0, 0.0, 0.0, -1.0], (24, 1))
    x = np.array([4.0, 4.0, 4.0, 3.0])
    assert not bridge_holds(A, B, x, eps, n)
    assert bridge_holds(A, B, x, eps, n, eta=math.sqrt(eps / n) / n)


ints = arrays(float, st.tuples(st.integers(1, 10), st.just(3)), elements=st.integers(-3, 3).map(float))


@settings(max_examples=40, deadline=None)
@given(ints, ints, arrays(float, 3, elements=st.integers(-3, 3).map(float)))
def test_bridge_with_corrected_constant_always_holds(A, B, x):
    assert bridge_holds(A, B, x, 0.4, 3, eta=math.sqrt(0.4 / 3) / 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1e-3, 1e-2]))
def test_stream_sampler_probabilities_shrink(seed, scale):
    g = np.random.default_rng(seed)
    s = L1SamplerState(3, 0.4, 0.01, seed=seed, rate_scale=scale)
    seen = {}
    for t in range(1, 30):
        s.ingest(g.integers(-3, 4, 3), t)
        for r in s.rows:
            assert 0 < r.prob <= seen.get(r.time, 1.0) + 1e-15
            seen[r.time] = r.prob
