import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from swnla.errors import DimensionError, InputError
from swnla.linalg import (
    EmbeddingSpec,
    apply_embedding,
    as_row,
    best_rank_k_residual,
    embedding_matrix,
    online_ridge_scores,
    pseudoinverse,
    psd_dominates,
    residual_from_gram,
    reverse_online_ridge_scores,
    ridge_leverage_scores,
    spectral_sandwich,
    top_k_projector,
    two_sided_sandwich,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def matrices(max_rows=12, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.integers(1, max_rows).flatmap(lambda m: arrays(float, (m, n), elements=finite))
    )


# -- oracles -------------------------------------------------------------------


def test_loewner_examples():
    assert psd_dominates(np.eye(2), 2 * np.eye(2))
    assert not psd_dominates(2 * np.eye(2), np.eye(2))
    assert not psd_dominates(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert psd_dominates(np.zeros((0, 0)), np.zeros((0, 0)))


def test_loewner_rejects_bad_shapes_and_asymmetry():
    with pytest.raises(DimensionError):
        psd_dominates(np.eye(2), np.eye(3))
    with pytest.raises(InputError):
        psd_dominates(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))


def test_sandwich_helpers():
    E = np.diag([4.0, 1.0])
    assert spectral_sandwich(E / 0.9, E, 0.1 + 1e-12)
    assert not spectral_sandwich(E / 0.8, E, 0.1)
    assert two_sided_sandwich(1.05 * E, E, 0.1)
    assert not two_sided_sandwich(1.2 * E, E, 0.1)


def test_pseudoinverse_matches_numpy():
    A = np.random.default_rng(0).standard_normal((6, 3))
    np.testing.assert_allclose(pseudoinverse(A), np.linalg.pinv(A), atol=1e-12)


def test_leverage_scores_of_orthonormal_rows_are_one():
    Q = np.linalg.qr(np.random.default_rng(1).standard_normal((4, 4)))[0]
    np.testing.assert_allclose(ridge_leverage_scores(Q), np.ones(4), atol=1e-12)


def test_online_scores_flag_new_directions():
    R = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 3.0]])
    u = online_ridge_scores(R, 0.0, inclusive=False, cap=False)
    assert u[0] == 1.0 and u[2] == 1.0
    assert u[1] == pytest.approx(4.0)


def test_residual_of_low_rank_matrix_is_zero():
    g = np.random.default_rng(2)
    A = g.standard_normal((10, 2)) @ g.standard_normal((2, 5))
    assert best_rank_k_residual(A, 2) == pytest.approx(0.0, abs=1e-10)
    assert best_rank_k_residual(A, 0) == pytest.approx(np.sum(A * A))


def test_as_row_checks_dimension():
    with pytest.raises(DimensionError):
        as_row([1.0, 2.0], 3)


def test_embedding_is_deterministic_and_well_formed():
    spec = EmbeddingSpec("osnap", 6, 12, seed=3, osnap_sparsity=4)
    J = embedding_matrix(spec)
    assert np.all(np.count_nonzero(J, axis=1) == 4)
    np.testing.assert_allclose(np.linalg.norm(J, axis=1), 1.0)
    np.testing.assert_array_equal(J, embedding_matrix(EmbeddingSpec("osnap", 6, 12, seed=3, osnap_sparsity=4)))
    D = embedding_matrix(EmbeddingSpec("dense-jl", 6, 12, seed=3))
    np.testing.assert_allclose(np.abs(D), 1 / np.sqrt(12))
    np.testing.assert_allclose(apply_embedding(spec, np.ones(6)), np.ones(6) @ J)
    with pytest.raises(InputError):
        EmbeddingSpec("gaussian", 2, 2)


# -- properties ----------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from([0.0, 0.1, 1.0, 10.0]))
def test_ridge_scores_lie_in_unit_interval(A, lam):
    s = ridge_leverage_scores(A, lam, cap=False)
    assert np.all(s >= 0) and np.all(s <= 1 + 1e-8)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.sampled_from([0.1, 1.0, 10.0]))
def test_inclusive_online_scores_dominate_offline(A, lam):
    online = online_ridge_scores(A, lam, inclusive=True, cap=False)
    offline = ridge_leverage_scores(A, lam, cap=False)
    assert np.all(online >= offline - 1e-8)


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_reverse_scores_match_reversed_online(A):
    np.testing.assert_allclose(reverse_online_ridge_scores(A, 1.0), online_ridge_scores(A[::-1], 1.0)[::-1])


@settings(max_examples=60, deadline=None)
@given(matrices(), st.integers(0, 4))
def test_residual_from_gram_agrees_with_svd(A, k):
    scale = 1.0 + np.sum(A * A)
    assert residual_from_gram(A.T @ A, k) == pytest.approx(best_rank_k_residual(A, k), abs=1e-8 * scale)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.integers(1, 3))
def test_top_k_projector_is_a_projector(A, k):
    P = top_k_projector(A, k)
    np.testing.assert_allclose(P @ P, P, atol=1e-8)
    np.testing.assert_allclose(P, P.T, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(matrices(), st.floats(0.0, 1.0))
def test_loewner_scaling(A, s):
    G = A.T @ A
    assert psd_dominates(s * G, G)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([1e-3, 0.1, 1.0, 100.0]), st.integers(1, 3))
def test_online_score_sum_scale_free_bound(seed, scale, k):
    # Each inclusive score is at most log(1 + exclusive score), and the log-det
    # splits into the top k directions plus a tail worth k at λ = tail / k.
    A = scale * np.random.default_rng(seed).standard_normal((30, 5))
    lam = best_rank_k_residual(A, k) / k
    total = online_ridge_scores(A, lam, inclusive=True, cap=False).sum()
    assert total <= k + k * math.log1p(np.linalg.norm(A, 2) ** 2 / lam) + 1e-9
