"""
Tests for the distance decoders, exhaustive least squares and orthogonal matching pursuit
"""

import itertools

import numpy as np
import pytest

from suprec.decoders import (
    distance_decode,
    distance_decode_k1,
    estimate_magnitude,
    ml_decode,
    omp_decode,
    run_decoder,
)
from suprec.decoders.common import GramSystem, iter_all_subsets, residual
from suprec.models.config_models import DecoderParams
from suprec.utils.errors import InvalidConfigError, WorkCapExceededError


def planted(rng, n, m, w, sigma_z2):
    """Random instance with a uniformly drawn support of size len(w)"""
    A = rng.normal(size=(n, m))
    support = sorted(int(i) for i in rng.choice(m, size=len(w), replace=False))
    y = A[:, support] @ np.asarray(w, dtype=float) + rng.normal(0.0, np.sqrt(sigma_z2), size=n)
    return A, y, support


def lstsq_rss(A, y, subset):
    cols = A[:, list(subset)]
    coef = np.linalg.lstsq(cols, y, rcond=None)[0]
    return float(np.sum((y - cols @ coef) ** 2))


##### Shared pieces #####

def test_residual_examples():
    A = np.eye(3)
    y = np.array([1.0, 2.0, 3.0])
    assert residual(y, A, [0], [1.0]) == pytest.approx(13.0 / 3.0)
    assert residual(y, A, [], []) == pytest.approx(14.0 / 3.0)
    assert residual(y, A, [0, 1, 2], y) == 0.0
    with pytest.raises(InvalidConfigError):
        residual(y, A, [0, 1], [1.0])


def test_subsets_in_lexicographic_order():
    sets = [tuple(row) for block in iter_all_subsets(5, 3, chunk=2) for row in block]
    assert sets == list(itertools.combinations(range(5), 3))


def test_gram_least_squares_matches_lstsq():
    rng = np.random.default_rng(1)
    A = rng.normal(size=(12, 6))
    y = rng.normal(size=12)
    system = GramSystem(A, y)
    idx = np.array(list(itertools.combinations(range(6), 2)))
    rss, _ = system.least_squares(idx)
    for row, value in zip(idx, rss):
        assert value == pytest.approx(lstsq_rss(A, y, row), rel=1e-9, abs=1e-9)


def test_estimate_magnitude_examples():
    assert estimate_magnitude(np.zeros(4), 4, 1.0, 1.0) == pytest.approx(1.0)
    assert estimate_magnitude(np.ones(4), 4, 1.0, 1.0) == pytest.approx(0.0)
    assert estimate_magnitude(2.0 * np.ones(4), 4, 2.0, 0.0) == pytest.approx(np.sqrt(2.0))


def test_estimate_magnitude_concentrates():
    """W_hat lands in [1.9, 2.1] for w = 2 at n = 10^4"""
    rng = np.random.default_rng(2)
    inside = 0
    for _ in range(100):
        y = 2.0 * rng.normal(size=10_000) + rng.normal(size=10_000)
        inside += 1.9 <= estimate_magnitude(y, 10_000, 1.0, 1.0) <= 2.1
    assert inside >= 99


##### Single-value distance decoder #####

def test_distance_k1_near_noiseless():
    rng = np.random.default_rng(3)
    params = DecoderParams(epsilon=0.1)
    recovered = 0
    for _ in range(100):
        A, y, support = planted(rng, 1000, 32, [1.0], 1e-12)
        result = distance_decode_k1(y, A, params, 1.0, 1e-12)
        recovered += result.support == support
        if not result.failed:
            assert result.residual <= result.threshold or result.forced
    assert recovered >= 99


def test_distance_k1_tiny_orthogonal_instance():
    A = np.array([[1, 1, 1], [1, -1, 1], [1, 1, -1], [1, -1, -1]], dtype=float)
    y = 1.5 * A[:, 1]
    result = distance_decode_k1(y, A, DecoderParams(epsilon=0.1), 1.0, 0.0)
    print(result)
    assert result.support == [1]
    assert not result.ambiguous and result.satisfying_sets == 1
    assert result.residual == pytest.approx(0.0, abs=1e-15)
    assert result.witness_values == [pytest.approx(1.5)]


def test_distance_k1_single_column():
    """m = 1 always returns the only index"""
    rng = np.random.default_rng(4)
    A = rng.normal(size=(10, 1))
    y = rng.normal(size=10)
    result = distance_decode_k1(y, A, DecoderParams(threshold_override=1e-9), 1.0, 1.0)
    assert result.support == [0]
    assert result.forced and result.ambiguous


def test_distance_k1_huge_threshold_is_ambiguous():
    rng = np.random.default_rng(5)
    A, y, _ = planted(rng, 20, 8, [1.0], 1.0)
    result = distance_decode_k1(y, A, DecoderParams(threshold_override=1e6), 1.0, 1.0)
    assert result.ambiguous
    assert result.satisfying_sets == 8
    assert result.support == [0]


def test_distance_k1_failure_sentinel():
    rng = np.random.default_rng(6)
    A, y, _ = planted(rng, 20, 8, [1.0], 1.0)
    result = distance_decode_k1(y, A, DecoderParams(threshold_override=1e-6), 1.0, 1.0)
    assert result.failed
    assert result.status == "failure"
    assert result.satisfying_sets == 0


def test_distance_k1_relabeling():
    """Permuting the columns permutes the accepted indices"""
    rng = np.random.default_rng(7)
    params = DecoderParams(epsilon=0.5)
    for _ in range(20):
        A, y, _ = planted(rng, 60, 16, [1.0], 1.0)
        perm = rng.permutation(16)
        original = distance_decode_k1(y, A, params, 1.0, 1.0)
        permuted = distance_decode_k1(y, A[:, perm], params, 1.0, 1.0)
        assert original.satisfying_sets == permuted.satisfying_sets
        if original.satisfying_sets == 1:
            assert [int(perm[permuted.support[0]])] == original.support


def test_distance_relabeling_two_values():
    rng = np.random.default_rng(17)
    params = DecoderParams(epsilon=0.5)
    unique = 0
    for _ in range(10):
        A, y, _ = planted(rng, 40, 8, [1.0, -1.0], 0.25)
        perm = rng.permutation(8)
        original = distance_decode(y, A, 2, params, 1.0, 0.25)
        permuted = distance_decode(y, A[:, perm], 2, params, 1.0, 0.25)
        assert original.satisfying_sets == permuted.satisfying_sets
        if original.satisfying_sets == 1:
            unique += 1
            assert sorted(int(perm[s]) for s in permuted.support) == original.support
    assert unique > 0


def test_ml_relabeling():
    rng = np.random.default_rng(18)
    for k in (1, 2, 3):
        for _ in range(10):
            A, y, _ = planted(rng, 12, 9, [1.0] * k, 1.0)
            perm = rng.permutation(9)
            original = ml_decode(y, A, k)
            permuted = ml_decode(y, A[:, perm], k)
            assert sorted(int(perm[s]) for s in permuted.support) == original.support
            assert permuted.residual == pytest.approx(original.residual, rel=1e-9)


def test_distance_noiseless_needs_explicit_epsilon():
    A = np.eye(3)
    with pytest.raises(InvalidConfigError):
        distance_decode_k1(A[:, 0], A, DecoderParams(), 1.0, 0.0)


def test_threshold_rules():
    """fixed_k is the default for every k; growing_k adds the extra slack"""
    assert DecoderParams(epsilon=0.5).threshold(1.0, 1.0) == pytest.approx(1.25)
    assert DecoderParams(epsilon=0.5, rule="growing_k").threshold(1.0, 1.0) == pytest.approx(2.0)
    assert DecoderParams(epsilon=0.5, threshold_override=3.0).threshold(1.0, 1.0) == 3.0


def test_distance_noiseless_with_threshold_and_zeta():
    """With the threshold and zeta both given, no epsilon is needed"""
    A = np.eye(4)
    y = A[:, 0] + A[:, 1]
    params = DecoderParams(threshold_override=1e6, zeta=0.5)
    result = distance_decode(y, A, 2, params, 1.0, 0.0)
    assert result.support == [0, 1]
    assert result.threshold == 1e6
    assert params.resolved(1.0, 0.0).epsilon is None

    with pytest.raises(InvalidConfigError):
        DecoderParams(threshold_override=1e6).resolved(1.0, 0.0)
    with pytest.raises(InvalidConfigError):
        DecoderParams(zeta=0.5).threshold(1.0, 0.0)


##### Multi-value distance decoder #####

def test_distance_k2_near_noiseless():
    rng = np.random.default_rng(8)
    params = DecoderParams(epsilon=0.1)
    for _ in range(20):
        A, y, support = planted(rng, 2000, 3, [1.0, 1.0], 1e-12)
        result = distance_decode(y, A, 2, params, 1.0, 1e-12)
        assert result.support == support
        assert not result.ambiguous
        assert result.residual <= result.threshold


def test_distance_k2_huge_threshold_is_ambiguous():
    rng = np.random.default_rng(9)
    A, y, _ = planted(rng, 50, 3, [1.0, 1.0], 1.0)
    params = DecoderParams(epsilon=0.2, threshold_override=1e6)
    result = distance_decode(y, A, 2, params, 1.0, 1.0)
    assert result.support == [0, 1]
    assert result.ambiguous
    assert result.satisfying_sets == 3


def test_distance_full_support_is_forced():
    rng = np.random.default_rng(10)
    A = rng.normal(size=(10, 2))
    y = rng.normal(size=10)
    result = distance_decode(y, A, 2, DecoderParams(epsilon=0.3, threshold_override=1e-9), 1.0, 1.0)
    assert result.support == [0, 1]
    assert result.forced


def test_screened_matches_exhaustive():
    rng = np.random.default_rng(11)
    for _ in range(10):
        A, y, _ = planted(rng, 30, 6, [1.5, -1.0], 1.0)
        screened = distance_decode(y, A, 2, DecoderParams(epsilon=0.5, zeta=0.5), 1.0, 1.0)
        exhaustive = distance_decode(
            y, A, 2, DecoderParams(epsilon=0.5, zeta=0.5, search="exhaustive"), 1.0, 1.0
        )
        assert screened.support == exhaustive.support
        assert screened.satisfying_sets == exhaustive.satisfying_sets
        assert screened.residual == exhaustive.residual


def test_distance_independent_of_jobs():
    rng = np.random.default_rng(12)
    A, y, _ = planted(rng, 40, 8, [1.0, 1.2], 0.5)
    params = DecoderParams(epsilon=0.6, zeta=0.4)
    assert distance_decode(y, A, 2, params, 1.0, 0.5, jobs=1) == distance_decode(y, A, 2, params, 1.0, 0.5, jobs=3)


def test_distance_work_cap():
    rng = np.random.default_rng(13)
    A, y, _ = planted(rng, 30, 6, [1.0, 1.0], 1.0)
    with pytest.raises(WorkCapExceededError) as info:
        distance_decode(y, A, 2, DecoderParams(epsilon=0.5, work_cap=10), 1.0, 1.0)
    assert info.value.estimate > 10


def test_distance_needs_two_or_more_values():
    A = np.eye(3)
    with pytest.raises(InvalidConfigError):
        distance_decode(A[:, 0], A, 1, DecoderParams(epsilon=0.1), 1.0, 1.0)


##### Exhaustive least squares #####

def test_ml_matches_brute_force():
    rng = np.random.default_rng(14)
    for _ in range(50):
        m = int(rng.integers(4, 11))
        k = int(rng.integers(1, 4))
        n = int(rng.integers(k + 1, 13))
        A = rng.normal(size=(n, m))
        y = rng.normal(size=n)
        best = min(itertools.combinations(range(m), k), key=lambda T: lstsq_rss(A, y, T))
        assert ml_decode(y, A, k).support == list(best)


def test_ml_noiseless_recovery():
    rng = np.random.default_rng(15)
    for _ in range(20):
        A, y, support = planted(rng, 4, 12, [1.0, -0.7], 0.0)
        result = ml_decode(y, A, 2)
        assert result.support == support
        assert result.residual == pytest.approx(0.0, abs=1e-12)


def test_ml_full_support():
    rng = np.random.default_rng(16)
    result = ml_decode(rng.normal(size=5), rng.normal(size=(5, 3)), 3)
    assert result.support == [0, 1, 2]
    assert result.forced


def test_ml_residual_below_distance_residual():
    rng = np.random.default_rng(17)
    A, y, _ = planted(rng, 500, 4, [1.0, 1.0], 0.01)
    distance = distance_decode(y, A, 2, DecoderParams(epsilon=0.2), 1.0, 0.01)
    ml = ml_decode(y, A, 2)
    assert ml.support == distance.support
    assert ml.residual <= distance.residual + 1e-12


def test_ml_work_cap_and_shapes():
    rng = np.random.default_rng(18)
    A = rng.normal(size=(8, 6))
    y = rng.normal(size=8)
    with pytest.raises(WorkCapExceededError):
        ml_decode(y, A, 2, work_cap=5)
    with pytest.raises(InvalidConfigError):
        ml_decode(y[:1], A[:1], 2)


def test_ml_stacked_measurements():
    """Several measurement vectors sum their residuals over a common support"""
    rng = np.random.default_rng(19)
    A = rng.normal(size=(6, 10))
    X = rng.normal(size=(2, 3))
    Y = A[:, [2, 7]] @ X
    result = ml_decode(Y, A, 2)
    assert result.support == [2, 7]
    assert len(result.witness_values) == 3
    for values, column in zip(result.witness_values, X.T):
        assert values == pytest.approx(column.tolist(), abs=1e-9)

    single = ml_decode(Y[:, 0], A, 2)
    assert single.witness_values == pytest.approx(X[:, 0].tolist(), abs=1e-9)


##### Orthogonal matching pursuit #####

def test_omp_orthonormal_columns():
    rng = np.random.default_rng(20)
    Q, _ = np.linalg.qr(rng.normal(size=(20, 10)))
    y = Q[:, [1, 4, 8]] @ np.array([1.0, -2.0, 0.5])
    result = omp_decode(y, Q, 3)
    assert result.support == [1, 4, 8]
    assert result.witness_values == [pytest.approx(1.0), pytest.approx(-2.0), pytest.approx(0.5)]


def test_omp_single_pick_is_matched_filter():
    rng = np.random.default_rng(21)
    A = rng.normal(size=(15, 30))
    y = rng.normal(size=15)
    assert omp_decode(y, A, 1).support == [int(np.argmax(np.abs(A.T @ y)))]


def test_omp_rank_deficiency():
    A = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    result = omp_decode(np.array([1.0, 0.0, 0.0]), A, 2)
    assert result.status == "numerical_failure"
    assert result.failed


##### Registry #####

def test_run_decoder_dispatch():
    A = np.array([[1, 1, 1], [1, -1, 1], [1, 1, -1], [1, -1, -1]], dtype=float)
    y = 1.5 * A[:, 2]
    params = DecoderParams(epsilon=0.1)
    for name in ("distance_k1", "ml", "omp"):
        assert run_decoder(name, y, A, 1, params, 1.0, 0.0).support == [2]
    with pytest.raises(InvalidConfigError):
        run_decoder("lasso", y, A, 1, params, 1.0, 0.0)
    with pytest.raises(InvalidConfigError):
        run_decoder("distance_k1", y, A, 2, params, 1.0, 0.0)
