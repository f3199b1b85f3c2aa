import numpy as np
import pytest

from behalg import (
    DEFAULT_CONFIG,
    InvalidInputError,
    ToleranceConfig,
    column_space_basis,
    left_null_basis,
    numerical_rank,
    right_null_basis,
    sign_normalize,
    subspace_distance,
)


def test_tolerance_config_validation():
    with pytest.raises(InvalidInputError):
        ToleranceConfig(rel_rank_tol=0.0)
    with pytest.raises(InvalidInputError):
        ToleranceConfig(abs_floor=-1e-3)
    with pytest.raises(InvalidInputError):
        ToleranceConfig(subspace_eq_tol=0.0)
    cfg = ToleranceConfig(rel_rank_tol=1e-8)
    assert cfg.rel_rank_tol == 1e-8
    assert cfg.abs_floor == DEFAULT_CONFIG.abs_floor


def test_rank_plus_nullity():
    # rank-nullity on random matrices with planted rank deficiency
    rng = np.random.default_rng(0)
    for _ in range(100):
        rows = int(rng.integers(1, 9))
        cols = int(rng.integers(1, 9))
        r = int(rng.integers(0, min(rows, cols) + 1))
        A = rng.standard_normal((rows, r)) @ rng.standard_normal((r, cols))
        assert numerical_rank(A, DEFAULT_CONFIG) == r
        N = right_null_basis(A, DEFAULT_CONFIG)
        assert N.shape == (cols, cols - r)
        if N.size:
            assert np.linalg.norm(A @ N) < 1e-8 * max(1.0, np.linalg.norm(A))
            assert np.allclose(N.T @ N, np.eye(cols - r), atol=1e-12)


def test_left_null_rows_annihilate():
    rng = np.random.default_rng(1)
    for _ in range(50):
        rows, r = 7, int(rng.integers(0, 6))
        A = rng.standard_normal((rows, r)) @ rng.standard_normal((r, 5))
        Z = left_null_basis(A, DEFAULT_CONFIG)
        assert Z.shape == (rows - numerical_rank(A, DEFAULT_CONFIG), rows)
        if Z.size:
            assert np.linalg.norm(Z @ A) < 1e-8 * max(1.0, np.linalg.norm(A))


def test_column_space_basis_spans():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((6, 3)) @ rng.standard_normal((3, 8))
    Q = column_space_basis(A, DEFAULT_CONFIG)
    assert Q.shape == (6, 3)
    # every column of A reproduced by the projector
    assert np.linalg.norm(Q @ (Q.T @ A) - A) < 1e-10


def test_subspace_distance_metric():
    rng = np.random.default_rng(3)
    qs = [np.linalg.qr(rng.standard_normal((8, 3)))[0] for _ in range(3)]
    a, b, c = qs
    assert subspace_distance(a, a) < 1e-12
    dab = subspace_distance(a, b)
    assert abs(dab - subspace_distance(b, a)) < 1e-12
    assert 0.0 <= dab <= 1.0 + 1e-12
    # triangle inequality
    assert subspace_distance(a, c) <= dab + subspace_distance(b, c) + 1e-12


def test_subspace_distance_dimension_mismatch():
    rng = np.random.default_rng(4)
    a = np.linalg.qr(rng.standard_normal((6, 2)))[0]
    b = np.linalg.qr(rng.standard_normal((6, 3)))[0]
    assert subspace_distance(a, b) == 1.0


def test_subspace_distance_rotation_invariance():
    rng = np.random.default_rng(5)
    a = np.linalg.qr(rng.standard_normal((7, 3)))[0]
    G = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    assert subspace_distance(a, a @ G) < 1e-12


def test_sign_normalize():
    v = np.array([0.0, -3.0, 3.0, 1.0])
    u = sign_normalize(v)
    assert abs(np.linalg.norm(u) - 1.0) < 1e-14
    # first entry of largest magnitude is made positive
    assert u[1] > 0
    assert np.allclose(sign_normalize(u), u)
    z = sign_normalize(np.zeros(4))
    assert np.array_equal(z, np.zeros(4))


def test_empty_and_degenerate_inputs():
    with pytest.raises(InvalidInputError):
        numerical_rank(np.zeros((0, 3)), DEFAULT_CONFIG)
    # zero matrix has full nullity
    N = right_null_basis(np.zeros((2, 4)), DEFAULT_CONFIG)
    assert N.shape == (4, 4)
    Q = column_space_basis(np.zeros((3, 0)), DEFAULT_CONFIG)
    assert Q.shape == (3, 0)
