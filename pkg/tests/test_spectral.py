import numpy as np
import pytest

from conftest import crandn
from weakgroup.errors import IndexOverflow, ShapeMismatch, ZeroWeight
from weakgroup.numeric import NumericContext, orthogonal_projector
from weakgroup.spectral import (
    canonical_pair,
    check_pair,
    drazin,
    drazin_from_blocks,
    drazin_power_formula,
    index,
    w_drazin,
    w_drazin_from_blocks,
)


def jordan_zero(n):
    return np.eye(n, k=1, dtype=complex)


@pytest.mark.parametrize("n", [1, 2, 4])
def test_index_of_nilpotent_jordan_block(n):
    r = index(jordan_zero(n))
    assert (r.index, r.stable_rank, r.range.dim) == (n, 0, 0)


def test_index_invertible_is_zero(rng):
    r = index(crandn(rng, 4, 4))
    assert r.index == 0 and r.stable_rank == 4


def test_index_of_generated_square(singular_square):
    r = index(singular_square)
    assert r.index == 3 and r.stable_rank == 3
    Ak = np.linalg.matrix_power(singular_square, 3)
    np.testing.assert_allclose(orthogonal_projector(r.range) @ Ak, Ak, atol=1e-8)


def test_index_cap():
    with pytest.raises(IndexOverflow):
        index(jordan_zero(4), NumericContext(max_index=2))


def test_index_requires_square():
    with pytest.raises(ShapeMismatch):
        index(np.ones((2, 3)))


def test_drazin_defining_equations(singular_square):
    A = singular_square
    X = drazin(A)
    A3 = np.linalg.matrix_power(A, 3)
    np.testing.assert_allclose(X @ A @ X, X, atol=1e-9)
    np.testing.assert_allclose(A @ X, X @ A, atol=1e-9)
    np.testing.assert_allclose(X @ A @ A3, A3, atol=1e-9)


def test_drazin_matches_power_formula(rng):
    A = np.array([[2, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    np.testing.assert_allclose(drazin(A), drazin_power_formula(A), atol=1e-10)
    np.testing.assert_allclose(drazin(A), [[0.5, 0.25, 0.125], [0, 0, 0], [0, 0, 0]],
                               atol=1e-12)


def test_drazin_of_invertible_is_inverse(rng):
    A = crandn(rng, 3, 3)
    np.testing.assert_allclose(drazin(A), np.linalg.inv(A), atol=1e-10)


def test_drazin_of_nilpotent_is_zero():
    np.testing.assert_array_equal(drazin(jordan_zero(3)), 0)


def test_check_pair_shapes_and_zero_weight():
    A = np.ones((2, 3))
    with pytest.raises(ShapeMismatch):
        check_pair(A, np.ones((2, 3)))
    with pytest.raises(ZeroWeight):
        check_pair(A, np.zeros((3, 2)))


def test_canonical_pair_reassembles(pair):
    cp = canonical_pair(pair.A, pair.W)
    assert cp.core_dim == 3
    np.testing.assert_allclose(cp.assemble_A(), pair.A, atol=1e-9)
    np.testing.assert_allclose(cp.assemble_W(), pair.W, atol=1e-9)
    # A3 W3 and W3 A3 are nilpotent
    for N in (cp.A3 @ cp.W3, cp.W3 @ cp.A3):
        np.testing.assert_allclose(np.linalg.matrix_power(N, N.shape[0]), 0, atol=1e-9)


def test_canonical_pair_drazin_blocks(pair):
    cp = canonical_pair(pair.A, pair.W)
    AWd, WAd = drazin_from_blocks(cp)
    np.testing.assert_allclose(AWd, drazin(pair.A @ pair.W), atol=1e-8)
    np.testing.assert_allclose(WAd, drazin(pair.W @ pair.A), atol=1e-8)


def test_w_drazin_matches_oracle(pair):
    X = w_drazin(pair.A, pair.W)
    np.testing.assert_allclose(X, pair.wdrazin_closed_form, atol=1e-8)
    np.testing.assert_allclose(X, w_drazin_from_blocks(canonical_pair(pair.A, pair.W)),
                               atol=1e-8)


def test_w_drazin_unweighted_reduces_to_drazin(singular_square):
    A = singular_square
    np.testing.assert_allclose(w_drazin(A, np.eye(6)), drazin(A), atol=1e-9)

