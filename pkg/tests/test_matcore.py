import numpy as np
import pytest
from numpy.testing import assert_allclose

from qdilate.corpus import epsilon_triple
from qdilate.exceptions import ContractionError, DimensionError, GramMismatch
from qdilate.matcore import (
    adjoint,
    as_mat,
    defect,
    eig2,
    halmos,
    identity,
    is_diagonalizable2,
    is_normal,
    is_unitary,
    mul,
    operator_norm,
    require_contraction,
    schur2,
    unitary_completion,
)

SEEDS = [0, 1, 2, 3, 4]


def _contraction(seed: int, size: int = 2, norm: float = 0.9) -> np.ndarray:
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
    return norm * A / np.linalg.norm(A, 2)


@pytest.mark.parametrize("seed", SEEDS)
def test_operator_norm_matches_largest_singular_value(seed):
    A = _contraction(seed, norm=0.7) * 3
    assert operator_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-12)
    B = _contraction(seed, size=5, norm=0.4)
    assert operator_norm(B) == pytest.approx(0.4, rel=1e-10)


def test_as_mat_rejects_bad_input():
    with pytest.raises(DimensionError):
        as_mat([1.0, 2.0])
    with pytest.raises(ValueError):
        as_mat([[np.nan, 0.0], [0.0, 1.0]])


def test_eig2_orders_lexicographically():
    """
    The eigenvalue with the larger real part comes last.
    """
    low, high = eig2(np.diag([0.5, 0.5j]))
    assert low.value == pytest.approx(0.5j)
    assert high.value == pytest.approx(0.5)
    assert_allclose(np.abs(high.vector), [1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("seed", SEEDS)
def test_eig2_pairs_are_eigenpairs(seed):
    M = _contraction(seed)
    for pair in eig2(M):
        assert_allclose(M @ pair.vector, pair.value * pair.vector, atol=1e-10)
        assert np.linalg.norm(pair.vector) == pytest.approx(1.0)


def test_jordan_block_is_not_diagonalizable():
    assert not is_diagonalizable2(np.array([[0.3, 0.4], [0.0, 0.3]], dtype=np.complex128))
    assert is_diagonalizable2(0.5 * identity(2))
    assert is_diagonalizable2(np.diag([0.2, -0.4]).astype(np.complex128))


@pytest.mark.parametrize("seed", SEEDS)
def test_defect_and_halmos_block(seed):
    T = _contraction(seed)
    D = defect(T)
    assert_allclose(D @ D, identity(2) - adjoint(T) @ T, atol=1e-12)
    assert is_unitary(halmos(T))


def test_require_contraction_reports_norm():
    with pytest.raises(ContractionError) as exc:
        require_contraction(2 * identity(2))
    assert exc.value.norm == pytest.approx(2.0)


@pytest.mark.parametrize("seed", SEEDS)
def test_schur2_triangularizes(seed):
    M = _contraction(seed)
    Q, S = schur2(M)
    assert is_unitary(Q)
    assert_allclose(Q @ S @ adjoint(Q), M, atol=1e-10)
    assert S[1, 0] == 0


@pytest.mark.parametrize("seed", SEEDS)
def test_unitary_completion_maps_frame(seed):
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    W0, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    G = W0 @ F
    W = unitary_completion(F, G)
    assert is_unitary(W)
    assert_allclose(W @ F, G, atol=1e-10)


def test_unitary_completion_rank_deficient_frame():
    F = np.array([[1.0, 2.0], [0.0, 0.0], [0.0, 0.0]], dtype=np.complex128)
    G = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 2.0]], dtype=np.complex128)
    W = unitary_completion(F, G)
    assert is_unitary(W)
    assert_allclose(W @ F, G, atol=1e-12)


def test_unitary_completion_gram_mismatch():
    F = np.eye(3, 2, dtype=np.complex128)
    with pytest.raises(GramMismatch):
        unitary_completion(F, 2 * F)


def test_normality():
    assert is_normal(np.diag([0.5, 0.3j]).astype(np.complex128))
    assert not is_normal(np.array([[0.0, 0.5], [0.0, 0.0]], dtype=np.complex128))


def test_mul():
    """
    Products of small matrices, including the relation of the epsilon triple.
    """
    A = as_mat([[0, 0], [0.3, 0]])
    B = as_mat([[0, 0.5], [0, 0]])
    assert_allclose(mul(A, B), [[0, 0], [0, 0.15]], atol=1e-15)
    assert_allclose(mul(identity(2), A), A)
    T1, T2, T3 = epsilon_triple()
    assert_allclose(mul(T2, T3), -T1, atol=1e-14)
    with pytest.raises(DimensionError):
        mul(identity(2), identity(3))
