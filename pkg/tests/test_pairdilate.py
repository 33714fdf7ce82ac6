import cmath
import itertools
import logging

import numpy as np
import pytest
from scipy.sparse import linalg as splinalg

from qdilate.corpus import epsilon_triple, type1_example
from qdilate.enums import DilationMode
from qdilate.exceptions import CyclicInfeasible, DimensionError, StructureViolation
from qdilate.matcore import adjoint, defect, identity
from qdilate.pairdilate import (
    ando_depth,
    check_dimension,
    close_to_unitaries,
    dilate_pair,
    pair_unitary_contraction,
    q_ando,
    scalar_ring,
    schaffer,
    schaffer_ring,
    site_embedding,
    spectral_lift,
    twisted_diag,
)
from qdilate.schemas import TruncationConfig
from qdilate.verify import verify_certificate

TWIST = np.diag([1.0, 1j]).astype(np.complex128)
FIFTH = cmath.exp(2j * cmath.pi / 5)
NILPOTENT = np.array([[0, 1], [0, 0]], dtype=np.complex128)

# (T1, T2, q, order of q, degree)
ROOT_PAIRS = [
    (np.diag([0.5, 0.3j]), np.diag([-0.4, 0.6]), 1.0, 1, 4),
    (epsilon_triple()[1], epsilon_triple()[2], -1.0, 2, 6),
    (0.6 * np.diag([1.0, FIFTH]), np.array([[0, 0], [0.5, 0]]), FIFTH, 5, 4),
]


def _unitary_residual(U) -> float:
    n = U.shape[0]
    return float(np.linalg.norm((U.conj().T @ U).toarray() - np.eye(n)))


def _contraction(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return 0.9 * A / np.linalg.norm(A, 2)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ring_compresses_to_powers(seed):
    """
    A ring of M sites reproduces T^s for every s <= M - 1.
    """
    T = _contraction(seed)
    M = 6
    U = schaffer_ring(T, M)
    V = site_embedding(2, M)
    assert _unitary_residual(U) < 1e-12
    X = V
    for s in range(M):
        np.testing.assert_allclose(adjoint(V) @ X, np.linalg.matrix_power(T, s), atol=1e-12)
        X = U @ X


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_ring_reach_stops_before_return(seed):
    """
    The first emitted mass returns at step M and adds ``D_{T^*} D_T`` to ``T^M``.
    """
    T = _contraction(seed)
    M = 5
    U = schaffer_ring(T, M)
    V = site_embedding(2, M)
    X = V
    for _ in range(M):
        X = U @ X
    np.testing.assert_allclose(
        adjoint(V) @ X, np.linalg.matrix_power(T, M) + defect(adjoint(T)) @ defect(T), atol=1e-12
    )


def test_ring_needs_two_sites():
    with pytest.raises(ValueError):
        schaffer_ring(0.5 * identity(2), 1)


def test_schaffer_certificate():
    T = _contraction(7)
    cert = schaffer(T, TruncationConfig(5))
    report = verify_certificate([T], cert)
    assert report.passed
    assert cert.dim == 2 * 7


@pytest.mark.parametrize("w", [0.5, -0.3j, 0.0])
def test_scalar_ring(w):
    N = 4
    u = scalar_ring(w, N)
    x = np.zeros(u.shape[0], dtype=np.complex128)
    x[0] = 1.0
    for s in range(N + 1):
        assert x[0] == pytest.approx(w**s, abs=1e-12)
        x = u @ x


def test_unimodular_scalar_ring_is_one_site():
    assert scalar_ring(1j, 5).shape == (1, 1)


def test_twisted_diag_needs_period():
    with pytest.raises(CyclicInfeasible):
        twisted_diag(TWIST, 1j, TruncationConfig(4, 6))
    D = twisted_diag(TWIST, 1j, TruncationConfig(4, 8))
    assert D.shape == (16, 16)
    with pytest.raises(CyclicInfeasible):
        twisted_diag(TWIST, cmath.exp(0.1234567j), TruncationConfig(4, 8))
    assert twisted_diag(TWIST, 1j, TruncationConfig(4, 6, DilationMode.WINDOWED)).shape == (12, 12)


def test_pair_unitary_contraction_cyclic():
    """
    ``diag(1, i)`` and a lower nilpotent: exact relation on the whole ring.
    """
    _, T = type1_example()
    cert = pair_unitary_contraction(TWIST, T, 1j, TruncationConfig(4, 8))
    R_t, U_T = cert.U
    assert cert.edge.size == 0
    assert splinalg.norm(R_t @ U_T - 1j * (U_T @ R_t)) < 1e-12
    assert verify_certificate([TWIST, T], cert).passed


def test_pair_unitary_contraction_windowed():
    _, T = type1_example()
    cfg = TruncationConfig(4, 6, DilationMode.WINDOWED)
    cert = pair_unitary_contraction(TWIST, T, 1j, cfg)
    assert list(cert.edge) == [10, 11]
    report = verify_certificate([TWIST, T], cert)
    assert report.windowed
    assert report.passed


def test_pair_hypotheses():
    _, T = type1_example()
    with pytest.raises(StructureViolation):
        pair_unitary_contraction(2 * TWIST, T, 1j, TruncationConfig(4, 8))
    with pytest.raises(StructureViolation):
        pair_unitary_contraction(TWIST, T, -1.0, TruncationConfig(4, 8))


def test_ando_depth():
    assert ando_depth(5) == 7
    assert ando_depth(5, 2) == 12


def test_q_ando_words():
    """
    Every word of length at most the depth compresses to the same word in the pair.
    """
    T1, T2 = type1_example()
    depth = 4
    W1, W2, V = q_ando(T1, T2, 1j, depth)
    assert splinalg.norm(W1 @ W2 - 1j * (W2 @ W1)) < 1e-10
    ops = {0: (W1, T1), 1: (W2, T2)}
    for length in range(depth + 1):
        for word in itertools.product((0, 1), repeat=length):
            X, want = V, identity(2)
            for letter in reversed(word):
                X = ops[letter][0] @ X
                want = ops[letter][1] @ want
            np.testing.assert_allclose(adjoint(V) @ X, want, atol=1e-10)


@pytest.mark.parametrize("mode", list(DilationMode))
def test_dilate_pair(mode):
    T = type1_example()
    cert = dilate_pair(*T, 1j, TruncationConfig(3, mode=mode), strict=True)
    assert cert.k == 2
    assert cert.cfg.mode == mode
    assert _unitary_residual(cert.U[0]) < 1e-9
    if mode == DilationMode.CYCLIC:
        assert cert.cfg.M % 4 == 0
        assert cert.edge.size == 0
    else:
        assert cert.edge.size > 0
    assert verify_certificate(T, cert).passed


@pytest.mark.parametrize("T1, T2, q, order, N", ROOT_PAIRS)
def test_spectral_lift(T1, T2, q, order, N):
    """
    ``R X = q X R`` holds exactly and ``V^* R^j X^m V = T1^j T2^m`` on the certified degrees.
    """
    R, X, V = spectral_lift(T1, T2, q, N)
    np.testing.assert_allclose(R @ X, q * X @ R, atol=1e-12)
    np.testing.assert_allclose(adjoint(V) @ V, identity(2), atol=1e-8)
    assert np.linalg.norm(X, 2) <= 1 + 1e-9
    for j, m in itertools.product(range(N + 1), range(3)):
        got = adjoint(V) @ np.linalg.matrix_power(R, j) @ np.linalg.matrix_power(X, m) @ V
        want = np.linalg.matrix_power(T1, j) @ np.linalg.matrix_power(T2, m)
        np.testing.assert_allclose(got, want, atol=1e-8)


@pytest.mark.parametrize("T1, T2, q, order, N", ROOT_PAIRS)
def test_close_to_unitaries_cyclic(T1, T2, q, order, N):
    """
    Root-of-unity twists close exactly on a ring whose length is a multiple of the order.
    """
    W1, W2, V = q_ando(T1, T2, q, ando_depth(N))
    cert = close_to_unitaries(W1, W2, V, q, TruncationConfig(N))
    U1, U2 = cert.U
    assert cert.cfg.mode == DilationMode.CYCLIC
    assert cert.cfg.M % order == 0
    assert cert.edge.size == 0
    assert splinalg.norm(U1 @ U2 - q * (U2 @ U1)) < 1e-9
    report = verify_certificate([T1, T2], cert)
    assert report.passed
    assert not report.windowed


def test_strict_cyclic_rejects_positivity_failure():
    """
    ``0.8 N`` with itself has ``||D_2 T1 D_2^-1|| = 4/3`` in both orders.
    """
    T = 0.8 * NILPOTENT
    with pytest.raises(CyclicInfeasible):
        dilate_pair(T, T, 1.0, TruncationConfig(3), strict=True)


def test_cyclic_falls_back_to_windowed(caplog):
    T = 0.8 * NILPOTENT
    with caplog.at_level(logging.WARNING, logger="qdilate.pairdilate"):
        cert = dilate_pair(T, T, 1.0, TruncationConfig(3))
    assert "Falling back to a windowed certificate" in caplog.text
    assert cert.cfg.mode == DilationMode.WINDOWED
    assert cert.edge.size > 0
    assert verify_certificate([T, T], cert).passed


def test_strict_cyclic_rejects_irrational_twist():
    q = cmath.exp(0.1234567j)
    T1 = np.diag([0.5, 0.5 * q])
    T2 = np.array([[0, 0], [0.6, 0]], dtype=np.complex128)
    with pytest.raises(CyclicInfeasible):
        dilate_pair(T1, T2, q, TruncationConfig(3), strict=True)
    with pytest.raises(CyclicInfeasible):
        spectral_lift(T1, T2, q, 3)


def test_spectral_lift_needs_invertible_defect():
    with pytest.raises(CyclicInfeasible):
        spectral_lift(0.5 * identity(2), NILPOTENT, 1.0, 3)


def test_dimension_cap():
    with pytest.raises(DimensionError):
        check_dimension(5000)
