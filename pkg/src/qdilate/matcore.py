import logging

import numpy as np
import scipy.linalg

from .exceptions import ContractionError, DimensionError, GramMismatch
from .schemas import EigPair2, Mat, Tol

logger = logging.getLogger(__name__)

DEFAULT_TOL = Tol()


def as_mat(A) -> Mat:
    """
    Convert any array-like to a finite 2-D complex128 matrix.

    Raises:
        DimensionError: The input is not two-dimensional or has an empty side.
        ValueError: The input contains NaN or Inf.
    """
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] == 0 or M.shape[1] == 0:
        logger.error(f"Expected a non-empty matrix, got shape {M.shape}")
        raise DimensionError(f"Expected a non-empty matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        logger.error("Matrix contains non-finite entries")
        raise ValueError("Matrix contains non-finite entries")
    return M


def require_square(A: Mat, size: int | None = None) -> int:
    n, m = A.shape
    if n != m or (size is not None and n != size):
        want = f"{size}x{size}" if size is not None else "square"
        logger.error(f"Expected a {want} matrix, got shape {A.shape}")
        raise DimensionError(f"Expected a {want} matrix, got shape {A.shape}")
    return n


def mul(A: Mat, B: Mat) -> Mat:
    if A.shape[1] != B.shape[0]:
        logger.error(f"Cannot multiply {A.shape} by {B.shape}")
        raise DimensionError(f"Cannot multiply {A.shape} by {B.shape}")
    return A @ B


def adjoint(A: Mat) -> Mat:
    return A.conj().T


def identity(n: int) -> Mat:
    return np.eye(n, dtype=np.complex128)


def operator_norm(A: Mat) -> float:
    """
    Largest singular value.

    2x2 matrices use the closed form for the eigenvalues of ``A^* A`` (trace and determinant),
    larger ones a Hermitian eigensolve of ``A^* A``.
    """
    if A.shape == (2, 2):
        t = float(np.sum(np.abs(A) ** 2))
        det = abs(A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]) ** 2
        disc = max(t * t - 4.0 * det, 0.0)
        return float(np.sqrt(max((t + np.sqrt(disc)) / 2.0, 0.0)))
    H = adjoint(A) @ A
    top = scipy.linalg.eigvalsh((H + adjoint(H)) / 2, subset_by_index=[H.shape[0] - 1, H.shape[0] - 1])
    return float(np.sqrt(max(float(top[0]), 0.0)))


def frobenius(A) -> float:
    return float(np.linalg.norm(A))


def _unit_phase(v: Mat) -> Mat:
    # deterministic phase: largest component real positive
    k = int(np.argmax(np.abs(v)))
    v = v / np.linalg.norm(v)
    return v * (abs(v[k]) / v[k])


def eig2(M: Mat, tol: Tol = DEFAULT_TOL) -> tuple[EigPair2, EigPair2]:
    """
    Both eigenpairs of a 2x2 matrix from the quadratic formula.

    Pairs are ordered lexicographically on ``(re, im)`` of the eigenvalue. For each eigenvalue the
    eigenvector is the longer of the two candidates ``(b, l - a)`` and ``(l - d, c)``; a scalar
    matrix gets ``e1`` and ``e2``.

    Raises:
        DimensionError: ``M`` is not 2x2.
    """
    require_square(M, 2)
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    half = (a + d) / 2
    s = np.sqrt(((a - d) / 2) ** 2 + b * c + 0j)
    values = sorted([complex(half + s), complex(half - s)], key=lambda z: (z.real, z.imag))
    floor = tol.bound(operator_norm(M))

    pairs = []
    for idx, lam in enumerate(values):
        cand1 = np.array([b, lam - a], dtype=np.complex128)
        cand2 = np.array([lam - d, c], dtype=np.complex128)
        best = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
        if np.linalg.norm(best) <= floor:
            best = np.eye(2, dtype=np.complex128)[idx]
        pairs.append(EigPair2(lam, _unit_phase(best)))
    return pairs[0], pairs[1]


def is_scalar(M: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    n = require_square(M)
    lam = np.trace(M) / n
    return operator_norm(M - lam * identity(n)) <= tol.bound(operator_norm(M))


def is_diagonalizable2(M: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    """
    A 2x2 matrix is diagonalizable iff it is a scalar map or has two distinct eigenvalues.

    Eigenvalues count as distinct when they are separated beyond the tolerance and their
    eigenvectors are not numerically parallel (a perturbed Jordan block fails the second test).
    """
    if is_scalar(M, tol):
        return True
    return has_distinct_eigenvalues(M, tol)


def has_distinct_eigenvalues(M: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    p, q = eig2(M, tol)
    if abs(p.value - q.value) <= tol.bound(operator_norm(M)):
        return False
    basis = np.column_stack([p.vector, q.vector])
    return abs(np.linalg.det(basis)) > np.sqrt(tol.bound(1.0))


def is_normal(M: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    H = adjoint(M)
    return operator_norm(M @ H - H @ M) <= tol.bound(operator_norm(M) ** 2)


def is_unitary(M: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    n = require_square(M)
    return operator_norm(adjoint(M) @ M - identity(n)) <= tol.bound(1.0)


def require_contraction(T: Mat, tol: Tol = DEFAULT_TOL) -> float:
    norm = operator_norm(T)
    if norm > 1.0 + tol.bound(1.0):
        logger.error(f"Operator norm {norm:.12g} exceeds 1")
        raise ContractionError(f"Operator norm {norm:.12g} exceeds 1", norm)
    return norm


def psd_sqrt(H: Mat, tol: Tol = DEFAULT_TOL) -> Mat:
    """
    Square root of a Hermitian matrix that is positive semidefinite up to ``tol``.
    Eigenvalues in ``[-tol, 0)`` are clamped to zero.
    """
    H = (H + adjoint(H)) / 2
    w, Q = scipy.linalg.eigh(H)
    floor = tol.bound(1.0)
    if w.size and w.min() < -floor:
        message = f"Matrix is not positive semidefinite, smallest eigenvalue {w.min():.3e}"
        logger.error(message)
        raise ContractionError(message, float(w.min()))
    root = (Q * np.sqrt(np.clip(w, 0.0, None))) @ adjoint(Q)
    return (root + adjoint(root)) / 2


def defect(T: Mat, tol: Tol = DEFAULT_TOL) -> Mat:
    """
    Defect operator ``D_T = (I - T^* T)^(1/2)``.

    Raises:
        ContractionError: ``||T|| > 1 + tol``.
    """
    require_contraction(T, tol)
    n = T.shape[1]
    return psd_sqrt(identity(n) - adjoint(T) @ T, tol)


def halmos(T: Mat, tol: Tol = DEFAULT_TOL) -> Mat:
    """
    Rotation block ``[[T, D_T*], [D_T, -T^*]]``, unitary for every square contraction ``T``.
    """
    require_square(T)
    return np.block([[T, defect(adjoint(T), tol)], [defect(T, tol), -adjoint(T)]])


def schur2(M: Mat, first: complex | None = None, tol: Tol = DEFAULT_TOL) -> tuple[Mat, Mat]:
    """
    Unitary triangularization ``M = Q S Q^*`` of a 2x2 matrix.

    Args:
        M (Mat): 2x2 input.
        first (complex | None, optional): Eigenvalue to place at ``S[0, 0]``; defaults to the
            first eigenvalue returned by :func:`eig2`.

    Returns:
        The unitary ``Q`` (first column an eigenvector) and the upper-triangular ``S``.
    """
    p, q = eig2(M, tol)
    pick = p
    if first is not None and abs(q.value - first) < abs(p.value - first):
        pick = q
    v = pick.vector
    Q = np.array([[v[0], -np.conj(v[1])], [v[1], np.conj(v[0])]], dtype=np.complex128)
    S = adjoint(Q) @ M @ Q
    S[1, 0] = 0.0
    return Q, S


def orthonormal_complement(B: Mat, n: int) -> Mat:
    """
    Orthonormal basis of the complement of ``range(B)`` in ``C^n``.

    Built by column-pivoted Gram-Schmidt over the standard basis so the result is reproducible.
    ``B`` must have orthonormal columns (it may have zero columns).
    """
    basis = B.copy() if B.size else np.zeros((n, 0), dtype=np.complex128)
    added = []
    while basis.shape[1] < n:
        R = identity(n) - basis @ adjoint(basis)
        col = int(np.argmax(np.linalg.norm(R, axis=0)))
        v = R[:, col]
        for _ in range(2):
            v = v - basis @ (adjoint(basis) @ v)
        v = v / np.linalg.norm(v)
        added.append(v)
        basis = np.column_stack([basis, v])
    if not added:
        return np.zeros((n, 0), dtype=np.complex128)
    return np.column_stack(added)


def unitary_completion(F: Mat, G: Mat, tol: Tol = DEFAULT_TOL) -> Mat:
    """
    Unitary ``W`` with ``W F = G`` for frames sharing a Gram matrix.

    Columns of ``F`` are orthonormalized by modified Gram-Schmidt (two passes) and the same
    coefficients are applied to ``G``; both ranges are then extended by deterministic complements.

    Raises:
        DimensionError: ``F`` and ``G`` differ in shape.
        GramMismatch: ``||F^* F - G^* G||`` exceeds the tolerance.
    """
    if F.shape != G.shape:
        logger.error(f"Frames have different shapes {F.shape} and {G.shape}")
        raise DimensionError(f"Frames have different shapes {F.shape} and {G.shape}")
    n, r = F.shape
    scale = max(operator_norm(F) ** 2 if F.size else 0.0, operator_norm(G) ** 2 if G.size else 0.0, 1.0)
    gram = operator_norm(adjoint(F) @ F - adjoint(G) @ G) if r else 0.0
    if gram > tol.bound(scale):
        logger.error(f"Gram matrices differ by {gram:.3e}")
        raise GramMismatch(f"Gram matrices differ by {gram:.3e}", gram)

    P_cols: list[Mat] = []
    Q_cols: list[Mat] = []
    floor = np.sqrt(tol.bound(scale))
    for j in range(r):
        f = F[:, j].copy()
        g = G[:, j].copy()
        for _ in range(2):
            for p, q in zip(P_cols, Q_cols):
                coef = np.vdot(p, f)
                f = f - coef * p
                g = g - coef * q
        nrm = np.linalg.norm(f)
        if nrm <= floor:
            continue
        P_cols.append(f / nrm)
        Q_cols.append(g / nrm)

    P = np.column_stack(P_cols) if P_cols else np.zeros((n, 0), dtype=np.complex128)
    Q = np.column_stack(Q_cols) if Q_cols else np.zeros((n, 0), dtype=np.complex128)
    logger.debug(f"Unitary completion of a rank {P.shape[1]} frame in dimension {n}")
    W = np.column_stack([Q, orthonormal_complement(Q, n)]) @ adjoint(
        np.column_stack([P, orthonormal_complement(P, n)])
    )
    return W
