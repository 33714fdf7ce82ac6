import logging

import numpy as np
import scipy.linalg
from scipy import sparse

from .enums import DilationMode
from .exceptions import CyclicInfeasible, DimensionError, StructureViolation
from .matcore import (
    DEFAULT_TOL,
    adjoint,
    defect,
    identity,
    is_unitary,
    operator_norm,
    require_contraction,
    require_square,
    unitary_completion,
)
from .qrel import snap_root_of_unity
from .schemas import RING_MARGIN, DilationCertificate, Mat, QEntry, QFamily, Tol, TruncationConfig

logger = logging.getLogger(__name__)

# Largest total dimension of an emitted certificate.
DIMENSION_CAP = 4096

# A ring of M blocks compresses exactly to T^s for 0 <= s <= M - RING_REACH_LOSS.
RING_REACH_LOSS = 1

# Relative level below which eigen-directions of a Stein solution are dropped.
GRAMIAN_FLOOR = 1e-13


def check_dimension(dim: int):
    """
    Raises:
        DimensionError: ``dim`` exceeds :data:`DIMENSION_CAP`.
    """
    if dim > DIMENSION_CAP:
        logger.error(f"Certificate dimension {dim} exceeds the cap {DIMENSION_CAP}")
        raise DimensionError(f"Certificate dimension {dim} exceeds the cap {DIMENSION_CAP}")


def _csr(A) -> sparse.csr_array:
    return sparse.csr_array(A, dtype=np.complex128)


def _pair_family(q: complex) -> QFamily:
    snapped = snap_root_of_unity(q)
    entry = QEntry.exact(q) if snapped is None else QEntry.exact(q, *snapped)
    return QFamily(2, {(0, 1): entry})


def schaffer_ring(T: Mat, M: int, tol: Tol = DEFAULT_TOL) -> sparse.csr_array:
    """
    Egervary ring of ``M`` sites over ``C^n`` with the rotation block of ``T`` between
    sites ``(0, M-1)`` and ``(0, 1)`` and the identity shift ``i-1 -> i`` elsewhere.

    The result is unitary and its compression to site 0 is ``T^s`` for ``0 <= s <= M - RING_REACH_LOSS``:
    off-site mass leaves at step 1 and first returns to site 0 at step ``M``. Callers still size main
    rings with ``M >= N + 2`` (see :class:`TruncationConfig`), one site more than the reach needs.

    Raises:
        ValueError: ``M < 2``.
        ContractionError: ``||T|| > 1 + tol``.
    """
    if M < 2:
        raise ValueError(f"A ring needs at least 2 sites, got {M}")
    n = require_square(T)
    require_contraction(T, tol)
    check_dimension(n * M)
    grid: list[list[sparse.csr_array | None]] = [[None] * M for _ in range(M)]
    grid[0][0] = _csr(T)
    grid[1][0] = _csr(defect(T, tol))
    grid[0][M - 1] = _csr(defect(adjoint(T), tol))
    grid[1][M - 1] = _csr(-adjoint(T))
    for i in range(2, M):
        grid[i][i - 1] = sparse.eye_array(n, dtype=np.complex128, format="csr")
    return _csr(sparse.block_array(grid, format="csr"))


def site_embedding(n: int, M: int) -> Mat:
    """
    Isometry ``C^n -> (C^n)^M`` onto site 0.
    """
    V = np.zeros((n * M, n), dtype=np.complex128)
    V[:n] = identity(n)
    return V


def site_edge(n: int, M: int) -> np.ndarray:
    """
    Basis indices of the last ring site.
    """
    return np.arange((M - 1) * n, M * n)


def scalar_ring(w: complex, N: int, tol: Tol = DEFAULT_TOL) -> sparse.csr_array:
    """
    Unitary whose ``(0, 0)`` entry of the ``s``-th power is ``w^s`` for ``s <= N``.

    Unimodular weights need no ring and give the ``1x1`` matrix ``[[w]]``; a zero weight
    gives the cyclic shift.
    """
    if abs(abs(w) - 1.0) <= tol.bound(1.0):
        return _csr(np.array([[w]]))
    return schaffer_ring(np.array([[w]], dtype=np.complex128), max(N + RING_REACH_LOSS, 2), tol)


def schaffer(T: Mat, cfg: TruncationConfig, tol: Tol = DEFAULT_TOL) -> DilationCertificate:
    """
    Single unitary dilation of a contraction on a ring of ``cfg.M`` sites.

    Raises:
        ValueError: ``cfg.M < cfg.N + 2``.
        ContractionError: ``T`` is not a contraction.
    """
    if cfg.M < cfg.N + RING_MARGIN:
        raise ValueError(f"Ring with {cfg.M} sites cannot certify degree {cfg.N}")
    n = require_square(T)
    U = schaffer_ring(T, cfg.M, tol)
    logger.debug(f"Ring dilation of a {n}x{n} contraction on {cfg.M} sites")
    return DilationCertificate([U], site_embedding(n, cfg.M), QFamily(1), cfg)


def twisted_diag(R: Mat, q: complex, cfg: TruncationConfig) -> sparse.csr_array:
    """
    ``blockdiag(q^0 R, q^1 R, ..., q^(M-1) R)`` on the ring lattice of ``cfg``.

    Raises:
        CyclicInfeasible: Cyclic mode and ``q`` is not a root of unity whose order divides ``M``.
    """
    M = cfg.M
    snapped = snap_root_of_unity(q)
    if cfg.mode == DilationMode.CYCLIC and not cfg.admits(None if snapped is None else snapped[1]):
        logger.error(f"Twist {q:.6g} is not periodic on a ring of {M} sites")
        raise CyclicInfeasible(f"Twist {q:.6g} is not periodic on a ring of {M} sites")
    phases = np.array([q**i for i in range(M)], dtype=np.complex128)
    return _csr(sparse.kron(sparse.diags_array(phases), _csr(R), format="csr"))


def _check_twisted_hypotheses(R: Mat, T: Mat, q: complex, tol: Tol):
    scale = max(operator_norm(T), 1.0)
    checks = {
        "R unitary": operator_norm(adjoint(R) @ R - identity(R.shape[0])),
        "R T = q T R": operator_norm(R @ T - q * T @ R),
        "R T* = conj(q) T* R": operator_norm(R @ adjoint(T) - np.conj(q) * adjoint(T) @ R),
        "R D_T = D_T R": operator_norm(R @ defect(T, tol) - defect(T, tol) @ R),
        "R D_T* = D_T* R": operator_norm(R @ defect(adjoint(T), tol) - defect(adjoint(T), tol) @ R),
    }
    for name, residual in checks.items():
        if residual > 10 * tol.bound(scale):
            logger.error(f"Hypothesis {name} fails with residual {residual:.3e}")
            raise StructureViolation(f"Hypothesis {name} fails with residual {residual:.3e}", "twisted-pair")


def pair_unitary_contraction(
    R: Mat, T: Mat, q: complex, cfg: TruncationConfig, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    """
    Dilate a pair ``(R, T)`` with ``R`` unitary and ``R T = q T R`` to ``(R~, U_T)``.

    ``U_T`` is the ring dilation of ``T`` and ``R~`` the twisted diagonal of ``R``. In Windowed
    mode the relation defect sits on the last ring site, which is recorded as the edge.

    Raises:
        StructureViolation: ``R`` is not unitary or the pair does not q-commute.
        CyclicInfeasible: Cyclic mode and ``q`` is not a root of unity whose order divides ``M``.
    """
    n = require_square(R)
    require_square(T, n)
    if not is_unitary(R, tol):
        logger.error("First member of the pair is not unitary")
        raise StructureViolation("First member of the pair is not unitary", "not-unitary")
    _check_twisted_hypotheses(R, T, q, tol)
    R_t = twisted_diag(R, q, cfg)
    U_T = schaffer_ring(T, cfg.M, tol)
    edge = None
    if cfg.mode == DilationMode.WINDOWED and abs(q**cfg.M - 1) > np.sqrt(tol.bound(1.0)):
        edge = site_edge(n, cfg.M)
    logger.info(f"Unitary/contraction pair dilated on {cfg.M} sites, q={q:.6g}, mode {cfg.mode.value}")
    return DilationCertificate([R_t, U_T], site_embedding(n, cfg.M), _pair_family(q), cfg, edge=edge)


def ando_depth(N: int, reach: int = 1) -> int:
    """
    Number of defect groups needed so that words of length ``reach * N`` never see the wrap.
    """
    return reach * N + RING_MARGIN


class _AndoLayout:
    """
    ``K = H + E^(2L)`` with ``E = H + H``; block 0 is the head, blocks ``1..2L`` the half-groups.
    Group ``j`` is the pair of half-groups ``(2j+1, 2j+2)``.
    """

    def __init__(self, n: int, depth: int):
        self.n = n
        self.depth = depth
        self.halves = 2 * depth
        self.dim = n + self.halves * 2 * n

    def sizes(self) -> list[int]:
        return [self.n] + [2 * self.n] * self.halves

    def group_indices(self, groups: int) -> np.ndarray:
        """
        Basis indices of the last ``groups`` groups.
        """
        start = self.n + (self.halves - 2 * groups) * 2 * self.n
        return np.arange(start, self.dim)


def _hat(D: Mat) -> Mat:
    n = D.shape[0]
    return np.vstack([D, np.zeros((n, n), dtype=np.complex128)])


def _block(grid: list[list], sizes: list[int]) -> sparse.csr_array:
    # block_array infers widths from the blocks, so empty columns get an explicit zero block
    for j, size in enumerate(sizes):
        if all(row[j] is None for row in grid):
            grid[j][j] = _csr(np.zeros((size, size)))
    return _csr(sparse.block_array(grid, format="csr"))


def _shift(layout: _AndoLayout, T: Mat, closed: bool, tol: Tol) -> sparse.csr_array:
    """
    ``(h; e_1..e_2L) -> (T h; D^ h, e_1, ..., e_(2L-1))``; closed, ``e_2L`` re-enters through the
    unitary completion of the column ``[T; D^]``.
    """
    n, H = layout.n, layout.halves
    grid: list[list] = [[None] * (H + 1) for _ in range(H + 1)]
    D_hat = _hat(defect(T, tol))
    grid[0][0] = _csr(T)
    grid[1][0] = _csr(D_hat)
    for h in range(1, H):
        grid[h + 1][h] = sparse.eye_array(2 * n, dtype=np.complex128, format="csr")
    if closed:
        F = np.vstack([identity(n), np.zeros((2 * n, n), dtype=np.complex128)])
        Theta = unitary_completion(F, np.vstack([T, D_hat]), tol)
        grid[0][H] = _csr(Theta[:n, n:])
        grid[1][H] = _csr(Theta[n:, n:])
    return _block(grid, layout.sizes())


def _coupling(T1: Mat, T2: Mat, q: complex, tol: Tol) -> Mat:
    """
    Unitary ``G`` on ``E + E`` with ``G [D^1 T2; D^2] = q [D^2 T1; D^1]``.
    """
    D1, D2 = _hat(defect(T1, tol)), _hat(defect(T2, tol))
    F = np.vstack([D1 @ T2, D2])
    G = q * np.vstack([D2 @ T1, D1])
    return unitary_completion(F, G, tol)


def _phase_ladder(layout: _AndoLayout, G: Mat, q: complex) -> sparse.csr_array:
    n = layout.n
    blocks = [sparse.eye_array(n, dtype=np.complex128, format="csr")]
    blocks += [_csr((q**j) * G) for j in range(layout.depth)]
    return _csr(sparse.block_diag(blocks, format="csr"))


def _ando_ops(
    T1: Mat, T2: Mat, q: complex, depth: int, closed: bool, tol: Tol
) -> tuple[sparse.csr_array, sparse.csr_array, Mat, _AndoLayout]:
    n = require_square(T1)
    require_square(T2, n)
    layout = _AndoLayout(n, depth)
    check_dimension(layout.dim)
    G_t = _phase_ladder(layout, _coupling(T1, T2, q, tol), q)
    W1 = _csr(G_t @ _shift(layout, T1, closed, tol))
    W2 = _csr(_shift(layout, T2, closed, tol) @ G_t.conj().T)
    V = np.zeros((layout.dim, n), dtype=np.complex128)
    V[:n] = identity(n)
    return W1, W2, V, layout


def q_ando(
    T1: Mat, T2: Mat, q: complex, depth: int, tol: Tol = DEFAULT_TOL
) -> tuple[sparse.csr_array, sparse.csr_array, Mat]:
    """
    Truncated q-Ando pair of a q-commuting pair of contractions.

    Each contraction is lifted to a shift pushing its defect vector one half-group down; the
    defect frames of the two orders of application are matched by a unitary ``G`` carrying the
    phase ``q`` per group. The returned partial isometries satisfy ``W1 W2 = q W2 W1`` exactly and
    the compression of any word of length at most ``depth`` equals the same word in ``T1, T2``.

    Returns:
        ``(W1, W2, V)`` with ``V`` the embedding of ``H`` as the head block.

    Raises:
        DimensionError: Shapes differ or the space exceeds the dimension cap.
        ContractionError: A member is not a contraction.
        GramMismatch: The pair does not q-commute closely enough for the defect frames to match.
    """
    for T in (T1, T2):
        require_contraction(T, tol)
    residual = operator_norm(T1 @ T2 - q * T2 @ T1)
    if residual > 10 * tol.bound(1.0):
        logger.warning(f"Pair q-commutes only up to {residual:.3e}")
    W1, W2, V, layout = _ando_ops(T1, T2, q, depth, False, tol)
    logger.debug(f"q-Ando pair of depth {depth} in dimension {layout.dim}")
    return W1, W2, V


def _stein(S: Mat, Q: Mat) -> Mat:
    """
    Solution of ``Y = Q + S^* Y S`` for ``S`` of spectral radius below one.
    """
    Y = scipy.linalg.solve_discrete_lyapunov(adjoint(S), Q)
    return (Y + adjoint(Y)) / 2


def _gramian_factor(Y: Mat, S: Mat) -> tuple[Mat, Mat]:
    """
    Factor ``F`` of ``Y = F^* F`` on the range of ``Y`` and the contraction ``C`` with ``C F = F S``.
    """
    y, E = scipy.linalg.eigh(Y)
    keep = y > GRAMIAN_FLOOR * max(float(y.max()), 1.0)
    root = np.sqrt(y[keep])
    basis = E[:, keep]
    F = root[:, None] * adjoint(basis)
    return F, F @ S @ (basis / root)


def spectral_lift(T1: Mat, T2: Mat, q: complex, degree: int, tol: Tol = DEFAULT_TOL) -> tuple[Mat, Mat, Mat]:
    """
    Diagonal unitary ``R`` dilating ``T1`` and a contraction ``X`` extending ``T2`` with ``R X = q X R``.

    The ring of ``A = D_2 T1 D_2^-1`` supplies atoms ``(lambda_k, w_k)`` with ``sum lambda_k^j w_k w_k^*
    = D_2^2 T1^j``. Each atom is spread over the orbit ``conj(q)^r lambda_k`` with the weights
    ``T2^(r)* Y_k T2^r``, ``Y_k = w_k w_k^* + S^* Y_k S`` and ``S = T2^s``; summing the orbit restores
    ``T1^j``. ``X`` moves every orbit slot one step along the orbit, so ``X V = V T2``.

    Returns:
        ``(R, X, V)`` with ``V^* R^j X^m V = T1^j T2^m`` for ``j <= degree + 1`` and every ``m``.

    Raises:
        CyclicInfeasible: ``q`` is not a root of unity, ``||T2|| = 1``, or
            ``I - T1^* T1 - T2^* T2 + (T1 T2)^* T1 T2`` is not positive semidefinite.
    """
    snapped = snap_root_of_unity(q)
    if snapped is None:
        logger.error(f"Twist {q:.6g} is not a root of unity")
        raise CyclicInfeasible(f"Twist {q:.6g} is not a root of unity")
    root, order = snapped
    n = require_square(T1)
    require_square(T2, n)
    D2 = defect(T2, tol)
    if np.linalg.svd(D2, compute_uv=False).min() <= np.sqrt(tol.bound(1.0)):
        logger.error("Second member has unit norm, its defect is not invertible")
        raise CyclicInfeasible("Second member has unit norm, its defect is not invertible")
    A = D2 @ T1 @ np.linalg.inv(D2)
    if operator_norm(A) > 1.0 + tol.bound(1.0):
        logger.error(f"Pair fails the positivity condition, ||D2 T1 D2^-1|| = {operator_norm(A):.6g}")
        raise CyclicInfeasible(f"Pair fails the positivity condition, ||D2 T1 D2^-1|| = {operator_norm(A):.6g}")

    form, Z = scipy.linalg.schur(schaffer_ring(A, degree + RING_MARGIN, tol).toarray(), output="complex")
    points = np.diag(form) / np.abs(np.diag(form))
    S = np.linalg.matrix_power(T2, order)
    powers = [np.linalg.matrix_power(T2, r) for r in range(order)]

    slots: list[tuple[complex, Mat]] = []
    steps: list[Mat] = []
    for lam, column in zip(points, Z.T):
        w = D2 @ column[:n]
        if np.vdot(w, w).real <= np.finfo(float).eps:
            continue
        F, C = _gramian_factor(_stein(S, np.outer(w, w.conj())), S)
        for r in range(order):
            slots.append((np.conj(root) ** r * lam, F @ powers[r]))
        steps.append(C)

    sizes = [F.shape[0] for _, F in slots]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    dim = int(offsets[-1])
    check_dimension(dim)
    R = np.diag(np.concatenate([np.full(size, z) for (z, _), size in zip(slots, sizes)]))
    V = np.vstack([F for _, F in slots])
    X = np.zeros((dim, dim), dtype=np.complex128)
    for a, C in enumerate(steps):
        first = a * order
        for r in range(1, order):
            src, dst = first + r, first + r - 1
            X[offsets[dst] : offsets[dst + 1], offsets[src] : offsets[src + 1]] = identity(sizes[src])
        last = first + order - 1
        X[offsets[last] : offsets[last + 1], offsets[first] : offsets[first + 1]] = C

    residuals = {
        "isometry": operator_norm(adjoint(V) @ V - identity(n)),
        "extension": operator_norm(X @ V - V @ T2),
        "moments": max(
            operator_norm(adjoint(V) @ (np.diag(R)[:, None] ** j * V) - np.linalg.matrix_power(T1, j))
            for j in range(1, degree + 1)
        )
        if degree
        else 0.0,
    }
    for name, residual in residuals.items():
        if residual > tol.bound(1.0):
            logger.error(f"Spectral lift loses the {name} by {residual:.3e}")
            raise CyclicInfeasible(f"Spectral lift loses the {name} by {residual:.3e}")
    logger.debug(f"Spectral lift with {len(steps)} orbits of length {order} in dimension {dim}")
    return R, X, V


def lifted_pair(
    T1: Mat, T2: Mat, q: complex, cfg: TruncationConfig, reach: int = 1, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    """
    Cyclic dilation of a q-commuting pair: :func:`spectral_lift` followed by the unitary/contraction
    ring on a length that is a multiple of the order of ``q``.

    The lift is tried with ``T1`` as the diagonal member and, failing that, with the roles swapped.
    Words of length ``reach * cfg.N`` are certified and the relation holds on the whole space.

    Raises:
        CyclicInfeasible: Neither order of the pair admits the lift.
    """
    degree = reach * cfg.N
    family = _pair_family(q)
    ring = TruncationConfig.for_degree(cfg.N, family.orders(), DilationMode.CYCLIC, max(cfg.M, degree + RING_MARGIN))
    if ring.mode != DilationMode.CYCLIC:
        logger.error(f"Twist {q:.6g} is not a root of unity")
        raise CyclicInfeasible(f"Twist {q:.6g} is not a root of unity")

    failures = []
    for first, second, twist, swapped in ((T1, T2, q, False), (T2, T1, np.conj(q), True)):
        try:
            R, X, V = spectral_lift(first, second, twist, degree, tol)
        except CyclicInfeasible as exc:
            failures.append(str(exc))
            continue
        pair = pair_unitary_contraction(R, X, twist, ring, tol)
        U = pair.U[::-1] if swapped else pair.U
        logger.info(f"Lifted pair in dimension {pair.dim}, ring of {ring.M} sites, q={q:.6g}")
        return DilationCertificate(list(U), pair.V @ V, family, ring)
    logger.error(f"No cyclic dilation for the pair: {'; '.join(failures)}")
    raise CyclicInfeasible(f"No cyclic dilation for the pair: {'; '.join(failures)}")


def close_to_unitaries(
    W1: sparse.csr_array,
    W2: sparse.csr_array,
    V: Mat,
    q: complex,
    cfg: TruncationConfig,
    reach: int = 1,
    tol: Tol = DEFAULT_TOL,
) -> DilationCertificate:
    """
    Turn a q-Ando pair into a pair of unitaries with the same moments.

    Windowed: the bottom half-group wraps back into the head through the unitary completion of the
    Ando column; the relation is certified on the window that excludes the last ``reach`` groups.
    Cyclic: the pair compressed to the head is rebuilt by :func:`lifted_pair`, whose ring length is a
    multiple of the order of ``q`` and whose relation holds on the whole space.

    Raises:
        CyclicInfeasible: Cyclic mode was requested and no exact closure exists.
    """
    n = V.shape[1]
    T1 = adjoint(V) @ (W1 @ V)
    T2 = adjoint(V) @ (W2 @ V)
    if cfg.mode == DilationMode.CYCLIC:
        return lifted_pair(T1, T2, q, cfg, reach, tol)

    depth = (V.shape[0] - n) // (4 * n)
    U1, U2, V, layout = _ando_ops(T1, T2, q, depth, True, tol)
    edge = layout.group_indices(min(reach, depth))
    logger.info(f"Closed q-Ando pair in dimension {layout.dim}, mode {cfg.mode.value}")
    return DilationCertificate([U1, U2], V, _pair_family(q), cfg, edge=edge)


def dilate_pair(
    T1: Mat,
    T2: Mat,
    q: complex,
    cfg: TruncationConfig,
    reach: int = 1,
    tol: Tol = DEFAULT_TOL,
    strict: bool = False,
) -> DilationCertificate:
    """
    q-Ando dilation of a general q-commuting pair, closed to unitaries.

    Words of length ``reach * cfg.N`` are certified. A Cyclic request that has no exact closure
    logs a warning with the reason and returns a Windowed certificate, unless ``strict`` is set.

    Raises:
        CyclicInfeasible: ``strict`` Cyclic request without an exact closure.
    """
    depth = ando_depth(cfg.N, reach)
    W1, W2, V = q_ando(T1, T2, q, depth, tol)
    ring = TruncationConfig(cfg.N, max(depth, cfg.N + RING_MARGIN), cfg.mode)
    if cfg.mode == DilationMode.CYCLIC:
        try:
            return close_to_unitaries(W1, W2, V, q, ring, reach, tol)
        except CyclicInfeasible as exc:
            if strict:
                raise
            logger.warning(f"Falling back to a windowed certificate: {exc}")
    return close_to_unitaries(W1, W2, V, q, ring.with_mode(DilationMode.WINDOWED), reach, tol)
