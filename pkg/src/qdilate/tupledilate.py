import logging
import math
from collections.abc import Callable, Sequence
from typing import NoReturn

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .anti import reduce_anti
from .classify import classify, strip_zeros
from .enums import AntiKind, DilationMode, Route, Verdict
from .exceptions import ContractionError, DimensionError, StructureViolation
from .matcore import (
    DEFAULT_TOL,
    adjoint,
    has_distinct_eigenvalues,
    identity,
    is_normal,
    operator_norm,
    require_contraction,
    schur2,
)
from .pairdilate import (
    check_dimension,
    dilate_pair,
    pair_unitary_contraction,
    scalar_ring,
    schaffer,
    schaffer_ring,
    site_embedding,
)
from .qrel import check_tuple_shapes, detect_family, snap_root_of_unity
from .schemas import (
    RING_MARGIN,
    AntiReduction,
    CanonicalForm,
    DilationCertificate,
    DilationOutcome,
    Mat,
    OrderingPlan,
    QEntry,
    QFamily,
    SimilarityPlan,
    Tol,
    TruncationConfig,
)
from .verify import residual_threshold, verify_certificate

logger = logging.getLogger(__name__)

R_MINUS = np.diag([1.0, -1.0]).astype(np.complex128)


def _fail(msg: str, reason: str) -> NoReturn:
    logger.error(msg)
    raise StructureViolation(msg, reason)


def _csr(A) -> sparse.csr_array:
    return sparse.csr_array(A, dtype=np.complex128)


def _exact(q: complex) -> QEntry:
    snapped = snap_root_of_unity(q)
    return QEntry.exact(q) if snapped is None else QEntry.exact(q, *snapped)


def _unimodular(w: complex, tol: Tol) -> bool:
    return abs(abs(w) - 1.0) <= tol.bound(1.0)


def _close(x: complex, y: complex, tol: Tol) -> bool:
    return abs(x - y) <= np.sqrt(tol.bound(1.0))


def lattice_family(signature: Sequence[tuple[complex, int]]) -> QFamily:
    """
    Relations of operators ``R~_a^x U~^y`` on a common ring, given as ``(alpha, y)`` per member.

    With ``R~_alpha U~ = alpha U~ R~_alpha`` the constant of a pair is ``alpha_i^y_j / alpha_j^y_i``.
    """
    fam = QFamily(len(signature))
    for i, (ai, yi) in enumerate(signature):
        for j in range(i + 1, len(signature)):
            aj, yj = signature[j]
            fam.put(i, j, _exact(ai**yj / aj**yi))
    return fam


def assigned_family(assign: Sequence[int], base_q: QFamily) -> QFamily:
    """
    Relations of members that each act as one operator of a base certificate.
    """
    fam = QFamily(len(assign))
    for i, a in enumerate(assign):
        for j in range(i + 1, len(assign)):
            b = assign[j]
            fam.put(i, j, _exact(1.0) if a == b else base_q.get(a, b))
    return fam


def ring_config(cfg: TruncationConfig, twists: Sequence[complex]) -> TruncationConfig:
    """
    Ring at degree ``cfg.N`` that is at least ``cfg.M`` sites long and closes every twist.

    Cyclic requests are rounded up to a multiple of the orders of the twists; a twist that is not
    a root of unity turns the request into a Windowed ring.
    """
    orders: list[int | None] = []
    for q in twists:
        snapped = snap_root_of_unity(q)
        if snapped is None and cfg.mode == DilationMode.CYCLIC:
            logger.warning(f"Twist {q:.6g} is not a root of unity, using a windowed ring")
        orders.append(None if snapped is None else snapped[1])
    return TruncationConfig.for_degree(cfg.N, orders, cfg.mode, max(cfg.M, cfg.N + RING_MARGIN))


def _check_base_relations(base: Sequence[sparse.csr_array], q_out: QFamily, edge: np.ndarray | None, tol: Tol):
    d0 = base[0].shape[0] if base else 0
    mask = np.ones(d0, dtype=bool)
    if edge is not None:
        mask[edge] = False
    window = np.flatnonzero(mask)
    for i, j in q_out.pairs():
        entry = q_out.get(i, j)
        if not entry.is_exact or base[i] is base[j]:
            continue
        q = entry.constant()
        diff = _csr(base[i] @ base[j] - q * (base[j] @ base[i]))[window][:, window]
        residual = float(splinalg.norm(diff))
        if residual > residual_threshold(tol):
            _fail(f"Base operators {i} and {j} break q={q:.6g} by {residual:.3e}", "base-relation")


def scalar_tensor_lift(
    weights: Sequence[complex],
    base: Sequence,
    V0: Mat,
    q_out: QFamily,
    cfg: TruncationConfig,
    edge: np.ndarray | None = None,
    tol: Tol = DEFAULT_TOL,
) -> DilationCertificate:
    """
    Lift the tuple ``(w_i B_i)`` to unitaries on ``ring_1 (x) ... (x) ring_L (x) K0``.

    Every weight that is not unimodular gets its own tensor leg carrying the scalar ring of
    ``w_i`` and acts as ``u_i (x) B_i``; a unimodular weight multiplies its base operator
    directly. Factors on distinct legs commute, so the lift keeps the relations of the base and
    its compressions are ``prod w_i^s_i`` times the base compressions for ``s_i <= cfg.N``.
    A zero weight gets the cyclic shift.

    Args:
        weights: One scalar per member, ``|w_i| <= 1``.
        base: Unitary ``B_i`` on ``K0`` per member; members may share an operator.
        V0: Isometry into ``K0``.
        q_out: Relations the base operators satisfy on the window.
        cfg: Truncation of the base; its degree sets the length of the scalar rings.
        edge: Indices of ``K0`` excluded from the relation window.

    Raises:
        DimensionError: Lengths disagree or the lift exceeds the dimension cap.
        ContractionError: A weight has modulus above one.
        StructureViolation: Two base operators break their relation in ``q_out``.
    """
    k = len(weights)
    if len(base) != k or q_out.k != k:
        logger.error(f"Lift of {k} weights over {len(base)} operators and a family of {q_out.k}")
        raise DimensionError(f"Lift of {k} weights over {len(base)} operators and a family of {q_out.k}")
    d0 = V0.shape[0]
    ops = [_csr(B) for B in base]
    # keep shared operators shared
    for i in range(k):
        for j in range(i):
            if base[i] is base[j]:
                ops[i] = ops[j]
                break
    for i, B in enumerate(ops):
        if B.shape != (d0, d0):
            logger.error(f"Base operator {i} has shape {B.shape}, expected {(d0, d0)}")
            raise DimensionError(f"Base operator {i} has shape {B.shape}, expected {(d0, d0)}")
    for i, w in enumerate(weights):
        if abs(w) > 1.0 + tol.bound(1.0):
            logger.error(f"Weight {i} has modulus {abs(w):.6g}")
            raise ContractionError(f"Weight {i} has modulus {abs(w):.6g}", abs(w))
    _check_base_relations(ops, q_out, edge, tol)

    legs = [i for i, w in enumerate(weights) if not _unimodular(w, tol)]
    rings = [scalar_ring(weights[i], cfg.N, tol) for i in legs]
    sizes = [ring.shape[0] for ring in rings]
    legsize = math.prod(sizes)
    check_dimension(legsize * d0)

    U = []
    for i, B in enumerate(ops):
        if i in legs:
            pos = legs.index(i)
            before = sparse.eye_array(math.prod(sizes[:pos]), dtype=np.complex128)
            after = sparse.eye_array(math.prod(sizes[pos + 1 :]), dtype=np.complex128)
            leg = sparse.kron(sparse.kron(before, rings[pos]), after)
            U.append(_csr(sparse.kron(leg, B)))
        else:
            U.append(_csr(complex(weights[i]) * sparse.kron(sparse.eye_array(legsize, dtype=np.complex128), B)))

    V = np.zeros((legsize * d0, V0.shape[1]), dtype=np.complex128)
    V[:d0] = V0
    full_edge = None
    if edge is not None and len(edge):
        full_edge = (np.arange(legsize)[:, None] * d0 + np.asarray(edge)[None, :]).ravel()
    logger.debug(f"Scalar lift with {len(legs)} legs of sizes {sizes} over a base of dimension {d0}")
    return DilationCertificate(U, V, q_out, cfg, edge=full_edge)


def _in_frame(cert: DilationCertificate, frame: Mat | None) -> DilationCertificate:
    # certificate of Q F Q^* from one of F
    if frame is not None:
        cert.V = cert.V @ adjoint(frame)
    return cert


def _adjoint_certificate(cert: DilationCertificate) -> DilationCertificate:
    """
    Certificate of the adjoint tuple. Words are compressions of reversed words, which the base
    reproduces in any order, and every relation constant is unchanged.
    """
    U = [_csr(u.conj().T) for u in cert.U]
    return DilationCertificate(
        U, cert.V, cert.q_out, cert.cfg, edge=cert.edge if cert.edge.size else None, scales=cert.scales
    )


def _lift_lattice(
    pair: DilationCertificate, members: Sequence[tuple[complex, int, int]], tol: Tol
) -> DilationCertificate:
    """
    Lift members ``w R~^x U~^y`` over the twisted pair ``(R~, U~)`` of a unitary/contraction dilation.
    """
    R_t, U_t = pair.U
    q = pair.q_out.constant(0, 1)
    ops = {
        (0, 0): _csr(sparse.eye_array(pair.dim, dtype=np.complex128)),
        (1, 0): R_t,
        (0, 1): U_t,
        (1, 1): _csr(R_t @ U_t),
    }
    weights = [w for w, _, _ in members]
    base = [ops[(x, y)] for _, x, y in members]
    q_out = lattice_family([(q**x, y) for _, x, y in members])
    edge = pair.edge if pair.edge.size else None
    return scalar_tensor_lift(weights, base, pair.V, q_out, pair.cfg, edge, tol)


def _lift_assigned(
    pair: DilationCertificate, assign: Sequence[int], weights: Sequence[complex], tol: Tol
) -> DilationCertificate:
    base = [pair.U[a] for a in assign]
    edge = pair.edge if pair.edge.size else None
    return scalar_tensor_lift(weights, base, pair.V, assigned_family(assign, pair.q_out), pair.cfg, edge, tol)


def _largest(values: dict[int, complex], tol: Tol) -> int:
    best = max(abs(v) for v in values.values())
    return min(j for j, v in values.items() if abs(v) >= best - tol.bound(best))


def _dilate_lower(canonical: CanonicalForm, cfg: TruncationConfig, tol: Tol) -> DilationCertificate:
    """
    Diagonal members ``c_i R~_alpha_i`` and lower twisted members ``w_j U~_m`` with ``m`` the
    twisted member of largest ``|e|``.
    """
    m = _largest({j: canonical.e[j] for j in canonical.eta_twist}, tol)
    alpha = canonical.alpha
    ring = ring_config(cfg, list(alpha.values()))
    Tm = canonical.form(m)

    twists: dict[int, sparse.csr_array] = {}
    U_m = None
    edge = None
    for i in canonical.eta1:
        R = np.diag([1.0, alpha[i]]).astype(np.complex128)
        pair = pair_unitary_contraction(R, Tm, alpha[i], ring, tol)
        twists[i] = pair.U[0]
        U_m = pair.U[1] if U_m is None else U_m
        if pair.edge.size:
            edge = pair.edge

    weights: list[complex] = []
    base: list[sparse.csr_array] = []
    signature: list[tuple[complex, int]] = []
    for i in range(canonical.k):
        if i in twists:
            weights.append(canonical.c[i])
            base.append(twists[i])
            signature.append((alpha[i], 0))
        else:
            weights.append(canonical.e[i] / canonical.e[m])
            base.append(U_m)
            signature.append((1.0, 1))
    logger.debug(f"Lower assembly around twisted member {m}, twists {alpha}")
    return scalar_tensor_lift(weights, base, site_embedding(2, ring.M), lattice_family(signature), ring, edge, tol)


def ordering_plan(canonical: CanonicalForm, tol: Tol = DEFAULT_TOL) -> OrderingPlan:
    """
    Group a Type-III tuple with full anti-diagonal members for sign bookkeeping.

    ``m`` is the twisted member with the largest ``|d|``; every twisted ``T_j`` is ``w_j T_m``
    or ``w_j R_-1 T_m`` with ``w_j = d_j / d_m``, according to its relation constant with ``T_m``.

    Raises:
        StructureViolation: A twisted member has a vanishing corner.
    """
    twisted = canonical.eta_twist
    if any(canonical.d[j] == 0 or canonical.e[j] == 0 for j in twisted):
        _fail("Ordering needs twisted members with both corners non-zero", "degenerate-twist")
    alpha = canonical.alpha
    scalars = [i for i in canonical.eta1 if _close(alpha[i], 1.0, tol)]
    flips = [i for i in canonical.eta1 if i not in scalars]
    m = _largest({j: canonical.d[j] for j in twisted}, tol)
    dm, em = canonical.d[m], canonical.e[m]
    same = [j for j in twisted if ((canonical.e[j] * dm) / (canonical.d[j] * em)).real > 0]
    opposite = [j for j in twisted if j not in same]
    sigma = scalars + flips + same + opposite
    i, j = len(scalars), len(scalars) + len(flips)
    bounds = (i, j, j + len(same))
    c = {idx: canonical.c[idx] for idx in canonical.eta1}
    w = {idx: canonical.d[idx] / dm for idx in twisted}
    plan = OrderingPlan(sigma, bounds, c, w, m)
    logger.debug(f"Ordering {plan!r}")
    return plan


def _dilate_anti_diagonal(canonical: CanonicalForm, cfg: TruncationConfig, tol: Tol) -> DilationCertificate:
    plan = ordering_plan(canonical, tol)
    i, j, l = plan.bounds
    ring = ring_config(cfg, [-1.0])
    pair = pair_unitary_contraction(R_MINUS, canonical.form(plan.m), -1.0, ring, tol)
    roles: dict[int, tuple[complex, int, int]] = {}
    for pos, idx in enumerate(plan.sigma):
        if pos < i:
            roles[idx] = (plan.c[idx], 0, 0)
        elif pos < j:
            roles[idx] = (plan.c[idx], 1, 0)
        elif pos < l:
            roles[idx] = (plan.w[idx], 0, 1)
        else:
            roles[idx] = (plan.w[idx], 1, 1)
    return _lift_lattice(pair, [roles[idx] for idx in range(canonical.k)], tol)


def _require_verdict(canonical: CanonicalForm, verdict: Verdict):
    if canonical.verdict != verdict:
        _fail(f"Expected {verdict.value} data, got {canonical.verdict.value}", "wrong-type")


def dilate_type1(
    canonical: CanonicalForm, cfg: TruncationConfig, frame: Mat | None = None, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    """
    Dilate a Type-I tuple.

    The twisted member ``m`` with the largest ``|e|`` is dilated on a ring, each diagonal member
    becomes ``c_i`` times the twisted diagonal of ``diag(1, alpha_i)`` and each twisted member
    ``w_j = e_j / e_m`` times the ring. Twisted members commute in the result.

    Args:
        canonical: Type-I data.
        cfg: Degree, minimal ring length and mode.
        frame: Unitary ``P`` with ``T_i = P C_i P^*``; the certificate is for ``C`` when omitted.

    Raises:
        StructureViolation: The data is not Type-I or a twisted pair hypothesis fails.
    """
    _require_verdict(canonical, Verdict.TYPE_I)
    cert = _dilate_lower(canonical, cfg, tol)
    logger.info(f"Type-I certificate of dimension {cert.dim}, {cert.cfg!r}")
    return _in_frame(cert, frame)


def dilate_type2(
    canonical: CanonicalForm, cfg: TruncationConfig, frame: Mat | None = None, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    """
    Dilate a Type-II tuple through the Type-I dilation of its adjoint.
    """
    _require_verdict(canonical, Verdict.TYPE_II)
    cert = _adjoint_certificate(_dilate_lower(canonical.adjoint(), cfg, tol))
    logger.info(f"Type-II certificate of dimension {cert.dim}, {cert.cfg!r}")
    return _in_frame(cert, frame)


def dilate_type3(
    canonical: CanonicalForm, cfg: TruncationConfig, frame: Mat | None = None, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    """
    Dilate a Type-III tuple.

    Lower-only and upper-only tuples take the Type-I and Type-II assemblies. Otherwise the base
    pair is ``(R_-1, T_m)`` with ``m`` the twisted member of largest ``|d|``, and members are
    ``c_i``, ``c_i R~``, ``w_j U~_m`` or ``w_j R~ U~_m`` following :func:`ordering_plan`.
    """
    _require_verdict(canonical, Verdict.TYPE_III)
    if canonical.lower_only:
        cert = _dilate_lower(canonical, cfg, tol)
    elif canonical.upper_only:
        cert = _adjoint_certificate(_dilate_lower(canonical.adjoint(), cfg, tol))
    else:
        cert = _dilate_anti_diagonal(canonical, cfg, tol)
    logger.info(f"Type-III certificate of dimension {cert.dim}, {cert.cfg!r}")
    return _in_frame(cert, frame)


def _pairwise_commuting(T: Sequence[Mat], tol: Tol) -> bool:
    return all(
        operator_norm(T[i] @ T[j] - T[j] @ T[i]) <= 10 * tol.bound(1.0)
        for i in range(len(T))
        for j in range(i + 1, len(T))
    )


def dilate_commuting_normal(T: Sequence[Mat], cfg: TruncationConfig, tol: Tol = DEFAULT_TOL) -> DilationCertificate:
    """
    Dilate commuting normal contractions channel by channel in a common eigenbasis.

    Raises:
        StructureViolation: A member is not normal or two members do not commute.
    """
    check_tuple_shapes(T, 2)
    for i, Ti in enumerate(T):
        require_contraction(Ti, tol)
        if not is_normal(Ti, tol):
            _fail(f"Member {i} is not normal", "not-normal")
    if not _pairwise_commuting(T, tol):
        _fail("Members do not commute", "not-commuting")
    distinct = [i for i, Ti in enumerate(T) if has_distinct_eigenvalues(Ti, tol)]
    Q = schur2(T[distinct[0]], tol=tol)[0] if distinct else identity(2)
    forms = [adjoint(Q) @ Ti @ Q for Ti in T]

    ring = ring_config(cfg, [])
    ones = lattice_family([(1.0, 0)] * len(T))
    unit = _csr(np.ones((1, 1)))
    channels = [
        scalar_tensor_lift([complex(F[ch, ch]) for F in forms], [unit] * len(T), np.ones((1, 1)), ones, ring, tol=tol)
        for ch in range(2)
    ]
    dims = [c.dim for c in channels]
    check_dimension(sum(dims))
    U = [_csr(sparse.block_diag([c.U[i] for c in channels], format="csr")) for i in range(len(T))]
    V = np.zeros((sum(dims), 2), dtype=np.complex128)
    V[: dims[0], 0] = channels[0].V[:, 0]
    V[dims[0] :, 1] = channels[1].V[:, 0]
    logger.info(f"Commuting normal tuple dilated in dimension {sum(dims)}")
    return DilationCertificate(U, V @ adjoint(Q), ones, ring)


def reinsert_zeros(
    cert: DilationCertificate, zeros: Sequence[int], k: int, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    """
    Certificate of the full ``k``-tuple from one of its non-zero members.

    Each zero member acts as the cyclic shift on its own leg; the others keep their operators.
    Zero members commute with everything.
    """
    if not zeros:
        return cert
    kept = [i for i in range(k) if i not in zeros]
    lookup = {i: a for a, i in enumerate(kept)}
    eye = _csr(sparse.eye_array(cert.dim, dtype=np.complex128))
    q_out = QFamily(k)
    for i in range(k):
        for j in range(i + 1, k):
            if i in zeros or j in zeros:
                q_out.put(i, j, _exact(1.0))
            else:
                q_out.put(i, j, cert.q_out.get(lookup[i], lookup[j]))
    weights = [0.0 if i in zeros else 1.0 for i in range(k)]
    base = [eye if i in zeros else cert.U[lookup[i]] for i in range(k)]
    edge = cert.edge if cert.edge.size else None
    lifted = scalar_tensor_lift(weights, base, cert.V, q_out, cert.cfg, edge, tol)
    lifted.scales = [1.0 + 0j if i in zeros else cert.scales[lookup[i]] for i in range(k)]
    lifted.similarity = cert.similarity
    logger.debug(f"Reinserted zero members {tuple(zeros)}")
    return lifted


def _dilate_aligned(T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol) -> DilationCertificate:
    # every member is a multiple of the lead form
    lead = red.roles[0]
    ring = ring_config(cfg, [])
    U = schaffer_ring(red.forms[lead], ring.M, tol)
    weights = [red.weights.get(j, 1.0 if j == lead else 0.0) for j in range(len(T))]
    ones = lattice_family([(1.0, 1)] * len(T))
    cert = scalar_tensor_lift(weights, [U] * len(T), site_embedding(2, ring.M), ones, ring, tol=tol)
    return _in_frame(cert, red.frame)


def _dilate_nilpotent(T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol) -> DilationCertificate:
    assert red.pivot_pair is not None
    n, m = red.pivot_pair
    c_m, d_m = red.scalars["c_m"], red.scalars["d_m"]
    if abs(d_m) <= 10 * tol.bound(1.0):
        # T_m = c_m R_-1 in the frame
        pair = pair_unitary_contraction(R_MINUS, red.forms[n], -1.0, ring_config(cfg, [-1.0]), tol)
        members = [(c_m, 1, 0) if j == m else (red.weights[j], 0, 1) for j in range(len(T))]
        return _in_frame(_lift_lattice(pair, members, tol), red.frame)
    pair = dilate_pair(T[n], T[m], -1.0, cfg, tol=tol)
    assign = [1 if j == m else 0 for j in range(len(T))]
    weights = [1.0 if j == m else red.weights[j] for j in range(len(T))]
    return _lift_assigned(pair, assign, weights, tol)


def _dilate_noninvertible(
    T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol
) -> DilationCertificate:
    assert red.pivot_pair is not None
    one, m = red.pivot_pair
    if abs(red.scalars["d1"]) <= 10 * tol.bound(1.0):
        # every member is diagonal in the frame
        return dilate_commuting_normal(T, cfg, tol)
    pair = dilate_pair(T[one], T[m], -1.0, cfg, tol=tol)
    assign = [0 if j == one else 1 for j in range(len(T))]
    weights = [1.0 if j == one else red.weights[j] for j in range(len(T))]
    return _lift_assigned(pair, assign, weights, tol)


def _dilate_normal_triple(
    T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol
) -> DilationCertificate:
    i1, i2, i3 = red.roles
    pair = pair_unitary_contraction(R_MINUS, red.forms[i3], -1.0, ring_config(cfg, [-1.0]), tol)
    # T2 = lambda T3 R_-1 = -lambda R_-1 T3
    members = {i1: (red.scalars["a1"], 1, 0), i2: (-red.scalars["lambda"], 1, 1), i3: (1.0 + 0j, 0, 1)}
    return _in_frame(_lift_lattice(pair, [members[j] for j in range(3)], tol), red.frame)


def _dilate_general_triple(
    T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol
) -> DilationCertificate:
    beta = complex(red.scalars["beta"])
    pair = dilate_pair(T[1], T[2], -1.0, cfg, reach=2, tol=tol)
    U2, U3 = pair.U
    absorbed = abs(beta) <= 1.0 + tol.bound(1.0)
    weights = [beta if absorbed else 1.0 + 0j, 1.0 + 0j, 1.0 + 0j]
    q_out = QFamily(3, {(0, 1): _exact(-1.0), (0, 2): _exact(-1.0), (1, 2): _exact(-1.0)})
    edge = pair.edge if pair.edge.size else None
    cert = scalar_tensor_lift(weights, [_csr(U2 @ U3), U2, U3], pair.V, q_out, pair.cfg, edge, tol)
    if not absorbed:
        cert.scales = [beta, 1.0 + 0j, 1.0 + 0j]
        logger.info(f"|beta| = {abs(beta):.6g} > 1, certificate emitted with the first member scaled")
    return cert


def _dilate_invertible_pair(
    T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol
) -> DilationCertificate:
    if len(T) == 1:
        return schaffer(T[0], ring_config(cfg, []), tol)
    assert red.pivot_pair is not None
    i1, other = red.pivot_pair
    if "a1" in red.scalars:
        pair = pair_unitary_contraction(R_MINUS, red.forms[other], -1.0, ring_config(cfg, [-1.0]), tol)
        members = {i1: (red.scalars["a1"], 1, 0), other: (1.0 + 0j, 0, 1)}
        return _in_frame(_lift_lattice(pair, [members[0], members[1]], tol), red.frame)
    return dilate_pair(T[0], T[1], -1.0, cfg, tol=tol)


_ANTI_ASSEMBLIES: dict[AntiKind, Callable[..., DilationCertificate]] = {
    AntiKind.COMMUTING: _dilate_aligned,
    AntiKind.NILPOTENT: _dilate_nilpotent,
    AntiKind.NON_INVERTIBLE: _dilate_noninvertible,
    AntiKind.NORMAL_TRIPLE: _dilate_normal_triple,
    AntiKind.GENERAL_TRIPLE: _dilate_general_triple,
    AntiKind.INVERTIBLE_PAIR: _dilate_invertible_pair,
}


def dilate_reduction(
    T: Sequence[Mat], red: AntiReduction, cfg: TruncationConfig, tol: Tol = DEFAULT_TOL
) -> DilationCertificate:
    cert = _ANTI_ASSEMBLIES[red.kind](T, red, cfg, tol)
    logger.info(f"Anti-commuting tuple ({red.kind.value}) dilated in dimension {cert.dim}, {cert.cfg!r}")
    return cert


def dilate_anti(T: Sequence[Mat], cfg: TruncationConfig, tol: Tol = DEFAULT_TOL) -> DilationCertificate:
    """
    Dilate an anti-commuting tuple of 2x2 contractions.

    The tuple is reduced by :func:`qdilate.anti.reduce_anti` and assembled from one pair dilation:

    - nilpotent or singular members: the pivot pair, the remaining members as weighted copies,
    - a normal invertible member: the twisted pair ``(R_-1, T_3)``,
    - a general invertible triple: the q-Ando pair of ``(T_2, T_3)`` with ``U_1 = U_2 U_3``, where
      ``beta`` is absorbed as a weight when ``|beta| <= 1`` and kept as the scale of the first
      member otherwise.

    Raises:
        StructureViolation: The tuple does not anti-commute.
        BoundViolation: More than three invertible members.
    """
    return dilate_reduction(T, reduce_anti(T, tol), cfg, tol)


def _scaled(canonical: CanonicalForm, factor: float) -> CanonicalForm:
    return type(canonical)(
        canonical.k,
        canonical.pivot,
        canonical.a / factor,
        canonical.r,
        canonical.eta1,
        canonical.eta_twist,
        {i: v / factor for i, v in canonical.c.items()},
        {i: v / factor for i, v in canonical.f.items()},
        {j: v / factor for j, v in canonical.d.items()},
        {j: v / factor for j, v in canonical.e.items()},
    )


def _is_anti(q: QFamily, tol: Tol) -> bool:
    values = q.values()
    return bool(values) and all(_close(v, -1.0, tol) for v in values)


_TYPE_ASSEMBLIES: dict[Verdict, tuple[Route, Callable[..., DilationCertificate]]] = {
    Verdict.TYPE_I: (Route.TYPE_I, dilate_type1),
    Verdict.TYPE_II: (Route.TYPE_II, dilate_type2),
    Verdict.TYPE_III: (Route.TYPE_III, dilate_type3),
}


def _all_zero(k: int, cfg: TruncationConfig, tol: Tol) -> DilationCertificate:
    eye = _csr(sparse.eye_array(2, dtype=np.complex128))
    ones = lattice_family([(1.0, 0)] * k)
    return scalar_tensor_lift([0.0] * k, [eye] * k, identity(2), ones, ring_config(cfg, []), tol=tol)


def dilate_general(
    T: Sequence[Mat], cfg: TruncationConfig, tol: Tol = DEFAULT_TOL, verify: bool = True
) -> DilationOutcome:
    """
    Dilate any q-commuting tuple of 2x2 contractions the pipeline can certify.

    Zero members are stripped and reinserted at the end. Type-I/II/III tuples in a unitary
    canonical basis take their assembly directly; anti-commuting tuples go through
    :func:`dilate_anti`; the remaining Type tuples are dilated in the canonical basis scaled by
    ``beta = ||P^-1|| ||P||`` and certified against ``P^-1 T P`` with every member scaled by
    ``beta``. Commuting tuples are certified when they are normal and otherwise returned without
    a certificate.

    The columns of ``P`` are the unit eigenvectors of the pivot, so ``beta`` is the condition
    number of that normalized basis: eigenvectors ``e1`` and ``(1, 1)`` give
    ``P = [[1, 1/sqrt(2)], [0, 1/sqrt(2)]]`` and ``beta = 1 + sqrt(2)``, not the golden-ratio square
    of the unnormalized ``[[1, 1], [0, 1]]``.

    Args:
        verify (bool, optional): Attach the oracle report to the certificate.

    Raises:
        DimensionError: Members are not 2x2 or the certificate would exceed the dimension cap.
        ContractionError: A member is not a contraction.
        NotQCommutingError: Some pair is not q-commuting.
        StructureViolation: The forms forced by the relations are not met.
    """
    k = len(T)
    check_tuple_shapes(T, 2)
    for Ti in T:
        require_contraction(Ti, tol)
    q_full = detect_family(T, tol)
    reduced, q, zeros = strip_zeros(T, q_full, tol)

    classification = None
    anti = None
    note = ""
    if not reduced:
        cert = _all_zero(k, cfg, tol)
        zeros = ()
        route = Route.COMMUTING_NORMAL
        note = "all members are zero"
    else:
        assert q is not None
        classification = classify(reduced, q, tol)
        verdict = classification.verdict
        canonical = classification.canonical
        if canonical is not None and classification.unitarily_equivalent:
            route, assemble = _TYPE_ASSEMBLIES[verdict]
            cert = assemble(canonical, cfg, classification.P, tol)
        elif _is_anti(q, tol):
            anti = reduce_anti(reduced, tol)
            cert = dilate_reduction(reduced, anti, cfg, tol)
            route = Route.ANTI
            note = anti.kind.value
        elif canonical is not None:
            plan = SimilarityPlan(classification.P)
            _, assemble = _TYPE_ASSEMBLIES[verdict]
            cert = assemble(_scaled(canonical, plan.beta), cfg, None, tol)
            cert.scales = [complex(plan.beta)] * len(reduced)
            cert.similarity = plan
            route = Route.SIMILARITY
            note = f"{verdict.value}, beta={plan.beta:.6g}"
            logger.info(f"Non-unitary canonical basis, dilating with beta={plan.beta:.6g}")
        elif all(is_normal(Ti, tol) for Ti in reduced) and _pairwise_commuting(reduced, tol):
            cert = dilate_commuting_normal(reduced, cfg, tol)
            route = Route.COMMUTING_NORMAL
        else:
            logger.info("Commuting tuple without a normal structure, no certificate")
            return DilationOutcome(
                Route.COMMUTING_UNCERTIFIED, None, classification, note="Commuting (Holbrook)"
            )

    cert = reinsert_zeros(cert, zeros, k, tol)
    cert.q_in = q_full
    if verify:
        cert.report = verify_certificate(T, cert, tol=tol)
    logger.info(f"Tuple dilated along route {route.value}: {cert!r}")
    return DilationOutcome(route, cert, classification, anti, note)
