import cmath
import logging
from collections.abc import Sequence
from typing import NoReturn

import numpy as np

from .enums import Verdict
from .exceptions import StructureViolation
from .matcore import (
    DEFAULT_TOL,
    adjoint,
    eig2,
    has_distinct_eigenvalues,
    identity,
    is_diagonalizable2,
    is_scalar,
    operator_norm,
    require_contraction,
)
from .qrel import check_tuple_shapes
from .schemas import (
    CanonicalForm,
    CanonicalTypeI,
    CanonicalTypeII,
    CanonicalTypeIII,
    ClassificationReport,
    DiagPartition,
    Mat,
    QFamily,
    Tol,
)

logger = logging.getLogger(__name__)


def _close(x: complex, y: complex, tol: Tol) -> bool:
    return abs(x - y) <= np.sqrt(tol.bound(1.0))


def _fail(msg: str, reason: str) -> NoReturn:
    logger.error(msg)
    raise StructureViolation(msg, reason)


def partition_diag(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> DiagPartition:
    check_tuple_shapes(T, 2)
    lambda1 = tuple(i for i, Ti in enumerate(T) if is_diagonalizable2(Ti, tol))
    lambda2 = tuple(i for i in range(len(T)) if i not in lambda1)
    logger.debug(f"Diagonalizable members {lambda1}, non-diagonalizable {lambda2}")
    return DiagPartition(lambda1, lambda2)


def strip_zeros(
    T: Sequence[Mat], q: QFamily | None = None, tol: Tol = DEFAULT_TOL
) -> tuple[list[Mat], QFamily | None, tuple[int, ...]]:
    """
    Remove zero members.

    Returns:
        The non-zero members in their original order, the relation family restricted to them
        (when ``q`` was given), and the positions of the removed members for later reinsertion.
    """
    zeros = tuple(i for i, Ti in enumerate(T) if operator_norm(Ti) <= tol.bound(0.0))
    kept = [i for i in range(len(T)) if i not in zeros]
    if zeros:
        logger.debug(f"Stripped zero members at positions {zeros}")
    reduced_q = None if q is None else q.reindexed(kept)
    return [T[i] for i in kept], reduced_q, zeros


def commuting_by_spectrum(T: Sequence[Mat], q: QFamily | None = None, tol: Tol = DEFAULT_TOL) -> bool:
    """
    A q-commuting tuple none of whose members has two distinct eigenvalues is commuting.
    """
    return all(not has_distinct_eigenvalues(Ti, tol) for Ti in T)


def _ordered_eigenpairs(M: Mat, tol: Tol):
    # the lexicographically larger eigenvalue plays "a"
    low, high = eig2(M, tol)
    return high, low


def _pivot_candidates(T: Sequence[Mat], lambda1: Sequence[int], tol: Tol) -> dict[int, complex]:
    out = {}
    for i in lambda1:
        a, b = _ordered_eigenpairs(T[i], tol)
        out[i] = b.value / a.value
    return out


def _choose_pivot(ratios: dict[int, complex], tol: Tol) -> int:
    """
    Prefer ratios other than -1; among those the largest ``|arg r|``; ties go to the lowest index.
    """
    twisted = {i: r for i, r in ratios.items() if not _close(r, -1.0, tol)}
    pool = twisted or ratios
    best = max(abs(cmath.phase(r)) for r in pool.values())
    return min(i for i, r in pool.items() if abs(cmath.phase(r)) >= best - np.sqrt(tol.bound(1.0)))


def _commuting(reason: str, partition: DiagPartition, q: QFamily | None) -> ClassificationReport:
    logger.info(f"Tuple is commuting ({reason})")
    return ClassificationReport(Verdict.COMMUTING, identity(2), None, False, [reason], partition, q)


def _canonical_basis(T1: Mat, tol: Tol) -> tuple[Mat, complex, complex, bool]:
    a, b = _ordered_eigenpairs(T1, tol)
    va, vb = a.vector, b.vector
    overlap = abs(np.vdot(va, vb))
    unitary = bool(overlap <= np.sqrt(tol.bound(1.0)))
    if unitary:
        vb = vb - np.vdot(va, vb) * va
        vb = vb / np.linalg.norm(vb)
    P = np.column_stack([va, vb])
    logger.debug(f"Pivot eigenvector overlap {overlap:.3e}, unitary basis: {unitary}")
    return P, a.value, b.value, unitary


def classify(T: Sequence[Mat], q: QFamily, tol: Tol = DEFAULT_TOL) -> ClassificationReport:
    """
    Classify a q-commuting tuple of non-zero 2x2 contractions.

    The verdict is Commuting when every member is non-diagonalizable, when every diagonalizable
    member is a scalar map, when some diagonalizable member has eigenvalues of different moduli,
    or when no member twists against the pivot. Otherwise a pivot is chosen among the non-scalar
    diagonalizable members (ratios other than -1 first, then largest ``|arg r|``, then lowest
    index), ``P`` is built from its eigenvectors and every other member is placed by its relation
    constant with the pivot: ``1`` makes it diagonal, ``r`` lower triangular (Type-I), ``conj(r)``
    upper triangular (Type-II); when ``r = -1`` the twisted members are anti-diagonal (Type-III).

    Raises:
        DimensionError: Members are not 2x2.
        ContractionError: Some member is not a contraction.
        StructureViolation: A zero member, or relation constants inconsistent with any canonical type.
    """
    check_tuple_shapes(T, 2)
    for i, Ti in enumerate(T):
        require_contraction(Ti, tol)
        if operator_norm(Ti) <= tol.bound(0.0):
            _fail(f"Member {i} is zero, strip zeros before classifying", "zero-member")

    partition = partition_diag(T, tol)
    if not partition.lambda1:
        return _commuting("all-non-diagonalizable", partition, q)

    non_scalar = [i for i in partition.lambda1 if not is_scalar(T[i], tol)]
    if not non_scalar:
        return _commuting("diagonalizable-members-scalar", partition, q)

    for i in non_scalar:
        a, b = _ordered_eigenpairs(T[i], tol)
        if abs(abs(a.value) - abs(b.value)) > tol.bound(max(abs(a.value), abs(b.value))):
            return _commuting("unequal-eigenvalue-moduli", partition, q)

    if commuting_by_spectrum(T, q, tol):
        return _commuting("no-distinct-eigenvalues", partition, q)

    ratios = _pivot_candidates(T, non_scalar, tol)
    pivot = _choose_pivot(ratios, tol)
    P, a, b, unitary = _canonical_basis(T[pivot], tol)
    r = b / a
    P_inv = adjoint(P) if unitary else np.linalg.inv(P)
    logger.debug(f"Pivot {pivot} with a={a:.6g}, r={r:.6g}")

    type3 = _close(r, -1.0, tol)
    if type3:
        r = -1.0 + 0j

    c: dict[int, complex] = {}
    f: dict[int, complex] = {}
    d: dict[int, complex] = {}
    e: dict[int, complex] = {}
    lower: list[int] = []
    upper: list[int] = []

    for j, Tj in enumerate(T):
        C = P_inv @ Tj @ P
        scale = operator_norm(Tj)
        floor = tol.bound(scale) * 10
        qj = 1.0 + 0j if j == pivot else q.constant(pivot, j, default=0.0)

        if _close(qj, 1.0, tol):
            if abs(C[0, 1]) > floor or abs(C[1, 0]) > floor:
                _fail(f"Member {j} commutes with the pivot but is not diagonal in its eigenbasis", "not-diagonal")
            c[j], f[j] = complex(C[0, 0]), complex(C[1, 1])
        elif type3 and _close(qj, -1.0, tol):
            if abs(C[0, 0]) > floor or abs(C[1, 1]) > floor:
                _fail(f"Member {j} anti-commutes with the pivot but is not anti-diagonal", "not-anti-diagonal")
            d[j] = complex(C[0, 1]) if abs(C[0, 1]) > floor else 0j
            e[j] = complex(C[1, 0]) if abs(C[1, 0]) > floor else 0j
        elif not type3 and _close(qj, r, tol):
            if abs(C[0, 0]) > floor or abs(C[1, 1]) > floor or abs(C[0, 1]) > floor:
                _fail(f"Member {j} is not strictly lower triangular in the pivot basis", "not-lower")
            d[j], e[j] = 0j, complex(C[1, 0])
            lower.append(j)
        elif not type3 and _close(qj, np.conj(r), tol):
            if abs(C[0, 0]) > floor or abs(C[1, 1]) > floor or abs(C[1, 0]) > floor:
                _fail(f"Member {j} is not strictly upper triangular in the pivot basis", "not-upper")
            d[j], e[j] = complex(C[0, 1]), 0j
            upper.append(j)
        else:
            _fail(f"Relation constant {qj:.6g} of member {j} with the pivot admits only the zero matrix", "bad-q")

    eta1 = tuple(sorted(c))
    eta_twist = tuple(sorted(d))
    if not eta_twist:
        return _commuting("trivial-twist", partition, q)

    canonical: CanonicalForm
    reason = [f"pivot={pivot}"]
    if type3:
        if any(e[j] == 0 for j in eta_twist) and any(e[j] != 0 for j in eta_twist):
            _fail("Twisted members mix zero and non-zero lower entries", "mixed-e")
        if any(d[j] == 0 for j in eta_twist) and any(d[j] != 0 for j in eta_twist):
            _fail("Twisted members mix zero and non-zero upper entries", "mixed-d")
        full = all(d[j] != 0 and e[j] != 0 for j in eta_twist)
        if full:
            for i in eta1:
                if not (_close(f[i] / c[i], 1.0, tol) or _close(f[i] / c[i], -1.0, tol)):
                    _fail(f"Diagonal member {i} has twist {f[i] / c[i]:.6g} outside {{1, -1}}", "alpha")
        verdict = Verdict.TYPE_III
        canonical = CanonicalTypeIII(len(T), pivot, a, r, eta1, eta_twist, c, f, d, e)
        reason.append("case-c")
        if canonical.lower_only:
            reason.append("lower-only")
        elif canonical.upper_only:
            reason.append("upper-only")
    else:
        if lower and upper:
            _fail("Both r and conj(r) twists are present", "both-twists")
        verdict = Verdict.TYPE_I if lower else Verdict.TYPE_II
        cls = CanonicalTypeI if lower else CanonicalTypeII
        canonical = cls(len(T), pivot, a, r, eta1, eta_twist, c, f, d, e)
        reason.append("case-a")

    logger.info(f"Tuple classified as {verdict.value}, pivot {pivot}, r={r:.6g}, unitary basis {unitary}")
    return ClassificationReport(verdict, P, canonical, unitary, reason, partition, q)
