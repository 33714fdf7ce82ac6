import cmath
import logging
import math
from collections.abc import Sequence

import numpy as np
import scipy.linalg

from .exceptions import DimensionError, NotQCommutingError
from .matcore import DEFAULT_TOL, adjoint, frobenius, identity, operator_norm, require_square
from .schemas import Mat, QEntry, QFamily, Tol

logger = logging.getLogger(__name__)

SNAP_THRESHOLD = 1e-7
MAX_ROOT_ORDER = 64


def snap_root_of_unity(q: complex) -> tuple[complex, int] | None:
    """
    Nearest ``exp(2 pi i p / s)`` with ``s <= 64`` within ``1e-7`` of ``q``; the smallest order wins.
    """
    angle = cmath.phase(q)
    for s in range(1, MAX_ROOT_ORDER + 1):
        p = round(angle * s / (2 * math.pi)) % s
        root = cmath.exp(2j * math.pi * p / s)
        if abs(q - root) <= SNAP_THRESHOLD:
            return root, s
    return None


def _is_zero_product(P: Mat, Ti: Mat, Tj: Mat, tol: Tol) -> bool:
    return frobenius(P) <= tol.bound(frobenius(Ti) * frobenius(Tj))


def _fit_ratio(A: Mat, B: Mat, tol: Tol) -> complex | None:
    """
    Unimodular ``q`` with ``A = q B``, or ``None`` when no such constant fits.
    """
    nb = frobenius(B)
    if nb == 0.0:
        return None
    q = complex(np.vdot(B, A) / nb**2)
    bound = tol.bound(max(frobenius(A), 1.0))
    if frobenius(A - q * B) > bound:
        return None
    if abs(abs(q) - 1.0) * nb > bound:
        return None
    return q


def detect_q(Ti: Mat, Tj: Mat, tol: Tol = DEFAULT_TOL) -> QEntry:
    """
    Relation constant of the pair: ``Ti Tj = q Tj Ti``.

    Both products below the zero floor give an Unconstrained entry. Otherwise ``q`` is the
    Frobenius inner-product ratio ``<Tj Ti, Ti Tj> / ||Tj Ti||^2``, accepted when the residual
    and the distance of ``|q|`` from 1 are within tolerance, and snapped to a nearby root of unity.

    Raises:
        DimensionError: The matrices are not square of equal size.
        NotQCommutingError: No unimodular constant fits.
    """
    n = require_square(Ti)
    require_square(Tj, n)
    A = Ti @ Tj
    B = Tj @ Ti
    zero_a = _is_zero_product(A, Ti, Tj, tol)
    zero_b = _is_zero_product(B, Ti, Tj, tol)
    if zero_a and zero_b:
        logger.debug("Both products vanish, pair is unconstrained")
        return QEntry.unconstrained()
    q = None if (zero_a or zero_b) else _fit_ratio(A, B, tol)
    if q is None:
        logger.error("Pair is not q-commuting for any unimodular q")
        raise NotQCommutingError("Pair is not q-commuting for any unimodular q", (0, 1))
    snapped = snap_root_of_unity(q)
    if snapped is None:
        logger.debug(f"Detected q={q:.12g}, no root of unity nearby")
        return QEntry.exact(q)
    root, order = snapped
    logger.debug(f"Detected q={q:.12g}, snapped to a root of unity of order {order}")
    return QEntry.exact(q, root, order)


def detect_family(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> QFamily:
    """
    Pairwise relation constants of a tuple.

    Raises:
        DimensionError: Members are not square of a common size.
        NotQCommutingError: Some pair has no fit; ``pair`` names it.
    """
    if T:
        n = require_square(T[0])
        for Ti in T[1:]:
            require_square(Ti, n)
    family = QFamily(len(T))
    for i in range(len(T)):
        for j in range(i + 1, len(T)):
            try:
                family.put(i, j, detect_q(T[i], T[j], tol))
            except NotQCommutingError as exc:
                raise NotQCommutingError(f"Members {i} and {j} are not q-commuting", (i, j)) from exc
    logger.info(f"Detected relation family for {len(T)} members: {family!r}")
    return family


def commutator_residual(Ti: Mat, Tj: Mat, q: complex) -> float:
    """
    ``||Ti Tj - q Tj Ti||`` (spectral norm).
    """
    return operator_norm(Ti @ Tj - q * (Tj @ Ti))


def adjoint_tuple(T: Sequence[Mat]) -> list[Mat]:
    return [adjoint(Ti) for Ti in T]


def is_doubly_q(T: Sequence[Mat], q: QFamily, tol: Tol = DEFAULT_TOL) -> dict[tuple[int, int], bool]:
    """
    Per pair ``i < j``, whether ``Ti Tj^* = conj(q_ij) Tj^* Ti`` holds as well.

    Unconstrained pairs have no prescribed constant; for them any unimodular fit of
    ``(Ti Tj^*, Tj^* Ti)`` (or both products vanishing) counts.
    """
    out: dict[tuple[int, int], bool] = {}
    for i, j in q.pairs():
        A = T[i] @ adjoint(T[j])
        B = adjoint(T[j]) @ T[i]
        entry = q.get(i, j)
        if entry.is_exact:
            scale = max(operator_norm(T[i]) * operator_norm(T[j]), 1.0)
            out[(i, j)] = operator_norm(A - np.conj(entry.constant()) * B) <= tol.bound(scale)
        elif _is_zero_product(A, T[i], T[j], tol) and _is_zero_product(B, T[i], T[j], tol):
            out[(i, j)] = True
        else:
            out[(i, j)] = _fit_ratio(A, B, tol) is not None
    return out


def check_row_contraction(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> bool:
    """
    Whether ``sum_i Ti^* Ti <= I``, i.e. the smallest eigenvalue of ``I - sum Ti^* Ti`` is at least ``-tol``.
    """
    if not T:
        return True
    n = T[0].shape[1]
    S = identity(n) - sum((adjoint(Ti) @ Ti for Ti in T), np.zeros((n, n), dtype=np.complex128))
    lowest = float(scipy.linalg.eigvalsh((S + adjoint(S)) / 2)[0])
    logger.debug(f"Row contraction margin {lowest:.3e}")
    return lowest >= -tol.bound(1.0)


def check_tuple_shapes(T: Sequence[Mat], size: int | None = None) -> int:
    if not T:
        logger.error("Empty tuple")
        raise DimensionError("Empty tuple")
    n = require_square(T[0], size)
    for Ti in T[1:]:
        require_square(Ti, n)
    return n
