import logging
from collections.abc import Sequence
from typing import NoReturn

import numpy as np
import scipy.linalg

from .enums import AntiKind
from .exceptions import BoundViolation, DimensionError, StructureViolation
from .matcore import DEFAULT_TOL, adjoint, eig2, is_normal, operator_norm, schur2
from .qrel import check_tuple_shapes
from .schemas import AntiReduction, Mat, Tol

logger = logging.getLogger(__name__)

# Invertible pairwise anti-commuting 2x2 families have at most this many members.
MAX_INVERTIBLE = 3

GEN_RADIUS = (0.2, 1.0)
GEN_RETRIES = 100


def _fail(msg: str, reason: str) -> NoReturn:
    logger.error(msg)
    raise StructureViolation(msg, reason)


def theta(n: int) -> int:
    """
    Sign exponent of ``(AB)^n = (-1)^theta(n) A^n B^n`` for anti-commuting ``A, B``.
    """
    return n * (n - 1) // 2


def check_theta_identity(A: Mat, B: Mat, n_max: int = 8) -> float:
    """
    Largest entrywise deviation of ``(AB)^n`` from ``(-1)^theta(n) A^n B^n`` over ``0 <= n <= n_max``.
    """
    worst = 0.0
    AB = A @ B
    for n in range(n_max + 1):
        lhs = np.linalg.matrix_power(AB, n)
        rhs = (-1) ** theta(n) * np.linalg.matrix_power(A, n) @ np.linalg.matrix_power(B, n)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def _scale(T: Mat) -> float:
    return max(operator_norm(T), 1e-300)


def is_invertible(T: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    return abs(np.linalg.det(T)) > tol.bound(_scale(T) ** 2)


def is_nilpotent(T: Mat, tol: Tol = DEFAULT_TOL) -> bool:
    floor = tol.bound(_scale(T))
    return abs(np.trace(T)) <= floor and abs(np.linalg.det(T)) <= tol.bound(_scale(T) ** 2)


def assert_anti(T: Sequence[Mat], tol: Tol = DEFAULT_TOL):
    """
    Check that every pair anti-commutes and that members anti-commuting with an invertible
    partner are traceless.

    Raises:
        DimensionError: Members are not 2x2.
        StructureViolation: A pair fails ``Ti Tj = -Tj Ti`` or a forced trace is non-zero.
    """
    check_tuple_shapes(T, 2)
    for i in range(len(T)):
        for j in range(i + 1, len(T)):
            residual = operator_norm(T[i] @ T[j] + T[j] @ T[i])
            if residual > tol.bound(_scale(T[i]) * _scale(T[j])):
                _fail(f"Members {i} and {j} do not anti-commute (residual {residual:.3e})", f"pair-{i}-{j}")
    if len(T) < 2:
        return
    invertible = [i for i, Ti in enumerate(T) if is_invertible(Ti, tol)]
    for j, Tj in enumerate(T):
        if any(i != j for i in invertible) and abs(np.trace(Tj)) > tol.bound(_scale(Tj)):
            _fail(f"Member {j} anti-commutes with an invertible member but has trace {np.trace(Tj):.6g}", "trace")
    logger.debug(f"Anti-commuting tuple of {len(T)} members, invertible {invertible}")


def invertible_bound_check(T: Sequence[Mat], tol: Tol = DEFAULT_TOL):
    """
    Raises:
        StructureViolation: A member is singular.
        BoundViolation: More than three invertible pairwise anti-commuting members.
    """
    for j, Tj in enumerate(T):
        if not is_invertible(Tj, tol):
            _fail(f"Member {j} is not invertible, |det| = {abs(np.linalg.det(Tj)):.3e}", "not-invertible")
    if len(T) > MAX_INVERTIBLE:
        msg = f"{len(T)} invertible anti-commuting 2x2 matrices supplied, at most {MAX_INVERTIBLE} can exist"
        logger.error(msg)
        raise BoundViolation(msg)


def reduce_nilpotent(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> AntiReduction:
    """
    Reduce an anti-commuting tuple containing a non-zero nilpotent member.

    In a Schur frame of the nilpotent member every other member is ``[[c_j, d_j], [0, -c_j]]``
    and at most one of them (``m``) has ``c_m != 0``. All the others are multiples ``w_j T_n``
    of the member ``n`` with the largest ``|d_j|``.

    Raises:
        StructureViolation: No nilpotent member, or the forced forms are not met.
    """
    nil = [i for i, Ti in enumerate(T) if operator_norm(Ti) > tol.bound(0.0) and is_nilpotent(Ti, tol)]
    if not nil:
        _fail("No non-zero nilpotent member", "no-nilpotent")
    Q, _ = schur2(T[nil[0]], first=0.0, tol=tol)
    forms = [adjoint(Q) @ Ti @ Q for Ti in T]

    c: dict[int, complex] = {}
    d: dict[int, complex] = {}
    for j, F in enumerate(forms):
        floor = 10 * tol.bound(_scale(T[j]))
        if abs(F[1, 0]) > floor or abs(F[0, 0] + F[1, 1]) > floor:
            _fail(f"Member {j} is not of the forced form [[c, d], [0, -c]]", "nilpotent-form")
        c[j] = complex(F[0, 0]) if abs(F[0, 0]) > floor else 0j
        d[j] = complex(F[0, 1])

    twisted = [j for j in c if c[j] != 0]
    if len(twisted) > 1:
        _fail(f"Members {twisted} all have a non-zero diagonal", "nilpotent-two-diagonals")

    m = twisted[0] if twisted else None
    rest = [j for j in range(len(T)) if j != m]
    best = max(abs(d[j]) for j in rest)
    n = min(j for j in rest if abs(d[j]) >= best - tol.bound(best))
    weights = {j: d[j] / d[n] for j in rest}
    scalars = {"d_n": d[n]}
    if m is None:
        logger.info(f"Nilpotent tuple with vanishing products, aligned on member {n}")
        return AntiReduction(AntiKind.COMMUTING, Q, None, weights, scalars, forms, roles=(n,))
    scalars["c_m"] = c[m]
    scalars["d_m"] = d[m]
    logger.info(f"Nilpotent reduction, pivot pair ({n}, {m})")
    return AntiReduction(AntiKind.NILPOTENT, Q, (n, m), weights, scalars, forms, roles=(n, m))


def reduce_noninvertible(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> AntiReduction:
    """
    Reduce an anti-commuting tuple containing a non-zero singular member.

    A nilpotent singular member is handed to :func:`reduce_nilpotent`. Otherwise, in a Schur
    frame with ``T_1 = [[c_1, d_1], [0, 0]]``, every other member equals ``f_j A`` with
    ``A = [[0, -d_1 / c_1], [0, 1]]``.

    Raises:
        StructureViolation: No singular member, or the forced forms are not met.
    """
    singular = [i for i, Ti in enumerate(T) if operator_norm(Ti) > tol.bound(0.0) and not is_invertible(Ti, tol)]
    if not singular:
        _fail("No non-zero singular member", "no-singular")
    one = singular[0]
    if is_nilpotent(T[one], tol):
        logger.debug(f"Singular member {one} is nilpotent")
        return reduce_nilpotent(T, tol)

    Q, S = schur2(T[one], first=complex(np.trace(T[one])), tol=tol)
    forms = [adjoint(Q) @ Ti @ Q for Ti in T]
    c1, d1 = complex(S[0, 0]), complex(S[0, 1])
    A = np.array([[0, -d1 / c1], [0, 1]], dtype=np.complex128)

    f: dict[int, complex] = {}
    for j, F in enumerate(forms):
        if j == one:
            continue
        f[j] = complex(F[1, 1])
        if operator_norm(F - f[j] * A) > 10 * tol.bound(_scale(T[j])):
            _fail(f"Member {j} is not a multiple of [[0, -d1/c1], [0, 1]]", "noninvertible-form")

    scalars = {"c1": c1, "d1": d1}
    if not f or all(abs(v) <= tol.bound(0.0) for v in f.values()):
        logger.info("Non-invertible tuple with a single non-zero member")
        return AntiReduction(AntiKind.COMMUTING, Q, None, {}, scalars, forms, roles=(one,))
    best = max(abs(v) for v in f.values())
    m = min(j for j, v in f.items() if abs(v) >= best - tol.bound(best))
    weights = {j: v / f[m] for j, v in f.items()}
    scalars["f_m"] = f[m]
    logger.info(f"Non-invertible reduction, pivot pair ({one}, {m})")
    return AntiReduction(AntiKind.NON_INVERTIBLE, Q, (one, m), weights, scalars, forms, roles=(one, m))


def _require_traceless(T: Sequence[Mat], tol: Tol):
    for j, Tj in enumerate(T):
        if abs(np.trace(Tj)) > tol.bound(_scale(Tj)):
            _fail(f"Member {j} has trace {np.trace(Tj):.6g}, expected 0", "trace")


def _high_eigenvalue(T: Mat, tol: Tol) -> complex:
    return eig2(T, tol)[1].value


def analyze_triple(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> AntiReduction:
    """
    Structure of an anti-commuting triple of invertible 2x2 contractions.

    With a normal member the triple is a NormalTriple: in its unitary eigenframe
    ``T_1 = a_1 R_-1`` and ``T_2 = lambda T_3 R_-1`` where the roles 2 and 3 are assigned so
    that ``|c_2| <= |c_3|``. Otherwise a GeneralTriple: in a Schur frame of the first member
    ``c_2 / c_3 = a_2 / a_3 = lambda`` and ``2 T_2 T_3 = alpha T_1`` with
    ``alpha = c_3 (d_2 - lambda d_3) / a_1`` and ``beta = 2 / alpha``.

    Raises:
        DimensionError: Not a triple.
        StructureViolation: The hypotheses (anti-commuting, invertible, traceless) fail.
    """
    if len(T) != 3:
        logger.error(f"Expected a triple, got {len(T)} members")
        raise DimensionError(f"Expected a triple, got {len(T)} members")
    assert_anti(T, tol)
    for j, Tj in enumerate(T):
        if not is_invertible(Tj, tol):
            _fail(f"Member {j} is not invertible", "not-invertible")
    _require_traceless(T, tol)

    normal = [i for i, Ti in enumerate(T) if is_normal(Ti, tol)]
    if normal:
        i1 = normal[0]
        Q, S = schur2(T[i1], first=_high_eigenvalue(T[i1], tol), tol=tol)
        forms = [adjoint(Q) @ Ti @ Q for Ti in T]
        a1 = complex(S[0, 0])
        others = [j for j in range(3) if j != i1]
        for j in others:
            if abs(forms[j][0, 0]) > 10 * tol.bound(_scale(T[j])):
                _fail(f"Member {j} is not anti-diagonal in the frame of the normal member", "normal-form")
        i2, i3 = sorted(others, key=lambda j: (abs(forms[j][1, 0]), j))
        lam = complex(forms[i2][1, 0] / forms[i3][1, 0])
        R = np.diag([1.0, -1.0]).astype(np.complex128)
        residual = operator_norm(forms[i2] - lam * forms[i3] @ R)
        if residual > 10 * tol.bound(1.0):
            _fail(f"Factorization T2 = lambda T3 R fails by {residual:.3e}", "normal-factor")
        logger.info(f"Normal triple, roles ({i1}, {i2}, {i3}), a1={a1:.6g}, lambda={lam:.6g}")
        return AntiReduction(
            AntiKind.NORMAL_TRIPLE,
            Q,
            (i1, i3),
            {i2: lam},
            {"a1": a1, "lambda": lam},
            forms,
            roles=(i1, i2, i3),
        )

    Q, S = schur2(T[0], first=_high_eigenvalue(T[0], tol), tol=tol)
    forms = [adjoint(Q) @ Ti @ Q for Ti in T]
    a1, d1 = complex(S[0, 0]), complex(S[0, 1])
    a2, c2, d2 = complex(forms[1][0, 0]), complex(forms[1][1, 0]), complex(forms[1][0, 1])
    a3, c3, d3 = complex(forms[2][0, 0]), complex(forms[2][1, 0]), complex(forms[2][0, 1])
    lam = c2 / c3
    residual = abs(a2 - lam * a3)
    if residual > 10 * tol.bound(_scale(T[1])):
        _fail(f"a2 / a3 differs from lambda = c2 / c3 by {residual:.3e}", "lambda")
    alpha = c3 * (d2 - lam * d3) / a1
    beta = 2 / alpha

    T1, T2, T3 = T
    scale = _scale(T1)
    if operator_norm(2 * T2 @ T3 - alpha * T1) > 10 * tol.bound(scale):
        _fail("2 T2 T3 differs from alpha T1", "alpha")
    if operator_norm((T2 @ T3 - T3 @ T2) - alpha * T1) > 10 * tol.bound(scale):
        _fail("T2 T3 - T3 T2 differs from alpha T1", "alpha")
    hypothesis = operator_norm(T1) <= operator_norm(T2 @ T3) + tol.bound(1.0)
    logger.info(f"General triple, lambda={lam:.6g}, alpha={alpha:.6g}, beta={beta:.6g}, |beta|<=1: {hypothesis}")
    return AntiReduction(
        AntiKind.GENERAL_TRIPLE,
        Q,
        (1, 2),
        {},
        {"a1": a1, "d1": d1, "a2": a2, "a3": a3, "lambda": lam, "alpha": alpha, "beta": beta},
        forms,
        roles=(0, 1, 2),
        norm_hypothesis=hypothesis,
    )


def _reduce_invertible_pair(T: Sequence[Mat], tol: Tol) -> AntiReduction:
    if len(T) == 1:
        return AntiReduction(AntiKind.INVERTIBLE_PAIR, np.eye(2, dtype=np.complex128), None, {}, {}, list(T), (0,))
    _require_traceless(T, tol)
    normal = [i for i, Ti in enumerate(T) if is_normal(Ti, tol)]
    if normal:
        i1 = normal[0]
        other = 1 - i1
        Q, S = schur2(T[i1], first=_high_eigenvalue(T[i1], tol), tol=tol)
        forms = [adjoint(Q) @ Ti @ Q for Ti in T]
        logger.info(f"Invertible pair with normal member {i1}")
        return AntiReduction(
            AntiKind.INVERTIBLE_PAIR, Q, (i1, other), {}, {"a1": complex(S[0, 0])}, forms, roles=(i1, other)
        )
    logger.info("Invertible pair without a normal member")
    return AntiReduction(AntiKind.INVERTIBLE_PAIR, np.eye(2, dtype=np.complex128), (0, 1), {}, {}, list(T), (0, 1))


def reduce_anti(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> AntiReduction:
    """
    Dispatch an anti-commuting tuple of non-zero 2x2 contractions to its reduction.

    A nilpotent member selects :func:`reduce_nilpotent`, any other singular member
    :func:`reduce_noninvertible`; all-invertible tuples are bounded by three members and the
    triple goes to :func:`analyze_triple`, shorter tuples are dilated directly as a pair.

    Raises:
        StructureViolation: The tuple does not anti-commute.
        BoundViolation: More than three invertible members.
    """
    assert_anti(T, tol)
    if any(is_nilpotent(Ti, tol) for Ti in T):
        return reduce_nilpotent(T, tol)
    if any(not is_invertible(Ti, tol) for Ti in T):
        return reduce_noninvertible(T, tol)
    invertible_bound_check(T, tol)
    if len(T) == 3:
        return analyze_triple(T, tol)
    return _reduce_invertible_pair(T, tol)


def _annulus(rng: np.random.Generator, size: int) -> np.ndarray:
    low, high = GEN_RADIUS
    radius = rng.uniform(low, high, size)
    phase = rng.uniform(0.0, 2 * np.pi, size)
    return radius * np.exp(1j * phase)


def gen_anti_triple(seed: int, scale: float = 1.0, tol: Tol = DEFAULT_TOL) -> list[Mat]:
    """
    Seeded anti-commuting triple of invertible, non-normal 2x2 contractions.

    ``a_1, d_1, a_2, a_3, d_2`` are drawn from the annulus ``0.2 <= |z| <= 1``; ``c_2, c_3`` and
    ``d_3`` follow from the anti-commutation constraints. Each member is rescaled to norm ``scale``.

    Raises:
        ValueError: ``scale`` outside ``(0, 1]``.
        StructureViolation: No usable draw within the retry budget.
    """
    if not 0 < scale <= 1:
        raise ValueError(f"Scale must lie in (0, 1], got {scale}")
    rng = np.random.default_rng(seed)
    for attempt in range(GEN_RETRIES):
        a1, d1, a2, a3, d2 = _annulus(rng, 5)
        c2 = -2 * a1 * a2 / d1
        c3 = -2 * a1 * a3 / d1
        d3 = -(2 * a2 * a3 + d2 * c3) / c2
        triple = [
            np.array([[a1, d1], [0, -a1]], dtype=np.complex128),
            np.array([[a2, d2], [c2, -a2]], dtype=np.complex128),
            np.array([[a3, d3], [c3, -a3]], dtype=np.complex128),
        ]
        triple = [Tj * (scale / operator_norm(Tj)) for Tj in triple]
        if all(is_invertible(Tj, tol) and not is_normal(Tj, tol) for Tj in triple):
            logger.debug(f"Anti-commuting triple drawn after {attempt + 1} attempts")
            return triple
    _fail(f"No usable anti-commuting triple after {GEN_RETRIES} draws", "degenerate-draw")


def anticommutant_basis(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> list[Mat]:
    """
    Basis of ``{X : Ti X = -X Ti for all i}``.

    Uses row-major vectorization, ``vec(A X B) = (A kron B^T) vec(X)``.
    """
    n = check_tuple_shapes(T)
    eye = np.eye(n, dtype=np.complex128)
    system = np.vstack([np.kron(Ti, eye) + np.kron(eye, Ti.T) for Ti in T])
    null = scipy.linalg.null_space(system, rcond=np.sqrt(tol.rel))
    return [null[:, s].reshape(n, n) for s in range(null.shape[1])]


def invertible_extension_exists(T: Sequence[Mat], tol: Tol = DEFAULT_TOL) -> bool:
    """
    Whether some invertible 2x2 matrix anti-commutes with every member.

    ``det`` restricted to the anti-commutant is a quadratic form; it vanishes identically exactly
    when every basis element is singular and every polarized pair ``det(X + Y) - det X - det Y``
    is zero.
    """
    basis = anticommutant_basis(T, tol)
    floor = tol.bound(1.0)
    for a, X in enumerate(basis):
        if abs(np.linalg.det(X)) > floor:
            return True
        for Y in basis[a + 1 :]:
            if abs(np.linalg.det(X + Y) - np.linalg.det(X) - np.linalg.det(Y)) > floor:
                return True
    return False
