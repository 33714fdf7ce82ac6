import logging
from collections.abc import Callable
from typing import NoReturn

import numpy as np

from .anti import GEN_RETRIES, gen_anti_triple
from .exceptions import StructureViolation
from .matcore import adjoint, operator_norm
from .qrel import adjoint_tuple
from .schemas import Mat

logger = logging.getLogger(__name__)

# Eigenvalues of planted pivots differ at least this much in real part, so the eigenvalue
# order is the same for a tuple and its adjoint.
SEPARATION = 0.05

DISK_RADIUS = (0.3, 0.95)
MAX_TWIST_ORDER = 6


def epsilon_triple(eps: float = 0.1) -> list[Mat]:
    """
    Anti-commuting triple of invertible, non-normal contractions with ``T_2 T_3 = -T_1``.
    """
    return [
        eps**2 * np.array([[1, 1], [0, -1]], dtype=np.complex128),
        eps * np.array([[1, 0], [-2, -1]], dtype=np.complex128),
        eps * np.array([[-1, -1], [2, 1]], dtype=np.complex128),
    ]


def type1_example() -> list[Mat]:
    """
    ``diag(0.5, 0.5i)`` with a lower twisted partner, ``r = i``.
    """
    return [
        np.diag([0.5, 0.5j]).astype(np.complex128),
        np.array([[0, 0], [0.6, 0]], dtype=np.complex128),
    ]


def type3_example() -> list[Mat]:
    return [
        np.diag([0.8, -0.8]).astype(np.complex128),
        np.array([[0, 0.5], [0.3, 0]], dtype=np.complex128),
    ]


def commuting_diagonal_example() -> list[Mat]:
    return [
        np.diag([0.5, 0.3]).astype(np.complex128),
        np.diag([0.2, 0.7]).astype(np.complex128),
    ]


def random_unitary(rng: np.random.Generator) -> Mat:
    """
    Unitary factor of a standard complex Gaussian 2x2 matrix.
    """
    A = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    u, _, vh = np.linalg.svd(A)
    return u @ vh


def _disk(rng: np.random.Generator) -> complex:
    low, high = DISK_RADIUS
    return complex(rng.uniform(low, high) * np.exp(1j * rng.uniform(0.0, 2 * np.pi)))


def _root(rng: np.random.Generator, allow_one: bool = False) -> complex:
    order = int(rng.integers(1 if allow_one else 3, MAX_TWIST_ORDER + 1))
    p = int(rng.integers(0 if allow_one else 1, order))
    return complex(np.exp(2j * np.pi * p / order))


def _ordered(x: complex, ratio: complex) -> bool:
    # x must be the larger eigenvalue of diag(x, ratio * x)
    return ratio == 1 or x.real > (ratio * x).real + SEPARATION


def _conjugate(Q: Mat, forms: list[Mat]) -> list[Mat]:
    return [Q @ C @ adjoint(Q) for C in forms]


def _retry_exhausted(kind: str) -> NoReturn:
    msg = f"No usable {kind} tuple after {GEN_RETRIES} draws"
    logger.error(msg)
    raise StructureViolation(msg, "degenerate-draw")


def _type1_forms(rng: np.random.Generator, k: int) -> list[Mat]:
    for _ in range(GEN_RETRIES):
        a, r = _disk(rng), _root(rng)
        c, alpha = _disk(rng), _root(rng, allow_one=True)
        # r = -1 is Type-III
        if abs(r + 1) < SEPARATION or not (_ordered(a, r) and _ordered(c, alpha)):
            continue
        forms = [np.diag([a, r * a]), np.diag([c, alpha * c])]
        forms += [np.array([[0, 0], [_disk(rng), 0]]) for _ in range(k - 2)]
        return [F.astype(np.complex128) for F in forms]
    _retry_exhausted("Type-I")


def gen_type1(seed: int, k: int = 3) -> list[Mat]:
    """
    Seeded Type-I tuple in a random unitary basis: a pivot ``diag(a, r a)``, a second diagonal
    member and ``k - 2`` strictly lower twisted members. Twists are roots of unity of order at most 6.
    """
    if k < 3:
        raise ValueError(f"A planted Type-I tuple has at least 3 members, got {k}")
    rng = np.random.default_rng(seed)
    forms = _type1_forms(rng, k)
    return _conjugate(random_unitary(rng), forms)


def gen_type2(seed: int, k: int = 3) -> list[Mat]:
    """
    Adjoint of :func:`gen_type1`, a Type-II tuple.
    """
    return adjoint_tuple(gen_type1(seed, k))


def gen_type3(seed: int) -> list[Mat]:
    """
    Seeded Type-III tuple with all four groups populated: the pivot ``diag(a, -a)``, a scalar
    member, an anti-diagonal ``T_m`` and ``w R_-1 T_m``.
    """
    rng = np.random.default_rng(seed)
    for _ in range(GEN_RETRIES):
        a = _disk(rng)
        if not _ordered(a, -1.0):
            continue
        c, d, e, w = (_disk(rng) for _ in range(4))
        forms = [
            np.diag([a, -a]),
            np.diag([c, c]),
            np.array([[0, d], [e, 0]]),
            w * np.array([[0, d], [-e, 0]]),
        ]
        return _conjugate(random_unitary(rng), [F.astype(np.complex128) for F in forms])
    _retry_exhausted("Type-III")


def gen_commuting(seed: int) -> list[Mat]:
    """
    Two commuting normal contractions with a random common eigenbasis.
    """
    rng = np.random.default_rng(seed)
    Q = random_unitary(rng)
    return _conjugate(Q, [np.diag([_disk(rng), _disk(rng)]).astype(np.complex128) for _ in range(2)])


def gen_similarity(seed: int) -> list[Mat]:
    """
    Type-I pair conjugated by ``[[1, t], [0, 1]]`` and rescaled into the unit ball.
    """
    rng = np.random.default_rng(seed)
    forms = _type1_forms(rng, 3)
    t = rng.uniform(0.5, 1.5)
    P = np.array([[1, t], [0, 1]], dtype=np.complex128)
    T = [P @ F @ np.linalg.inv(P) for F in (forms[0], forms[2])]
    scale = 0.9 / max(operator_norm(Ti) for Ti in T)
    return [scale * Ti for Ti in T]


def gen_anti(seed: int) -> list[Mat]:
    return gen_anti_triple(seed)


GENERATORS: dict[str, Callable[[int], list[Mat]]] = {
    "commuting": gen_commuting,
    "type1": gen_type1,
    "type2": gen_type2,
    "type3": gen_type3,
    "anti": gen_anti,
    "similarity": gen_similarity,
}


def generate(kind: str, seed: int, count: int = 1) -> list[list[Mat]]:
    """
    ``count`` tuples of the given kind from consecutive seeds.

    Raises:
        KeyError: Unknown kind.
    """
    if kind not in GENERATORS:
        logger.error(f"Unknown generator {kind!r}")
        raise KeyError(f"Unknown generator {kind!r}, expected one of {sorted(GENERATORS)}")
    return [GENERATORS[kind](seed + s) for s in range(count)]


def demo_corpus(seed: int = 7) -> dict[str, list[Mat]]:
    """
    The bundled pipelines: the epsilon triple and one planted tuple per canonical type.
    """
    return {
        "epsilon": epsilon_triple(),
        "type1": gen_type1(seed),
        "type2": gen_type2(seed),
        "type3": gen_type3(seed),
    }
