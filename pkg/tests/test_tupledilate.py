import cmath

import numpy as np
import pytest

from qdilate.anti import reduce_anti
from qdilate.classify import classify
from qdilate.corpus import (
    commuting_diagonal_example,
    epsilon_triple,
    gen_anti,
    gen_commuting,
    gen_similarity,
    gen_type1,
    gen_type2,
    gen_type3,
    type1_example,
    type3_example,
)
from qdilate.enums import AntiKind, DilationMode, Route
from qdilate.exceptions import ContractionError, StructureViolation
from qdilate.matcore import identity, operator_norm
from qdilate.qrel import detect_family
from qdilate.schemas import SimilarityPlan, TruncationConfig
from qdilate.tupledilate import (
    R_MINUS,
    dilate_anti,
    dilate_commuting_normal,
    dilate_general,
    dilate_type1,
    lattice_family,
    ordering_plan,
    ring_config,
    scalar_tensor_lift,
)
from qdilate.verify import multi_indices, verify_certificate

SEEDS = [0, 1, 2]
ZERO = np.zeros((2, 2), dtype=np.complex128)
NILPOTENT = np.array([[0.0, 0.5], [0.0, 0.0]], dtype=np.complex128)


def _passed(outcome) -> bool:
    cert = outcome.certificate
    return cert is not None and cert.report is not None and cert.report.passed


def _contained(cert, tol: float = 1e-9) -> bool:
    """
    Every output relation constant is 1 or one of the input constants.
    """
    allowed = set(cert.q_in.values()) | {1.0 + 0j}
    return all(min(abs(v - a) for a in allowed) <= tol for v in cert.q_out.values())


def test_lattice_family():
    fam = lattice_family([(1j, 0), (1.0, 1), (-1.0, 1)])
    assert fam.constant(0, 1) == pytest.approx(1j)
    assert fam.constant(0, 2) == pytest.approx(1j)
    assert fam.constant(1, 2) == pytest.approx(-1.0)


@pytest.mark.parametrize(
    "twists, N, requested, mode, M",
    [
        ([1j], 4, DilationMode.CYCLIC, DilationMode.CYCLIC, 8),
        ([-1.0], 5, DilationMode.CYCLIC, DilationMode.CYCLIC, 8),
        ([1j, cmath.exp(2j * cmath.pi / 3)], 5, DilationMode.CYCLIC, DilationMode.CYCLIC, 12),
        ([1j], 4, DilationMode.WINDOWED, DilationMode.WINDOWED, 6),
        ([cmath.exp(0.1234567j)], 4, DilationMode.CYCLIC, DilationMode.WINDOWED, 6),
    ],
)
def test_ring_config(twists, N, requested, mode, M):
    ring = ring_config(TruncationConfig(N, mode=requested), twists)
    assert ring.M == M
    assert ring.mode == mode


def test_type1_example_ring_length():
    """
    ``r = i`` needs a ring whose length is a multiple of 4.
    """
    outcome = dilate_general(type1_example(), TruncationConfig(4))
    assert outcome.route == Route.TYPE_I
    assert outcome.certificate.cfg.M == 8
    assert outcome.certificate.cfg.mode == DilationMode.CYCLIC
    assert _passed(outcome)


def test_windowed_type1():
    outcome = dilate_general(type1_example(), TruncationConfig(4, mode=DilationMode.WINDOWED))
    cert = outcome.certificate
    assert cert.edge.size > 0
    assert cert.report.windowed
    assert _passed(outcome)


@pytest.mark.parametrize("seed", SEEDS)
@pytest.mark.parametrize(
    "generator, route",
    [
        (gen_type1, Route.TYPE_I),
        (gen_type2, Route.TYPE_II),
        (gen_type3, Route.TYPE_III),
        (gen_commuting, Route.COMMUTING_NORMAL),
    ],
)
def test_planted_tuples(generator, route, seed):
    outcome = dilate_general(generator(seed), TruncationConfig(3))
    assert outcome.route == route
    assert _passed(outcome)
    assert _contained(outcome.certificate)


def test_type3_example():
    outcome = dilate_general(type3_example(), TruncationConfig(4))
    assert outcome.route == Route.TYPE_III
    assert _passed(outcome)


def test_epsilon_triple():
    """
    The epsilon triple is a general anti-commuting triple; beta = -1 is absorbed as a weight.
    """
    outcome = dilate_general(epsilon_triple(), TruncationConfig(5))
    assert outcome.route == Route.ANTI
    assert outcome.note == AntiKind.GENERAL_TRIPLE.value
    assert outcome.anti.scalars["beta"] == pytest.approx(-1.0)
    assert outcome.certificate.scales == [1.0, 1.0, 1.0]
    assert _passed(outcome)
    assert _contained(outcome.certificate)


def test_epsilon_triple_is_cyclic(caplog):
    """
    The ``(T_2, T_3)`` pair closes exactly, so the triple needs no window.
    """
    with caplog.at_level("WARNING", logger="qdilate.pairdilate"):
        cert = dilate_general(epsilon_triple(), TruncationConfig(5)).certificate
    assert "Falling back" not in caplog.text
    assert cert.cfg.mode == DilationMode.CYCLIC
    assert cert.cfg.M % 2 == 0
    assert cert.edge.size == 0
    report = verify_certificate(epsilon_triple(), cert)
    assert report.passed
    assert not report.windowed


@pytest.mark.parametrize("seed", SEEDS)
def test_generated_anti_triples(seed):
    outcome = dilate_general(gen_anti(seed), TruncationConfig(3))
    assert outcome.route == Route.ANTI
    assert _passed(outcome)


def test_oblique_basis_uses_similarity():
    """
    Eigenvectors ``e1`` and ``(1, 1)`` give the unit-column basis with ``beta = 1 + sqrt(2)``.
    """
    P0 = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=np.complex128)
    P0_inv = np.linalg.inv(P0)
    T = [P0 @ F @ P0_inv for F in type1_example()]
    scale = 0.9 / max(operator_norm(Ti) for Ti in T)
    T = [scale * Ti for Ti in T]
    outcome = dilate_general(T, TruncationConfig(3))
    assert outcome.route == Route.SIMILARITY
    np.testing.assert_allclose(np.linalg.norm(outcome.similarity.P, axis=0), [1.0, 1.0])
    assert outcome.similarity.beta == pytest.approx(1 + np.sqrt(2))
    assert outcome.certificate.scales == [pytest.approx(1 + np.sqrt(2))] * 2
    assert _passed(outcome)


@pytest.mark.parametrize("seed", SEEDS)
def test_similarity_beta(seed):
    outcome = dilate_general(gen_similarity(seed), TruncationConfig(3))
    assert outcome.route == Route.SIMILARITY
    assert outcome.similarity.beta >= 1.0
    assert _passed(outcome)


def test_similarity_plan_condition_number():
    plan = SimilarityPlan(np.array([[1.0, 1.0], [0.0, 1.0]]))
    assert plan.beta == pytest.approx((3 + np.sqrt(5)) / 2)


def test_commuting_without_normal_structure():
    outcome = dilate_general([NILPOTENT, 0.3 * NILPOTENT], TruncationConfig(3))
    assert outcome.route == Route.COMMUTING_UNCERTIFIED
    assert outcome.certificate is None
    assert outcome.note == "Commuting (Holbrook)"


def test_commuting_diagonal():
    outcome = dilate_general(commuting_diagonal_example(), TruncationConfig(4))
    assert outcome.route == Route.COMMUTING_NORMAL
    assert _passed(outcome)


def test_zero_members_are_reinserted():
    T1, T2 = type1_example()
    T = [T1, ZERO, T2]
    outcome = dilate_general(T, TruncationConfig(3))
    cert = outcome.certificate
    assert cert.k == 3
    assert cert.q_out.constant(0, 1) == pytest.approx(1.0)
    assert cert.q_out.constant(0, 2) == pytest.approx(1j)
    assert _passed(outcome)


def test_all_zero_tuple():
    outcome = dilate_general([ZERO, ZERO], TruncationConfig(3))
    assert outcome.route == Route.COMMUTING_NORMAL
    assert _passed(outcome)


def test_non_contraction_is_rejected():
    with pytest.raises(ContractionError):
        dilate_general([2 * identity(2)], TruncationConfig(3))


def test_wrong_canonical_type():
    canonical = classify(type3_example(), detect_family(type3_example())).canonical
    with pytest.raises(StructureViolation) as exc:
        dilate_type1(canonical, TruncationConfig(3))
    assert exc.value.reason == "wrong-type"


@pytest.mark.parametrize("seed", SEEDS)
def test_ordering_sign_ledger(seed):
    """
    Ordered products of a Type-III tuple collapse to ``coefficient * R^A T_m^B``.
    """
    T = gen_type3(seed)
    canonical = classify(T, detect_family(T)).canonical
    plan = ordering_plan(canonical)
    Tm = canonical.form(plan.m)
    for exps in multi_indices(canonical.k, 3):
        product = identity(2)
        for idx, n in zip(plan.sigma, exps):
            product = product @ np.linalg.matrix_power(canonical.form(idx), n)
        A, B = plan.powers(exps)
        want = plan.coefficient(exps) * np.linalg.matrix_power(R_MINUS, A) @ np.linalg.matrix_power(Tm, B)
        np.testing.assert_allclose(product, want, atol=1e-10)


def test_lift_rejects_large_weight():
    eye = identity(2)
    with pytest.raises(ContractionError):
        scalar_tensor_lift([1.5], [eye], eye, lattice_family([(1.0, 0)]), TruncationConfig(3))


def test_commuting_normal_needs_normal_members():
    with pytest.raises(StructureViolation):
        dilate_commuting_normal([NILPOTENT], TruncationConfig(3))


def test_nilpotent_anti_pair():
    T = [NILPOTENT, np.diag([0.5, -0.5]).astype(np.complex128)]
    assert reduce_anti(T).kind == AntiKind.NILPOTENT
    cert = dilate_anti(T, TruncationConfig(4))
    assert verify_certificate(T, cert).passed


def test_singular_anti_pair():
    T = [
        np.array([[0.5, 0.3], [0.0, 0.0]], dtype=np.complex128),
        np.array([[0.0, -0.3], [0.0, 0.5]], dtype=np.complex128),
    ]
    cert = dilate_anti(T, TruncationConfig(3))
    assert verify_certificate(T, cert).passed


def test_normal_anti_triple():
    T = [
        0.5 * np.array([[1, 0], [0, -1]], dtype=np.complex128),
        0.5 * np.array([[0, 1], [1, 0]], dtype=np.complex128),
        0.5 * np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    ]
    cert = dilate_anti(T, TruncationConfig(3))
    assert verify_certificate(T, cert).passed
