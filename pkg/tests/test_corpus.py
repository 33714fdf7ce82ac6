import numpy as np
import pytest

from qdilate.corpus import (
    GENERATORS,
    demo_corpus,
    epsilon_triple,
    gen_type1,
    generate,
    random_unitary,
)
from qdilate.matcore import is_unitary, operator_norm


def test_epsilon_triple_relations():
    T1, T2, T3 = epsilon_triple(0.1)
    np.testing.assert_allclose(T2 @ T3, -T1, atol=1e-15)
    for A, B in ((T1, T2), (T1, T3), (T2, T3)):
        np.testing.assert_allclose(A @ B, -B @ A, atol=1e-15)


@pytest.mark.parametrize("kind", sorted(GENERATORS))
@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_generated_members_are_contractions(kind, seed):
    for Ti in GENERATORS[kind](seed):
        assert Ti.shape == (2, 2)
        assert operator_norm(Ti) <= 1.0 + 1e-12


def test_generators_are_seeded():
    for a, b in zip(gen_type1(11), gen_type1(11)):
        np.testing.assert_array_equal(a, b)
    first, second = generate("type1", 11, 2)
    assert not np.allclose(first[0], second[0])


def test_unknown_kind():
    with pytest.raises(KeyError):
        generate("type4", 0)


def test_type1_needs_three_members():
    with pytest.raises(ValueError):
        gen_type1(0, k=2)


def test_random_unitary():
    assert is_unitary(random_unitary(np.random.default_rng(3)))


def test_demo_corpus():
    assert list(demo_corpus()) == ["epsilon", "type1", "type2", "type3"]
