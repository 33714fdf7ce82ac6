import json

import numpy as np
import pytest
from pydantic import ValidationError

from qdilate.corpus import epsilon_triple, type1_example
from qdilate.documents import (
    CertificateDocument,
    SparseOperator,
    TupleDocument,
    canonical_json,
    dump_document,
)
from qdilate.qrel import detect_family
from qdilate.schemas import Tol, TruncationConfig
from qdilate.tupledilate import dilate_general
from qdilate.verify import verify_certificate

EYE = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]


def test_tuple_document_keeps_entries():
    T = epsilon_triple()
    doc = TupleDocument.from_tuple(T, name="epsilon", q=detect_family(T))
    for got, want in zip(doc.to_tuple(), T):
        np.testing.assert_array_equal(got, want)
    assert doc.declared_family().constant(1, 2) == pytest.approx(-1.0)


def test_digest_is_stable():
    doc = TupleDocument.from_tuple(type1_example())
    again = TupleDocument.model_validate_json(dump_document(doc))
    assert doc.digest() == again.digest()
    assert len(doc.digest()) == 64
    other = TupleDocument.from_tuple([0.5 * Ti for Ti in type1_example()])
    assert other.digest() != doc.digest()


def test_canonical_json_is_compact_and_sorted():
    assert canonical_json({"b": 1, "a": [1.5, 2]}) == '{"a":[1.5,2],"b":1}'


def test_canonical_json_accepts_numpy_scalars():
    data = {"ok": np.bool_(True), "x": np.float64(0.5), "z": np.complex128(1 + 2j), "v": np.arange(2)}
    assert canonical_json(data) == '{"ok":true,"v":[0,1],"x":0.5,"z":[1.0,2.0]}'


@pytest.mark.parametrize(
    "payload",
    [
        {"matrices": [[[[1.0, 0.0], [0.0, 0.0]]]]},
        {"matrices": [EYE], "extra": 1},
        {"matrices": [EYE, EYE], "q": [{"i": 0, "j": 1, "q": [2.0, 0.0]}]},
        {"matrices": [EYE, EYE], "q": [{"i": 0, "j": 5, "q": [1.0, 0.0]}]},
        {"matrices": [[[[1.0, 0.0, 3.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]]},
        {"matrices": []},
    ],
)
def test_invalid_tuple_documents(payload):
    with pytest.raises(ValidationError):
        TupleDocument.model_validate(payload)


def test_sparse_operator_is_row_major():
    from scipy import sparse

    U = sparse.csr_array(np.array([[0, 2], [1j, 0]], dtype=np.complex128))
    op = SparseOperator.from_sparse(U)
    assert op.entries == [(0, 1, [2.0, 0.0]), (1, 0, [0.0, 1.0])]
    np.testing.assert_array_equal(op.to_sparse().toarray(), U.toarray())


def test_sparse_operator_bounds():
    with pytest.raises(ValidationError):
        SparseOperator(dim=2, entries=[(2, 0, [1.0, 0.0])])


def test_certificate_document_reverifies():
    """
    A certificate read back from JSON passes the oracle on its own.
    """
    T = type1_example()
    source = TupleDocument.from_tuple(T)
    tol = Tol(1e-10)
    cert = dilate_general(T, TruncationConfig(3), tol).certificate
    doc = CertificateDocument.from_certificate(cert, source, tol)
    loaded = CertificateDocument.model_validate_json(dump_document(doc))
    assert loaded.matches(source)
    assert loaded.tolerance() == tol
    restored = loaded.to_certificate()
    assert restored.cfg == cert.cfg
    assert restored.q_in.constant(0, 1) == pytest.approx(1j)
    report = verify_certificate(T, restored, tol=tol)
    assert report.passed
    assert report.moment == pytest.approx(cert.report.moment, abs=1e-12)


def test_certificate_document_checks_shapes():
    T = type1_example()
    source = TupleDocument.from_tuple(T)
    cert = dilate_general(T, TruncationConfig(3)).certificate
    data = json.loads(dump_document(CertificateDocument.from_certificate(cert, source, Tol())))
    data["scales"] = data["scales"][:1]
    with pytest.raises(ValidationError):
        CertificateDocument.model_validate(data)


def test_similarity_survives_document():
    P0 = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=np.complex128)
    T = [0.5 * P0 @ F @ np.linalg.inv(P0) for F in type1_example()]
    cert = dilate_general(T, TruncationConfig(3)).certificate
    doc = CertificateDocument.from_certificate(cert, TupleDocument.from_tuple(T), Tol())
    restored = CertificateDocument.model_validate_json(dump_document(doc)).to_certificate()
    assert restored.similarity.beta == pytest.approx(cert.similarity.beta)
    assert verify_certificate(T, restored).passed
