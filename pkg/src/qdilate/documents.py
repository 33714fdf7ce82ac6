import json
import logging
from importlib.metadata import PackageNotFoundError, version
from typing import Annotated, Any

import numpy as np
from Crypto.Hash import SHA256
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import sparse

from .schemas import (
    DilationCertificate,
    Mat,
    QEntry,
    QFamily,
    SimilarityPlan,
    Tol,
    TruncationConfig,
    VerificationReport,
)

logger = logging.getLogger(__name__)

ComplexPair = Annotated[list[float], Field(min_length=2, max_length=2)]

UNIMODULAR_SLACK = 1e-9


def tool_version() -> str:
    try:
        return version("qdilate")
    except PackageNotFoundError:
        return "0.0.0"


def _numpy_default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        value = obj.item()
        return [value.real, value.imag] if isinstance(value, complex) else value
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def canonical_json(data: Any) -> str:
    """
    Sorted keys, no whitespace, shortest round-trip floats.
    """
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=_numpy_default)


def pretty_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, default=_numpy_default)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _dense(rows: list[list[list[float]]]) -> Mat:
    return np.array([[complex(*z) for z in row] for row in rows], dtype=np.complex128).reshape(len(rows), -1)


def _rows(M: Mat) -> list[list[list[float]]]:
    return [[_pair(z) for z in row] for row in np.asarray(M)]


class QDeclaration(BaseModel):
    """
    A declared relation ``T_i T_j = q T_j T_i``.
    """

    model_config = ConfigDict(extra="forbid")

    i: int = Field(ge=0)
    j: int = Field(ge=0)
    q: ComplexPair

    @field_validator("q")
    @classmethod
    def _unimodular(cls, value: list[float]) -> list[float]:
        if abs(abs(complex(*value)) - 1.0) > UNIMODULAR_SLACK:
            raise ValueError(f"Declared q {value} is not unimodular")
        return value


class TupleDocument(BaseModel):
    """
    A tuple of square complex matrices, each entry as ``[re, im]``, rows first.
    """

    model_config = ConfigDict(extra="forbid")

    matrices: list[list[list[ComplexPair]]] = Field(min_length=1)
    q: list[QDeclaration] | None = None
    name: str | None = None
    seed: int | None = None

    @field_validator("matrices")
    @classmethod
    def _square(cls, value: list[list[list[list[float]]]]) -> list[list[list[list[float]]]]:
        n = len(value[0])
        for idx, M in enumerate(value):
            if len(M) != n or any(len(row) != n for row in M):
                raise ValueError(f"Matrix {idx} is not {n}x{n}")
        if n == 0:
            raise ValueError("Matrices must not be empty")
        return value

    @model_validator(mode="after")
    def _declared_indices(self) -> "TupleDocument":
        k = len(self.matrices)
        for decl in self.q or []:
            if decl.i == decl.j or decl.i >= k or decl.j >= k:
                raise ValueError(f"Declared pair ({decl.i}, {decl.j}) is invalid for {k} matrices")
        return self

    @classmethod
    def from_tuple(
        cls, T: list[Mat], name: str | None = None, seed: int | None = None, q: QFamily | None = None
    ) -> "TupleDocument":
        declared = None
        if q is not None:
            declared = [
                QDeclaration(i=i, j=j, q=_pair(q.constant(i, j))) for i, j in q.pairs() if q.get(i, j).is_exact
            ]
        return cls(matrices=[_rows(Ti) for Ti in T], q=declared, name=name, seed=seed)

    def to_tuple(self) -> list[Mat]:
        return [_dense(M) for M in self.matrices]

    def declared_family(self) -> QFamily | None:
        if self.q is None:
            return None
        fam = QFamily(len(self.matrices))
        for decl in self.q:
            fam.put(decl.i, decl.j, QEntry.exact(complex(*decl.q)))
        return fam

    def digest(self) -> str:
        """
        SHA-256 of the canonical JSON form.
        """
        payload = canonical_json(self.model_dump(mode="json", exclude_none=True)).encode()
        return SHA256.new(payload).hexdigest()


class SparseOperator(BaseModel):
    """
    Square operator as row-major ``[row, col, [re, im]]`` triplets.
    """

    model_config = ConfigDict(extra="forbid")

    dim: int = Field(ge=1)
    entries: list[tuple[int, int, ComplexPair]]

    @model_validator(mode="after")
    def _in_range(self) -> "SparseOperator":
        for row, col, _ in self.entries:
            if not (0 <= row < self.dim and 0 <= col < self.dim):
                raise ValueError(f"Entry ({row}, {col}) outside a {self.dim}x{self.dim} operator")
        return self

    @classmethod
    def from_sparse(cls, U: sparse.csr_array) -> "SparseOperator":
        coo = sparse.coo_array(U)
        order = np.lexsort((coo.col, coo.row))
        entries = [
            (int(coo.row[p]), int(coo.col[p]), _pair(complex(coo.data[p]))) for p in order if coo.data[p] != 0
        ]
        return cls(dim=int(U.shape[0]), entries=entries)

    def to_sparse(self) -> sparse.csr_array:
        if not self.entries:
            return sparse.csr_array((self.dim, self.dim), dtype=np.complex128)
        rows = [e[0] for e in self.entries]
        cols = [e[1] for e in self.entries]
        data = [complex(*e[2]) for e in self.entries]
        return sparse.csr_array((data, (rows, cols)), shape=(self.dim, self.dim), dtype=np.complex128)


class Provenance(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tool: str = "qdilate"
    version: str
    input_hash: str
    config: dict[str, Any]
    tol: dict[str, float]


class CertificateDocument(BaseModel):
    """
    Serialized certificate; re-verifiable from the document alone.
    """

    model_config = ConfigDict(extra="forbid")

    provenance: Provenance
    operators: list[SparseOperator] = Field(min_length=1)
    V: list[list[ComplexPair]]
    q_out: dict[str, Any]
    q_in: dict[str, Any] | None = None
    edge: list[int] = []
    scales: list[ComplexPair]
    similarity: dict[str, Any] | None = None
    report: dict[str, Any] | None = None

    @model_validator(mode="after")
    def _shapes(self) -> "CertificateDocument":
        dim = len(self.V)
        for idx, op in enumerate(self.operators):
            if op.dim != dim:
                raise ValueError(f"Operator {idx} has dimension {op.dim}, V has {dim} rows")
        if len(self.scales) != len(self.operators):
            raise ValueError(f"{len(self.scales)} scales for {len(self.operators)} operators")
        return self

    @classmethod
    def from_certificate(
        cls, cert: DilationCertificate, source: TupleDocument, tol: Tol
    ) -> "CertificateDocument":
        provenance = Provenance(
            version=tool_version(), input_hash=source.digest(), config=cert.cfg.to_dict(), tol=tol.to_dict()
        )
        return cls(
            provenance=provenance,
            operators=[SparseOperator.from_sparse(U) for U in cert.U],
            V=_rows(cert.V),
            q_out=cert.q_out.to_dict(),
            q_in=None if cert.q_in is None else cert.q_in.to_dict(),
            edge=[int(x) for x in cert.edge],
            scales=[_pair(s) for s in cert.scales],
            similarity=None if cert.similarity is None else cert.similarity.to_dict(),
            report=None if cert.report is None else cert.report.to_dict(),
        )

    def to_certificate(self) -> DilationCertificate:
        report = None if self.report is None else VerificationReport.from_dict(self.report)
        return DilationCertificate(
            [op.to_sparse() for op in self.operators],
            _dense(self.V),
            QFamily.from_dict(self.q_out),
            TruncationConfig.from_dict(self.provenance.config),
            report=report,
            edge=np.array(self.edge, dtype=np.int64),
            q_in=None if self.q_in is None else QFamily.from_dict(self.q_in),
            scales=[complex(*s) for s in self.scales],
            similarity=None if self.similarity is None else SimilarityPlan.from_dict(self.similarity),
        )

    def tolerance(self) -> Tol:
        return Tol(**self.provenance.tol)

    def matches(self, source: TupleDocument) -> bool:
        """
        Whether the certificate was issued for this tuple.
        """
        return self.provenance.input_hash == source.digest()


def dump_document(doc: BaseModel) -> str:
    return pretty_json(doc.model_dump(mode="json"))
