import logging
from collections.abc import Iterator, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .exceptions import DimensionError
from .matcore import DEFAULT_TOL, adjoint, identity, operator_norm
from .schemas import DilationCertificate, Mat, Tol, VerificationReport

logger = logging.getLogger(__name__)

# Residuals are accumulated over many products; the threshold is this multiple of the tolerance.
RESIDUAL_SLACK = 10.0


def residual_threshold(tol: Tol, scale: float = 1.0) -> float:
    """
    Largest acceptable Frobenius or spectral residual for quantities of size ``scale``.
    """
    return RESIDUAL_SLACK * tol.bound(scale)


def multi_indices(k: int, N: int) -> Iterator[tuple[int, ...]]:
    """
    All ``(m_1, ..., m_k)`` with non-negative entries and ``sum(m) <= N``.
    """
    if k == 0:
        yield ()
        return
    for first in range(N + 1):
        for rest in multi_indices(k - 1, N - first):
            yield (first,) + rest


def _unitarity(U: sparse.csr_array) -> float:
    n = U.shape[0]
    return float(splinalg.norm(U.conj().T @ U - sparse.eye_array(n, dtype=np.complex128)))


def _relation(cert: DilationCertificate) -> float:
    window = cert.window()
    worst = 0.0
    for i, j in cert.q_out.pairs():
        entry = cert.q_out.get(i, j)
        if not entry.is_exact:
            continue
        q = entry.constant()
        Ui, Uj = cert.U[i], cert.U[j]
        diff = sparse.csr_array(Ui @ Uj - q * (Uj @ Ui))
        if cert.edge.size:
            diff = diff[window][:, window]
        worst = max(worst, float(splinalg.norm(diff)))
    return worst


class _MomentWalk:
    """
    Depth-first walk over the exponent grid sharing the partial products ``U_j^m_j ... U_k^m_k V``.
    """

    def __init__(self, target: Sequence[Mat], cert: DilationCertificate, N: int):
        self.target = [np.asarray(T, dtype=np.complex128) for T in target]
        self.cert = cert
        self.N = N
        self.n = cert.V.shape[1]
        self.V_adj = adjoint(cert.V)
        self.worst = 0.0
        self.worst_index: tuple[int, ...] | None = None
        self.count = 0
        self._powers: dict[tuple[int, int], Mat] = {}

    def _power(self, i: int, m: int) -> Mat:
        key = (i, m)
        if key not in self._powers:
            self._powers[key] = np.linalg.matrix_power(self.target[i], m)
        return self._powers[key]

    def run(self) -> None:
        k = self.cert.k
        self._descend(k - 1, self.cert.V, self.N, [0] * k)

    def _descend(self, pos: int, X: Mat, budget: int, exps: list[int]) -> None:
        if pos < 0:
            self._leaf(X, exps)
            return
        U = self.cert.U[pos]
        s = self.cert.scales[pos]
        Y = X
        for m in range(budget + 1):
            if m:
                Y = s * (U @ Y)
            exps[pos] = m
            self._descend(pos - 1, Y, budget - m, exps)
        exps[pos] = 0

    def _leaf(self, X: Mat, exps: list[int]) -> None:
        got = self.V_adj @ X
        want = identity(self.n)
        for i, m in enumerate(exps):
            if m:
                want = want @ self._power(i, m)
        residual = operator_norm(got - want)
        self.count += 1
        if residual > self.worst or self.worst_index is None:
            self.worst = max(residual, self.worst)
            self.worst_index = tuple(exps)


def verify_certificate(
    T: Sequence[Mat], cert: DilationCertificate, N: int | None = None, tol: Tol = DEFAULT_TOL
) -> VerificationReport:
    """
    Recompute every residual of a certificate from scratch.

    For every multi-index of total degree at most ``N`` (the certificate's own degree by default)
    the compression ``V^* (s_1 U_1)^m_1 ... (s_k U_k)^m_k V`` is compared with the ordered product
    of the target powers; the target is ``P^-1 T P`` when the certificate carries a similarity.
    Unitarity of each ``U_i``, the isometry ``V`` and the relations of ``q_out`` (compressed to the
    window when an edge is recorded) are checked as well. Failures are report entries.

    Raises:
        DimensionError: The certificate does not match the tuple.
    """
    N = cert.cfg.N if N is None else N
    if len(T) != cert.k:
        logger.error(f"Certificate has {cert.k} operators for a tuple of {len(T)}")
        raise DimensionError(f"Certificate has {cert.k} operators for a tuple of {len(T)}")
    for U in cert.U:
        if U.shape != (cert.dim, cert.dim):
            logger.error(f"Operator of shape {U.shape} in a certificate of dimension {cert.dim}")
            raise DimensionError(f"Operator of shape {U.shape} in a certificate of dimension {cert.dim}")
    target = list(T) if cert.similarity is None else cert.similarity.transform(list(T))

    unitarity = max((_unitarity(U) for U in cert.U), default=0.0)
    n = cert.V.shape[1]
    isometry = operator_norm(adjoint(cert.V) @ cert.V - identity(n))
    relation = _relation(cert)

    walk = _MomentWalk(target, cert, N)
    walk.run()

    scale = max([1.0] + [abs(s) for s in cert.scales]) ** N
    report = VerificationReport(
        degree=N,
        grid_size=walk.count,
        unitarity=unitarity,
        isometry=isometry,
        relation=relation,
        moment=walk.worst,
        worst_index=walk.worst_index,
        threshold=residual_threshold(tol, scale),
        windowed=bool(cert.edge.size),
    )
    if report.passed:
        logger.info(f"Certificate verified: {report!r}")
    else:
        logger.warning(f"Certificate failed verification: {report!r}")
    return report
