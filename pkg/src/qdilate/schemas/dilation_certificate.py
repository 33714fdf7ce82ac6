import numpy as np
from scipy import sparse

from .mat import Mat
from .q_family import QFamily
from .similarity_plan import SimilarityPlan
from .truncation_config import TruncationConfig
from .verification_report import VerificationReport


class DilationCertificate:
    """
    Finite unitaries ``U`` and an isometry ``V`` whose ordered compressions reproduce a tuple.

    The certified identity is ``target^m = V^* (s_1 U_1)^m_1 ... (s_k U_k)^m_k V`` for every
    multi-index of total degree at most ``cfg.N``, where ``s`` are the member ``scales`` (all 1 for
    a plain dilation) and ``target`` is the input tuple, or ``P^-1 T P`` when ``similarity`` is set.

    ``edge`` lists the basis indices excluded from the relation window in Windowed mode.
    """

    def __init__(
        self,
        U: list[sparse.csr_array],
        V: Mat,
        q_out: QFamily,
        cfg: TruncationConfig,
        report: VerificationReport | None = None,
        edge: np.ndarray | None = None,
        q_in: QFamily | None = None,
        scales: list[complex] | None = None,
        similarity: SimilarityPlan | None = None,
    ):
        self.U = [sparse.csr_array(u, dtype=np.complex128) for u in U]
        self.V = np.asarray(V, dtype=np.complex128)
        self.q_out = q_out
        self.cfg = cfg
        self.report = report
        self.edge = np.zeros(0, dtype=np.int64) if edge is None else np.unique(np.asarray(edge, dtype=np.int64))
        self.q_in = q_in
        self.scales = [complex(s) for s in scales] if scales is not None else [1.0 + 0j] * len(self.U)
        self.similarity = similarity

    @property
    def k(self) -> int:
        return len(self.U)

    @property
    def dim(self) -> int:
        return int(self.V.shape[0])

    def window(self) -> np.ndarray:
        """
        Indices of the basis vectors on which the relations are certified.
        """
        mask = np.ones(self.dim, dtype=bool)
        mask[self.edge] = False
        return np.flatnonzero(mask)

    def __repr__(self) -> str:
        return f"DilationCertificate(k={self.k}, dim={self.dim}, cfg={self.cfg!r}, report={self.report!r})"
