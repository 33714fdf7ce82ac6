import numpy as np

from ..enums import Verdict
from .canonical import CanonicalForm
from .diag_partition import DiagPartition
from .mat import Mat
from .q_family import QFamily


class ClassificationReport:
    """
    Result of classifying a q-commuting tuple.

    ``P`` maps canonical coordinates to the input coordinates: ``P^-1 T_i P`` is the canonical
    form of member ``i``. ``reason`` is a machine readable trace of the forcing result or case that fired.
    """

    def __init__(
        self,
        verdict: Verdict,
        P: Mat,
        canonical: CanonicalForm | None,
        unitarily_equivalent: bool,
        reason: list[str],
        partition: DiagPartition | None = None,
        q: QFamily | None = None,
    ):
        self.verdict = verdict
        self.P = P
        self.canonical = canonical
        self.unitarily_equivalent = bool(unitarily_equivalent)
        self.reason = reason
        self.partition = partition
        self.q = q

    @property
    def P_inv(self) -> Mat:
        return np.linalg.inv(self.P)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "P": [[[float(z.real), float(z.imag)] for z in row] for row in self.P],
            "unitarily_equivalent": self.unitarily_equivalent,
            "reason": list(self.reason),
            "canonical": None if self.canonical is None else self.canonical.to_dict(),
            "partition": None if self.partition is None else self.partition.to_dict(),
            "q": None if self.q is None else self.q.to_dict(),
        }

    def __repr__(self) -> str:
        temp = " ----- ClassificationReport ----\r\n"
        temp += f"Verdict: {self.verdict.value}\r\n"
        temp += f"Unitarily equivalent: {self.unitarily_equivalent}\r\n"
        temp += f"Reason: {', '.join(self.reason)}\r\n"
        if self.canonical is not None:
            temp += f"Canonical: {self.canonical!r}\r\n"
        return temp
