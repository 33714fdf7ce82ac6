import numpy as np

from .mat import Mat


class SimilarityPlan:
    """
    Invertible change of basis ``P`` with ``beta = ||P^-1|| ||P||``.
    """

    def __init__(self, P: Mat):
        self.P = np.asarray(P, dtype=np.complex128)
        s = np.linalg.svd(self.P, compute_uv=False)
        if s[-1] <= 0:
            raise ValueError("Similarity basis is singular")
        self.beta = float(s[0] / s[-1])

    def transform(self, T: list[Mat]) -> list[Mat]:
        """
        Members in the new basis, ``P^-1 T_i P``.
        """
        P_inv = np.linalg.inv(self.P)
        return [P_inv @ Ti @ self.P for Ti in T]

    def to_dict(self) -> dict:
        return {
            "P": [[[float(z.real), float(z.imag)] for z in row] for row in self.P],
            "beta": self.beta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimilarityPlan":
        return cls(np.array([[complex(*z) for z in row] for row in data["P"]], dtype=np.complex128))

    def __repr__(self) -> str:
        return f"SimilarityPlan(beta={self.beta:.6g})"
