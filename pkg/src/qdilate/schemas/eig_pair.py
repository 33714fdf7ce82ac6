from .mat import Mat


class EigPair2:
    """
    One eigenvalue of a 2x2 matrix together with a unit eigenvector.
    """

    def __init__(self, value: complex, vector: Mat):
        self.value = complex(value)
        self.vector = vector

    def __repr__(self) -> str:
        return f"EigPair2(value={self.value:.6g}, vector={self.vector.tolist()})"
