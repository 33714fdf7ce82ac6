class DiagPartition:
    """
    Split of tuple indices into diagonalizable (``lambda1``) and non-diagonalizable (``lambda2``) members.
    """

    def __init__(self, lambda1: tuple[int, ...], lambda2: tuple[int, ...]):
        if set(lambda1) & set(lambda2):
            raise ValueError("Partition blocks must be disjoint")
        self.lambda1 = tuple(sorted(lambda1))
        self.lambda2 = tuple(sorted(lambda2))

    def to_dict(self) -> dict:
        return {"lambda1": list(self.lambda1), "lambda2": list(self.lambda2)}

    def __repr__(self) -> str:
        return f"DiagPartition(lambda1={self.lambda1}, lambda2={self.lambda2})"
