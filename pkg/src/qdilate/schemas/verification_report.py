class VerificationReport:
    """
    Residuals recomputed from a certificate by the brute-force oracle.

    Every residual is an absolute norm: Frobenius for ``U_i^* U_i - I`` and the relations, spectral
    for ``V^* V - I`` and for each compressed moment.
    """

    def __init__(
        self,
        degree: int,
        grid_size: int,
        unitarity: float,
        isometry: float,
        relation: float,
        moment: float,
        worst_index: tuple[int, ...] | None,
        threshold: float,
        windowed: bool = False,
    ):
        self.degree = int(degree)
        self.grid_size = int(grid_size)
        self.unitarity = float(unitarity)
        self.isometry = float(isometry)
        self.relation = float(relation)
        self.moment = float(moment)
        self.worst_index = None if worst_index is None else tuple(int(x) for x in worst_index)
        self.threshold = float(threshold)
        self.windowed = bool(windowed)

    @property
    def max_residual(self) -> float:
        return max(self.unitarity, self.isometry, self.relation, self.moment)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.threshold)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "grid_size": self.grid_size,
            "unitarity": self.unitarity,
            "isometry": self.isometry,
            "relation": self.relation,
            "moment": self.moment,
            "worst_index": None if self.worst_index is None else list(self.worst_index),
            "threshold": self.threshold,
            "windowed": self.windowed,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "VerificationReport":
        worst = data.get("worst_index")
        return cls(
            int(data["degree"]),
            int(data["grid_size"]),
            float(data["unitarity"]),
            float(data["isometry"]),
            float(data["relation"]),
            float(data["moment"]),
            None if worst is None else tuple(int(x) for x in worst),
            float(data["threshold"]),
            bool(data.get("windowed", False)),
        )

    def __repr__(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"VerificationReport({status}, degree={self.degree}, grid={self.grid_size}, "
            f"unitarity={self.unitarity:.2e}, isometry={self.isometry:.2e}, "
            f"relation={self.relation:.2e}, moment={self.moment:.2e})"
        )
