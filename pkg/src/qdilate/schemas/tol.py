import logging
import os

logger = logging.getLogger(__name__)

TOL_ENV_VAR = "QDILATE_TOL"


class Tol:
    """
    Tolerance pair used for every numerical comparison.

    A quantity counts as zero at scale ``s`` when it is at most ``abs + rel * s``.
    """

    def __init__(self, rel: float = 1e-9, abs: float = 1e-12):
        if not rel > 0:
            raise ValueError(f"Relative tolerance must be positive, got {rel}")
        if not abs >= 0:
            raise ValueError(f"Absolute tolerance must be non-negative, got {abs}")
        self.rel = float(rel)
        self.abs = float(abs)

    def bound(self, scale: float = 1.0) -> float:
        return self.abs + self.rel * float(scale)

    @classmethod
    def parse(cls, text: str) -> "Tol":
        """
        Parse ``"rel"`` or ``"rel,abs"``.
        """
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if len(parts) == 1:
            return cls(rel=float(parts[0]))
        if len(parts) == 2:
            return cls(rel=float(parts[0]), abs=float(parts[1]))
        raise ValueError(f"Cannot parse tolerance {text!r}, expected 'rel' or 'rel,abs'")

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "Tol":
        """
        Default tolerance, overridden by the ``QDILATE_TOL`` environment variable when set.
        """
        env = os.environ if environ is None else environ
        raw = env.get(TOL_ENV_VAR)
        if not raw:
            return cls()
        logger.debug(f"Tolerance taken from {TOL_ENV_VAR}={raw!r}")
        return cls.parse(raw)

    def to_dict(self) -> dict[str, float]:
        return {"rel": self.rel, "abs": self.abs}

    def __eq__(self, other) -> bool:
        return isinstance(other, Tol) and self.rel == other.rel and self.abs == other.abs

    def __repr__(self) -> str:
        return f"Tol(rel={self.rel:g}, abs={self.abs:g})"
