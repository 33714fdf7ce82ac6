import math
from collections.abc import Iterable

from ..enums import DilationMode

# Main rings are built with at least this many blocks beyond the certified degree.
RING_MARGIN = 2


class TruncationConfig:
    """
    Finite truncation of a dilation space.

    Args:
        N (int): Moment degree to certify.
        M (int | None): Ring/window block count, defaults to ``N + 2``.
        mode (DilationMode): Cyclic (exact relations everywhere) or Windowed (exact on the window).
    """

    def __init__(self, N: int = 5, M: int | None = None, mode: DilationMode = DilationMode.CYCLIC):
        if N < 0:
            raise ValueError(f"Moment degree must be non-negative, got {N}")
        if M is None:
            M = N + RING_MARGIN
        if M < N + RING_MARGIN:
            raise ValueError(f"Ring with {M} blocks cannot certify degree {N}, need at least {N + RING_MARGIN}")
        self.N = N
        self.M = M
        self.mode = mode

    @classmethod
    def for_degree(
        cls, N: int, orders: Iterable[int | None] = (), mode: DilationMode | None = None, M: int | None = None
    ) -> "TruncationConfig":
        """
        Pick the ring length for degree ``N``.

        The ring is ``M`` blocks long (``N + 2`` by default). Cyclic mode is chosen when every twist
        constant snapped to a root of unity and the length is rounded up to a multiple of the lcm of
        the orders. Any unsnapped constant, or an explicit Windowed request, yields Windowed mode
        without rounding.

        Raises:
            ValueError: The resulting ring is shorter than ``N + 2``.
        """
        orders = list(orders)
        base = N + RING_MARGIN if M is None else M
        if mode == DilationMode.WINDOWED or any(o is None for o in orders):
            return cls(N, base, DilationMode.WINDOWED)
        period = math.lcm(*[int(o) for o in orders]) if orders else 1
        return cls(N, -(-base // period) * period, DilationMode.CYCLIC)

    def admits(self, order: int | None) -> bool:
        """
        Whether a twist of the given order closes exactly on this ring.
        """
        return order is not None and self.M % order == 0

    def with_mode(self, mode: DilationMode) -> "TruncationConfig":
        return TruncationConfig(self.N, self.M, mode)

    def to_dict(self) -> dict:
        return {"N": self.N, "M": self.M, "mode": self.mode.value}

    @classmethod
    def from_dict(cls, data: dict) -> "TruncationConfig":
        return cls(int(data["N"]), int(data["M"]), DilationMode(data["mode"]))

    def __eq__(self, other) -> bool:
        return isinstance(other, TruncationConfig) and (self.N, self.M, self.mode) == (other.N, other.M, other.mode)

    def __repr__(self) -> str:
        return f"TruncationConfig(N={self.N}, M={self.M}, mode={self.mode.value})"
