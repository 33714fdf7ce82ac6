from collections.abc import Sequence


def _theta(n: int) -> int:
    return n * (n - 1) // 2


class OrderingPlan:
    """
    Grouping of a Type-III tuple used to collect signs of ordered products.

    ``sigma`` lists member indices in four consecutive groups delimited by ``bounds = (i, j, l)``:

    - ``sigma[:i]``: diagonal members with ``alpha = 1`` (scalar maps),
    - ``sigma[i:j]``: diagonal members with ``alpha = -1`` (multiples of ``R_-1``, pivot included),
    - ``sigma[j:l]``: twisted members with ``q_m. = 1`` (multiples of ``T_m``),
    - ``sigma[l:]``: twisted members with ``q_m. = -1`` (multiples of ``R_-1 T_m``).

    Multi-indices passed to the methods are given in ``sigma`` order.
    """

    def __init__(
        self,
        sigma: list[int],
        bounds: tuple[int, int, int],
        c: dict[int, complex],
        w: dict[int, complex],
        m: int,
    ):
        self.sigma = sigma
        self.bounds = bounds
        self.c = c
        self.w = w
        self.m = m

    def _split(self, exps: Sequence[int]) -> tuple[list[int], list[int], list[int], list[int]]:
        if len(exps) != len(self.sigma):
            raise ValueError(f"Expected {len(self.sigma)} exponents, got {len(exps)}")
        i, j, l = self.bounds
        exps = list(exps)
        return exps[:i], exps[i:j], exps[j:l], exps[l:]

    def theta(self, exps: Sequence[int]) -> int:
        return sum(_theta(n) for n in self._split(exps)[3])

    def p(self, exps: Sequence[int]) -> int:
        last = self._split(exps)[3]
        total, running = 0, 0
        for n in last:
            total += running * n
            running += n
        return total

    def t(self, exps: Sequence[int]) -> int:
        _, _, third, last = self._split(exps)
        return sum(third) * sum(last)

    def sign(self, exps: Sequence[int]) -> int:
        return -1 if (self.theta(exps) + self.p(exps) + self.t(exps)) % 2 else 1

    def coefficient(self, exps: Sequence[int]) -> complex:
        """
        ``(-1)^(theta + p + t) * c_sigma * w_sigma``.
        """
        j = self.bounds[1]
        value = complex(self.sign(exps))
        for pos, (idx, n) in enumerate(zip(self.sigma, exps)):
            value *= (self.c[idx] if pos < j else self.w[idx]) ** n
        return value

    def powers(self, exps: Sequence[int]) -> tuple[int, int]:
        """
        Exponents ``(A, B)`` with ``T_sigma^exps = coefficient * R_-1^A T_m^B``.
        """
        _, second, third, last = self._split(exps)
        return sum(second) + sum(last), sum(third) + sum(last)

    def to_dict(self) -> dict:
        return {"sigma": list(self.sigma), "bounds": list(self.bounds), "m": self.m}

    def __repr__(self) -> str:
        return f"OrderingPlan(sigma={self.sigma}, bounds={self.bounds}, m={self.m})"
