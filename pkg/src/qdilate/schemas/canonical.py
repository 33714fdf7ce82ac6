import numpy as np

from ..enums import Verdict
from .mat import Mat


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


class CanonicalForm:
    """
    Canonical data of a non-commuting q-commuting tuple of 2x2 contractions.

    In the canonical basis every member of ``eta1`` is ``diag(c_i, f_i)`` and every twisted member
    is ``[[0, d_j], [e_j, 0]]``. The pivot is ``diag(a, r a)``. Subclasses pin down which of
    ``d_j`` / ``e_j`` may be non-zero.
    """

    verdict: Verdict = Verdict.COMMUTING

    def __init__(
        self,
        k: int,
        pivot: int,
        a: complex,
        r: complex,
        eta1: tuple[int, ...],
        eta_twist: tuple[int, ...],
        c: dict[int, complex],
        f: dict[int, complex],
        d: dict[int, complex],
        e: dict[int, complex],
    ):
        self.k = k
        self.pivot = int(pivot)
        self.a = complex(a)
        self.r = complex(r)
        self.eta1 = tuple(sorted(int(i) for i in eta1))
        self.eta_twist = tuple(sorted(int(j) for j in eta_twist))
        self.c = {i: complex(v) for i, v in c.items()}
        self.f = {i: complex(v) for i, v in f.items()}
        self.d = {j: complex(v) for j, v in d.items()}
        self.e = {j: complex(v) for j, v in e.items()}

    @property
    def alpha(self) -> dict[int, complex]:
        """
        Twist ``alpha_i = f_i / c_i`` of each diagonal member.
        """
        return {i: self.f[i] / self.c[i] for i in self.eta1}

    def form(self, i: int) -> Mat:
        if i in self.c:
            return np.diag([self.c[i], self.f[i]]).astype(np.complex128)
        return np.array([[0, self.d[i]], [self.e[i], 0]], dtype=np.complex128)

    def forms(self) -> list[Mat]:
        return [self.form(i) for i in range(self.k)]

    def adjoint(self) -> "CanonicalForm":
        """
        Canonical data of the adjoint tuple in the same basis (valid when that basis is orthonormal).
        """
        cls = _ADJOINT_CLASS[self.verdict]
        return cls(
            self.k,
            self.pivot,
            self.a.conjugate(),
            self.r.conjugate(),
            self.eta1,
            self.eta_twist,
            {i: v.conjugate() for i, v in self.c.items()},
            {i: v.conjugate() for i, v in self.f.items()},
            {j: self.e[j].conjugate() for j in self.eta_twist},
            {j: self.d[j].conjugate() for j in self.eta_twist},
        )

    def to_dict(self) -> dict:
        return {
            "type": self.verdict.value,
            "pivot": self.pivot,
            "a": _pair(self.a),
            "r": _pair(self.r),
            "eta1": list(self.eta1),
            "eta_twist": list(self.eta_twist),
            "diagonal": {str(i): [_pair(self.c[i]), _pair(self.f[i])] for i in self.eta1},
            "alpha": {str(i): _pair(v) for i, v in self.alpha.items()},
            "twisted": {str(j): [_pair(self.d[j]), _pair(self.e[j])] for j in self.eta_twist},
        }

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(pivot={self.pivot}, a={self.a:.4g}, r={self.r:.4g}, "
            f"eta1={self.eta1}, eta_twist={self.eta_twist})"
        )


class CanonicalTypeI(CanonicalForm):
    """Twisted members ``[[0, 0], [e_j, 0]]``, ``T_1 T_j = r T_j T_1``."""

    verdict = Verdict.TYPE_I


class CanonicalTypeII(CanonicalForm):
    """Twisted members ``[[0, d_j], [0, 0]]``, ``T_1 T_j = conj(r) T_j T_1``."""

    verdict = Verdict.TYPE_II


class CanonicalTypeIII(CanonicalForm):
    """Pivot ``diag(a, -a)``, twisted members ``[[0, d_j], [e_j, 0]]``, ``alpha_i`` in ``{1, -1}``."""

    verdict = Verdict.TYPE_III

    @property
    def lower_only(self) -> bool:
        return bool(self.eta_twist) and all(self.d[j] == 0 for j in self.eta_twist)

    @property
    def upper_only(self) -> bool:
        return bool(self.eta_twist) and all(self.e[j] == 0 for j in self.eta_twist)


_ADJOINT_CLASS: dict[Verdict, type[CanonicalForm]] = {
    Verdict.TYPE_I: CanonicalTypeII,
    Verdict.TYPE_II: CanonicalTypeI,
    Verdict.TYPE_III: CanonicalTypeIII,
}
