import numpy as np

from ..enums import AntiKind
from .mat import Mat


def _jsonable(value):
    if isinstance(value, np.generic) and not np.iscomplexobj(value):
        value = value.item()
    if isinstance(value, bool | int | str) or value is None:
        return value
    z = complex(value)
    return [z.real, z.imag]


class AntiReduction:
    """
    Structure data extracted from an anti-commuting tuple.

    Args:
        kind (AntiKind): Branch of the reduction.
        frame (Mat): Basis change; ``frame^-1 T_i frame`` equals ``forms[i]``. Unitary for Schur frames.
        pivot_pair (tuple[int, int] | None): The two members whose pair dilation drives the assembly.
        weights (dict[int, complex]): ``w_j`` with ``T_j = w_j * T_pivot`` for the members carried by a scalar.
        scalars (dict): Named scalars of the branch (``a1``, ``d1``, ``lambda``, ``alpha``, ``beta``, ...).
        forms (list[Mat]): Members expressed in ``frame``.
        roles (tuple[int, ...]): Input index playing each proof role, e.g. ``(T1, T2, T3)`` for triples.
        norm_hypothesis (bool | None): For general triples, whether ``||T1|| <= ||T2 T3||``.
    """

    def __init__(
        self,
        kind: AntiKind,
        frame: Mat,
        pivot_pair: tuple[int, int] | None,
        weights: dict[int, complex],
        scalars: dict,
        forms: list[Mat],
        roles: tuple[int, ...] = (),
        norm_hypothesis: bool | None = None,
    ):
        self.kind = kind
        self.frame = frame
        self.pivot_pair = pivot_pair
        self.weights = weights
        self.scalars = scalars
        self.forms = forms
        self.roles = roles
        self.norm_hypothesis = None if norm_hypothesis is None else bool(norm_hypothesis)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "frame": [[_jsonable(z) for z in row] for row in self.frame],
            "pivot_pair": None if self.pivot_pair is None else list(self.pivot_pair),
            "weights": {str(j): _jsonable(w) for j, w in sorted(self.weights.items())},
            "scalars": {name: _jsonable(v) for name, v in sorted(self.scalars.items())},
            "roles": list(self.roles),
            "norm_hypothesis": self.norm_hypothesis,
        }

    def __repr__(self) -> str:
        return f"AntiReduction(kind={self.kind.value}, pivot_pair={self.pivot_pair}, scalars={self.scalars})"
