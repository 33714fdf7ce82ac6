import cmath
from collections.abc import Iterator

from ..enums import QTag


class QEntry:
    """
    Relation constant of a single ordered pair ``(i, j)``: ``Ti Tj = q Tj Ti``.

    ``snapped`` holds the nearby root of unity ``exp(2 pi i p / order)`` when one was found;
    consumers that need exact periodicity use :attr:`effective`.
    """

    def __init__(
        self,
        tag: QTag,
        value: complex | None = None,
        snapped: complex | None = None,
        order: int | None = None,
    ):
        if tag == QTag.EXACT and value is None:
            raise ValueError("An exact relation entry needs a value")
        if tag == QTag.UNCONSTRAINED and value is not None:
            raise ValueError("An unconstrained relation entry carries no value")
        self.tag = tag
        self.value = None if value is None else complex(value)
        self.snapped = None if snapped is None else complex(snapped)
        self.order = order

    @classmethod
    def exact(cls, value: complex, snapped: complex | None = None, order: int | None = None) -> "QEntry":
        return cls(QTag.EXACT, value, snapped, order)

    @classmethod
    def unconstrained(cls) -> "QEntry":
        return cls(QTag.UNCONSTRAINED)

    @property
    def is_exact(self) -> bool:
        return self.tag == QTag.EXACT

    @property
    def effective(self) -> complex | None:
        if self.snapped is not None:
            return self.snapped
        return self.value

    def constant(self, default: complex = 1.0) -> complex:
        """
        The value a consumer should use, with ``default`` standing in for unconstrained pairs.
        """
        eff = self.effective
        return complex(default) if eff is None else eff

    def inverse(self) -> "QEntry":
        """
        Entry for the reversed pair, ``q_ji = q_ij^-1``.
        """
        if not self.is_exact:
            return QEntry.unconstrained()
        assert self.value is not None
        snapped = None if self.snapped is None else 1 / self.snapped
        return QEntry.exact(1 / self.value, snapped, self.order)

    def to_dict(self) -> dict:
        out: dict = {"tag": self.tag.value}
        if self.value is not None:
            out["value"] = [self.value.real, self.value.imag]
        if self.snapped is not None:
            out["snapped"] = [self.snapped.real, self.snapped.imag]
            out["order"] = self.order
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "QEntry":
        tag = QTag(data["tag"])
        value = complex(*data["value"]) if "value" in data else None
        snapped = complex(*data["snapped"]) if "snapped" in data else None
        return cls(tag, value, snapped, data.get("order"))

    def __repr__(self) -> str:
        if not self.is_exact:
            return "Unconstrained"
        assert self.value is not None
        if self.order is not None:
            p = round(cmath.phase(self.snapped or self.value) / (2 * cmath.pi) * self.order) % self.order
            return f"Exact(exp(2pi i {p}/{self.order}))"
        return f"Exact({self.value:.6g})"


class QFamily:
    """
    The table of relation constants ``{q_ij}`` of a ``k``-tuple, stored for ``i < j``.
    Lookups with ``i > j`` return the inverse entry.
    """

    def __init__(self, k: int, table: dict[tuple[int, int], QEntry] | None = None):
        self.k = k
        self.table: dict[tuple[int, int], QEntry] = {}
        for (i, j), entry in (table or {}).items():
            self.put(i, j, entry)

    def put(self, i: int, j: int, entry: QEntry):
        if i == j or not (0 <= i < self.k and 0 <= j < self.k):
            raise IndexError(f"Invalid pair ({i}, {j}) for a family of length {self.k}")
        if i < j:
            self.table[(i, j)] = entry
        else:
            self.table[(j, i)] = entry.inverse()

    def get(self, i: int, j: int) -> QEntry:
        if i == j:
            return QEntry.exact(1.0, 1.0, 1)
        if i < j:
            return self.table[(i, j)]
        return self.table[(j, i)].inverse()

    def constant(self, i: int, j: int, default: complex = 1.0) -> complex:
        return self.get(i, j).constant(default)

    def pairs(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.table))

    def orders(self) -> set[int | None]:
        """
        Orders of the exact entries; ``None`` marks an entry that did not snap to a root of unity.
        """
        return {e.order for e in self.table.values() if e.is_exact}

    def values(self) -> set[complex]:
        """
        Effective constants of the exact entries.
        """
        return {e.effective for e in self.table.values() if e.is_exact and e.effective is not None}

    def reindexed(self, order: list[int]) -> "QFamily":
        """
        Family of the tuple ``(T[order[0]], T[order[1]], ...)``.
        """
        out = QFamily(len(order))
        for a, i in enumerate(order):
            for b, j in enumerate(order):
                if a < b:
                    out.put(a, b, self.get(i, j))
        return out

    def to_dict(self) -> dict:
        return {"k": self.k, "table": [[i, j, e.to_dict()] for (i, j), e in sorted(self.table.items())]}

    @classmethod
    def from_dict(cls, data: dict) -> "QFamily":
        fam = cls(int(data["k"]))
        for i, j, entry in data["table"]:
            fam.put(int(i), int(j), QEntry.from_dict(entry))
        return fam

    def __repr__(self) -> str:
        body = ", ".join(f"q{i}{j}={e!r}" for (i, j), e in sorted(self.table.items()))
        return f"QFamily(k={self.k}, {body})"
