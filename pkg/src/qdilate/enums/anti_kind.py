from enum import Enum


class AntiKind(Enum):
    """
    Structural branch taken by the anti-commuting reduction.
    """

    NILPOTENT = "Nilpotent"
    NON_INVERTIBLE = "NonInvertible"
    NORMAL_TRIPLE = "NormalTriple"
    GENERAL_TRIPLE = "GeneralTriple"

    """
    One or two invertible members; dilated directly as a pair.
    """
    INVERTIBLE_PAIR = "InvertiblePair"

    """
    All pairwise products vanish; the tuple is commuting and nothing is left to reduce.
    """
    COMMUTING = "Commuting"
