from enum import Enum


class Verdict(Enum):
    """
    Outcome of classifying a q-commuting tuple of 2x2 contractions.
    """

    """
    Every pair commutes. No canonical basis is reported.
    """
    COMMUTING = "Commuting"

    """
    Diagonal members plus strictly lower-triangular twisted members, r != -1.
    """
    TYPE_I = "TypeI"

    """
    Diagonal members plus strictly upper-triangular twisted members, r != -1.
    """
    TYPE_II = "TypeII"

    """
    Pivot diag(a, -a); the twisted members are anti-diagonal.
    """
    TYPE_III = "TypeIII"
