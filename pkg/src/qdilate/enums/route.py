from enum import Enum


class Route(Enum):
    """
    Which assembly produced (or declined to produce) a certificate.
    """

    COMMUTING_NORMAL = "commuting-normal"
    COMMUTING_UNCERTIFIED = "commuting-uncertified"
    TYPE_I = "type1"
    TYPE_II = "type2"
    TYPE_III = "type3"
    ANTI = "anti"
    SIMILARITY = "similarity"
