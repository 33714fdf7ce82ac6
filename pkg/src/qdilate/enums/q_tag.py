from enum import Enum


class QTag(Enum):
    """
    Status of a detected relation constant for one pair.
    """

    """
    ``Ti Tj = q Tj Ti`` with a unimodular ``q``.
    """
    EXACT = "Exact"

    """
    Both products vanish, so any constant fits.
    """
    UNCONSTRAINED = "Unconstrained"
