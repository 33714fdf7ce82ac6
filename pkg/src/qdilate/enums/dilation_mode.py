from enum import Enum


class DilationMode(Enum):
    """
    How a finite ring is closed.

    Both modes produce exactly unitary operators whose compressions reproduce every
    moment up to the certified degree.
    """

    """
    Relations hold exactly on the whole dilation space. Needs every twist constant to be
    a root of unity whose order divides the ring length.
    """
    CYCLIC = "cyclic"

    """
    Relations hold exactly on the window, i.e. after compressing away the recorded edge
    block of the ring.
    """
    WINDOWED = "windowed"
