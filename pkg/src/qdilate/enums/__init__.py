from .anti_kind import AntiKind
from .dilation_mode import DilationMode
from .q_tag import QTag
from .route import Route
from .verdict import Verdict

__all__ = [
    "AntiKind",
    "DilationMode",
    "QTag",
    "Route",
    "Verdict",
]
