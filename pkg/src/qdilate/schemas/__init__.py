from .anti_reduction import AntiReduction
from .canonical import CanonicalForm, CanonicalTypeI, CanonicalTypeII, CanonicalTypeIII
from .classification_report import ClassificationReport
from .diag_partition import DiagPartition
from .dilation_certificate import DilationCertificate
from .dilation_outcome import DilationOutcome
from .eig_pair import EigPair2
from .mat import Mat
from .ordering_plan import OrderingPlan
from .q_family import QEntry, QFamily
from .similarity_plan import SimilarityPlan
from .tol import Tol
from .truncation_config import RING_MARGIN, TruncationConfig
from .verification_report import VerificationReport

__all__ = [
    "AntiReduction",
    "CanonicalForm",
    "CanonicalTypeI",
    "CanonicalTypeII",
    "CanonicalTypeIII",
    "ClassificationReport",
    "DiagPartition",
    "DilationCertificate",
    "DilationOutcome",
    "EigPair2",
    "Mat",
    "OrderingPlan",
    "QEntry",
    "QFamily",
    "RING_MARGIN",
    "SimilarityPlan",
    "Tol",
    "TruncationConfig",
    "VerificationReport",
]
