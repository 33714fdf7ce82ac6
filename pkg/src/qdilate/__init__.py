from .anti import reduce_anti
from .classify import classify, strip_zeros
from .corpus import demo_corpus, epsilon_triple, generate
from .documents import CertificateDocument, TupleDocument
from .pairdilate import dilate_pair, q_ando, schaffer
from .qrel import detect_family, detect_q, is_doubly_q
from .schemas import DilationCertificate, DilationOutcome, QFamily, Tol, TruncationConfig
from .tupledilate import dilate_anti, dilate_general, dilate_type1, dilate_type2, dilate_type3
from .verify import verify_certificate

__all__ = [
    "CertificateDocument",
    "DilationCertificate",
    "DilationOutcome",
    "QFamily",
    "Tol",
    "TruncationConfig",
    "TupleDocument",
    "classify",
    "demo_corpus",
    "detect_family",
    "detect_q",
    "dilate_anti",
    "dilate_general",
    "dilate_pair",
    "dilate_type1",
    "dilate_type2",
    "dilate_type3",
    "epsilon_triple",
    "generate",
    "is_doubly_q",
    "q_ando",
    "reduce_anti",
    "schaffer",
    "strip_zeros",
    "verify_certificate",
]
