from ..enums import Route
from .anti_reduction import AntiReduction
from .classification_report import ClassificationReport
from .dilation_certificate import DilationCertificate


class DilationOutcome:
    """
    What the general dispatcher did with a tuple.
    """

    def __init__(
        self,
        route: Route,
        certificate: DilationCertificate | None,
        classification: ClassificationReport | None = None,
        anti: AntiReduction | None = None,
        note: str = "",
    ):
        self.route = route
        self.certificate = certificate
        self.classification = classification
        self.anti = anti
        self.note = note

    @property
    def similarity(self):
        return None if self.certificate is None else self.certificate.similarity

    def to_dict(self) -> dict:
        return {
            "route": self.route.value,
            "note": self.note,
            "classification": None if self.classification is None else self.classification.to_dict(),
            "anti": None if self.anti is None else self.anti.to_dict(),
            "similarity": None if self.similarity is None else self.similarity.to_dict(),
            "report": None
            if self.certificate is None or self.certificate.report is None
            else self.certificate.report.to_dict(),
        }

    def __repr__(self) -> str:
        return f"DilationOutcome(route={self.route.value}, certificate={self.certificate!r}, note={self.note!r})"
