"""Exception types shared across the package.

Every error an inner module can raise carries a stable ``kind`` string; the
command line reports it verbatim in its error object.
"""


class ArtifactError(Exception):
    kind = "ArtifactError"

    def __init__(self, detail="", **extra):
        super().__init__(detail)
        self.detail = detail
        self.extra = extra


class NonUnitDeterminant(ArtifactError):
    kind = "NonUnitDeterminant"


class UnboundedPolytope(ArtifactError):
    kind = "UnboundedPolytope"


class NonUnitVertexCoefficient(ArtifactError):
    kind = "NonUnitVertexCoefficient"


class NonOrdinary(ArtifactError):
    kind = "NonOrdinary"


class Supersingular(ArtifactError):
    kind = "Supersingular"


class FieldTooLarge(ArtifactError):
    kind = "FieldTooLarge"


class UnsupportedAmbient(ArtifactError):
    kind = "UnsupportedAmbient"


class NonLaurentResult(ArtifactError):
    kind = "NonLaurentResult"


class BudgetExceeded(ArtifactError):
    """Raised when a computation hits its configured cap.

    ``partial`` holds whatever was computed before the cap was reached.
    """

    kind = "BudgetExceeded"

    def __init__(self, detail="", partial=None, **extra):
        super().__init__(detail, **extra)
        self.partial = partial


class MalformedInput(ArtifactError):
    kind = "MalformedInput"


class PrecisionMismatch(TypeError):
    """Binary operation on residues with different (p, s); a programming error."""
