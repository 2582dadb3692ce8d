"""Exception hierarchy with machine-readable codes.

Every error raised by the library derives from :class:`WSigmaError`; the
``code`` attribute is the stable identifier used in CLI reports.  Errors
that signal bad user input subclass :class:`ValidationError` (CLI exit 1),
errors that signal a failed numerical identity subclass
:class:`VerificationError` (CLI exit 2).
"""

from __future__ import annotations


class WSigmaError(Exception):
    code = "WSigmaError"

    def __init__(self, message: str = "", **details):
        super().__init__(message or self.code)
        self.details = details

    def to_dict(self) -> dict:
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: str(v) for k, v in self.details.items()}
        return out


class ValidationError(WSigmaError):
    code = "ValidationError"


class VerificationError(WSigmaError):
    code = "VerificationError"


def _make(name: str, base: type) -> type:
    return type(name, (base,), {"code": name})


# input / precondition problems
EmptyGenerators = _make("EmptyGenerators", ValidationError)
NonCoprimeGenerators = _make("NonCoprimeGenerators", ValidationError)
GenusZero = _make("GenusZero", ValidationError)
IndexOutOfRange = _make("IndexOutOfRange", ValidationError)
NotCoprime = _make("NotCoprime", ValidationError)
InconsistentDh = _make("InconsistentDh", ValidationError)
TooFewVariables = _make("TooFewVariables", ValidationError)
DegreeBoundViolated = _make("DegreeBoundViolated", ValidationError)
SingularAffineModel = _make("SingularAffineModel", ValidationError)
UnsupportedCurveClass = _make("UnsupportedCurveClass", ValidationError)
CoincidentFiber = _make("CoincidentFiber", ValidationError)
CoincidentPoints = _make("CoincidentPoints", ValidationError)
PathThroughSingularity = _make("PathThroughSingularity", ValidationError)
EvaluationAtRamification = _make("EvaluationAtRamification", ValidationError)
NotPositiveDefinite = _make("NotPositiveDefinite", ValidationError)
ConfigError = _make("ConfigError", ValidationError)
PointNotOnCurve = _make("PointNotOnCurve", ValidationError)

# series engine
LogTermError = _make("LogTermError", ValidationError)
OrderUnderflow = _make("OrderUnderflow", ValidationError)

# numerical / identity failures
SubstitutionCollision = _make("SubstitutionCollision", VerificationError)
IdentityFailure = _make("IdentityFailure", VerificationError)
RootFindingFailure = _make("RootFindingFailure", VerificationError)
RHViolation = _make("RHViolation", VerificationError)
NewtonStall = _make("NewtonStall", VerificationError)
GapMismatch = _make("GapMismatch", VerificationError)
RankDeficiency = _make("RankDeficiency", VerificationError)
QuadratureNonConvergence = _make("QuadratureNonConvergence", VerificationError)
SymplecticViolation = _make("SymplecticViolation", VerificationError)
AmbiguousCharacteristic = _make("AmbiguousCharacteristic", VerificationError)
SuiteFailure = _make("SuiteFailure", VerificationError)
