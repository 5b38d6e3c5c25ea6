"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PlumbError(Exception):
    """Base class for computation errors (CLI exit code 1)."""

    code = "error"

    def to_json(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


# plumbing
class GraphError(PlumbError, ValueError):
    pass


class NotCoprime(GraphError):
    pass


class TooFewFibers(GraphError):
    pass


class InvalidSeifertPair(GraphError):
    pass


class NotBlowdownable(GraphError):
    pass


class NotNegativeDefinite(GraphError):
    pass


# spinc
class NotSelfConjugate(PlumbError, ValueError):
    pass


# lattice homology
class RegionTooLarge(PlumbError):
    pass


class TruncationTooSmall(PlumbError):
    pass


class NotAPath(PlumbError, ValueError):
    pass


class VerificationFailed(PlumbError):
    pass


# graded roots
class RootError(PlumbError, ValueError):
    pass


class GradingCosetMismatch(RootError):
    pass


class CertificationFailed(RootError):
    pass


class IncompleteRoot(RootError):
    pass


# spectrum models
class CutTooHigh(PlumbError, ValueError):
    pass


class NotSymmetric(PlumbError, ValueError):
    pass


class InconsistentDirections(PlumbError, ValueError):
    pass


class NotTypeSWF(PlumbError, ValueError):
    pass


# K-theory
class HypothesisViolated(PlumbError, ValueError):
    pass


class NotNormalized(PlumbError, ValueError):
    pass


class NotProjective(PlumbError, ValueError):
    pass


class ExactHypothesisViolated(PlumbError, ValueError):
    pass


# input parsing
class ParseError(PlumbError, ValueError):
    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location

    def to_json(self) -> dict:
        d = super().to_json()
        if self.location is not None:
            d["location"] = self.location
        return d


class ValidationError(GraphError):
    pass
