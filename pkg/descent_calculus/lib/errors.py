from typing import Any, Optional


class DescentError(ValueError):
    """
    Root of every error raised by the library. `witness` names the first
    element, relation or square that violated the checked condition.
    """

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness

    def __str__(self):
        message = super().__str__()
        if self.witness is None:
            return message
        return f"{message} (witness: {self.witness})"


# finset-core
class InvalidMap(DescentError):
    pass


class DuplicateElement(DescentError):
    pass


class CompositionMismatch(DescentError):
    pass


class NotBijective(DescentError):
    pass


class CodomainMismatch(DescentError):
    pass


class NonCommutingSquare(DescentError):
    pass


class NotCartesian(DescentError):
    pass


class RightEdgeMismatch(DescentError):
    pass


# descent-core
class NotSurjective(DescentError):
    pass


class BaseMismatch(DescentError):
    pass


class InvalidDatum(DescentError):
    pass


class TopEdgeNotProjection(DescentError):
    pass


class CocycleFails(DescentError):
    pass


class RelationViolated(DescentError):
    pass


# galois
class InvalidGroup(DescentError):
    pass


class ActionNotOverS(DescentError):
    pass


class NotGalois(DescentError):
    pass


class GaloisSquareFails(DescentError):
    pass


class IncompatibleAction(DescentError):
    pass


class ResultNotHomomorphism(DescentError):
    pass


# morphisms
class NotOverSPrime(DescentError):
    pass


class NotInvariant(DescentError):
    pass


class InconsistentProblem(DescentError):
    pass


# field-backend
class NotPrime(DescentError):
    pass


class DegreeZero(DescentError):
    pass


class VerificationFailed(DescentError):
    pass


# cli
class ParseError(DescentError):
    pass


class UnresolvedReference(DescentError):
    pass


class PropertyViolation(DescentError):
    pass
