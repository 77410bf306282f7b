"""Exception hierarchy.

Every error carries an optional ``witness`` so callers (and the CLI) can show
the offending elements, pairs or rows.
"""


class PdelError(Exception):
    exit_code = 1

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class ValidationError(PdelError):
    exit_code = 1


class NotAPartialOrder(ValidationError):
    pass


class JoinMeetMissing(ValidationError):
    pass


class NotDistributive(ValidationError):
    pass


class DegenerateQuotient(ValidationError):
    pass


class OutOfDomain(ValidationError):
    pass


class MemberNotInPhi(ValidationError):
    pass


class AmbiguousPrecondition(ValidationError):
    pass


class EmptyUpdate(ValidationError):
    pass


class NotAForest(ValidationError):
    pass


class ForestViolation(NotAForest):
    pass


class UnsupportedConnective(ValidationError):
    pass


class UnknownEventName(ValidationError):
    pass


class UnknownAtom(ValidationError):
    pass


class MissingMeasure(ValidationError):
    pass


class UninterpretedSubformula(ValidationError):
    pass


class CyclicEventReference(ValidationError):
    pass


class NonTermination(PdelError):
    exit_code = 1


class FormulaSyntaxError(PdelError):
    exit_code = 2

    def __init__(self, message: str, position: int, text: str = ""):
        super().__init__(f"{message} at position {position}", witness=position)
        self.position = position
        self.text = text


class InputError(PdelError):
    """Malformed input file."""

    exit_code = 2


class Infeasible(PdelError):
    exit_code = 3
