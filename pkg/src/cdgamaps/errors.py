"""Exception hierarchy shared by all modules."""


class CDGAError(Exception):
    """Base class for every error raised by cdgamaps."""


class MixedAlgebra(CDGAError):
    pass


class DegreeOutOfRange(CDGAError):
    pass


class ValidationError(CDGAError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingWeights(CDGAError):
    pass


class WeightInhomogeneousDifferential(CDGAError):
    pass


class NotExact(CDGAError):
    """The element handed to an antiderivative solver is not a coboundary."""


class InvalidMap(ValidationError):
    pass


class InvalidEta(ValidationError):
    pass


class BaseMismatch(CDGAError):
    pass


class LevelMismatch(CDGAError):
    pass


class InvalidProblem(ValidationError):
    pass


class NonzeroObstruction(CDGAError):
    def __init__(self, message, obstruction=None):
        super().__init__(message)
        self.obstruction = obstruction


class HomotopyUndecided(CDGAError):
    """Raised when a residual class could only be killed by corrections we do not search."""


class NotInW(CDGAError):
    pass


class UnknownSchema(CDGAError):
    pass


class DegenerateDirection(CDGAError):
    pass


class DimensionTooLarge(CDGAError):
    pass


class SearchWindowExceeded(CDGAError):
    pass


class UnboundedPreimage(CDGAError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
