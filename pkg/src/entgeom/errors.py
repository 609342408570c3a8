"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2); violated
numerical contracts derive from :class:`NumericalContractError` (exit code 3).
"""


class EntgeomError(Exception):
    """Base class for all package errors."""


class InputError(EntgeomError):
    """Malformed user input: files, names, flags."""


class NumericalContractError(EntgeomError):
    """A numerical precondition or postcondition does not hold."""


class DimensionError(InputError):
    pass


class DegenerateInputError(InputError):
    pass


class UnknownStateError(InputError):
    pass


class PartitionError(InputError):
    pass


class StrategyError(InputError):
    pass


class UnitaryError(NumericalContractError):
    pass


class IsometryError(NumericalContractError):
    pass


class NotApplicable(NumericalContractError):
    """The requested quantity is undefined for this input (not a failure of the input)."""


class InfeasibleError(NumericalContractError):
    pass


class NotATriangle(NumericalContractError):
    def __init__(self, msg, edges=None):
        super().__init__(msg)
        self.edges = edges


class FaceInequalityViolation(NumericalContractError):
    def __init__(self, msg, face=None, edges=None):
        super().__init__(msg)
        self.face = face
        self.edges = edges
