"""Exception hierarchy shared by the whole package."""


class MpsxError(Exception):
    """Base class; ``exit_code`` is what the command line returns for it."""

    exit_code = 1


class InvalidInput(MpsxError):
    exit_code = 2


class CapExceeded(MpsxError):
    exit_code = 6

    def __init__(self, message, bound=None):
        super().__init__(message)
        self.bound = bound


class StructureUncertain(MpsxError):
    exit_code = 3

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})


class InvalidMode(MpsxError):
    exit_code = 2


class InconsistentBasis(MpsxError):
    exit_code = 3


class Undecided(MpsxError):
    exit_code = 3

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotStable(MpsxError):
    exit_code = 4

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NotTI(MpsxError):
    exit_code = 5

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InvalidALow(MpsxError):
    exit_code = 2


class RlsSyntaxError(MpsxError):
    exit_code = 2

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class SectorConflict(MpsxError):
    exit_code = 2


class NotEquivalent(MpsxError):
    exit_code = 2


class RelationNotFound(MpsxError):
    exit_code = 3

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals or {})
