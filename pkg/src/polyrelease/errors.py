"""Exception types raised across the package."""


class ReleaseError(Exception):
    """Base class for all errors raised by polyrelease."""


class IndexSpaceTooLarge(ReleaseError):
    pass


class DimensionError(ReleaseError, ValueError):
    pass


class DegreeOverflowError(ReleaseError, ValueError):
    pass


class InfeasibleError(ReleaseError):
    """The exact (equality) part of an LP fit admits no solution."""


class IllConditionedError(ReleaseError):
    """The LP solver broke down numerically; refit in a better basis."""


class ExplicitPathError(ReleaseError):
    """The explicit threshold construction failed its band verification."""


class IndexSetViolation(ReleaseError, ValueError):
    pass


class ContractError(ReleaseError, ValueError):
    pass


class ApproximationFloorError(ReleaseError, ValueError):
    """Requested accuracy is at or below the approximation error gamma."""


class AuditScaleError(ReleaseError):
    """An exhaustive enumeration would exceed its configured cap."""


class FamilyMismatchError(ReleaseError, ValueError):
    pass


class ParseError(ReleaseError, ValueError):
    def __init__(self, message, line=None, position=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.position = position
