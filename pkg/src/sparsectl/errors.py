"""Exception types raised by the toolkit."""


class ToolkitError(Exception):
    """Base class for all sparsectl errors."""


class InvalidInputError(ToolkitError, ValueError):
    """An argument violates a documented precondition."""


class DimensionError(InvalidInputError):
    """Matrix or vector dimensions are inconsistent."""


class RankDeficiencyError(ToolkitError):
    """The input matrix B does not have full column rank (or B'B is
    numerically singular)."""


class AssumptionError(ToolkitError):
    """The plant fails a structural assumption required for synthesis."""


class InfeasibilityError(ToolkitError):
    """No feasible gain or probability exists for the requested target."""


class PlantFormatError(ToolkitError):
    """A plant (or plan) file failed to parse or validate."""
