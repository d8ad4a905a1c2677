"""Exception hierarchy shared by every gardenia module."""


class GardeniaError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(GardeniaError, ValueError):
    pass


class MalformedInputError(GardeniaError, ValueError):
    pass


class UnsupportedFormatError(GardeniaError, ValueError):
    pass


class IncompatibleFileError(GardeniaError, ValueError):
    pass


class PreconditionError(GardeniaError, ValueError):
    pass


class UnsupportedInputError(GardeniaError, ValueError):
    pass


class UndefinedStatsError(GardeniaError, ValueError):
    pass


class SingularMatrixError(GardeniaError, ArithmeticError):
    pass


class TrainingDivergedError(GardeniaError, ArithmeticError):
    pass


class OracleSizeError(GardeniaError):
    """The input is larger than the oracle's complexity guard allows."""


class FetchError(GardeniaError, OSError):
    pass


class DatasetVerificationError(GardeniaError):
    pass


class ConfigurationError(GardeniaError, ValueError):
    """Kernel and graph are incompatible (e.g. TC on a directed graph)."""
