"""Exception types shared across the package."""


class WavesalError(Exception):
    """Base class for all package-specific errors."""


class FormatError(WavesalError):
    """Unsupported or corrupt file format."""


class FixationParseError(WavesalError):
    """Malformed fixation CSV; message names the offending line."""


class ParameterError(WavesalError, ValueError):
    """Operation preconditions violated (sizes, levels, ranges)."""


class KindError(WavesalError, TypeError):
    """Operation applied to the wrong kind of node or tree."""


class DegenerateDistributionError(WavesalError):
    """Statistics requested of an all-zero / zero-variance sample."""


class ConfigurationError(WavesalError):
    """Missing or inconsistent configuration (e.g. absent GGD table entry)."""
