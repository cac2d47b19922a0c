"""Exception hierarchy for the speclocate toolkit.

Every error raised by the library derives from SpeclocateError so callers can
catch toolkit failures with a single except clause. The CLI maps subclasses to
distinct exit codes.
"""


class SpeclocateError(Exception):
    """Base class for all speclocate errors."""


class InvalidArgumentError(SpeclocateError, ValueError):
    """A parameter is outside its documented range."""


class UnsupportedModulationError(SpeclocateError):
    """Burst requests a modulation scheme the synthesizer does not know."""


class LayoutError(SpeclocateError):
    """A band layout is inconsistent (burst exceeds record bounds, etc.)."""


class ClippingError(SpeclocateError):
    """Samples exceed int16 full scale beyond tolerance when writing."""


class ParseError(SpeclocateError):
    """Metadata file is malformed."""


class ConsistencyError(SpeclocateError):
    """Metadata and data disagree (size mismatch, annotation out of bounds)."""


class InsufficientInputError(SpeclocateError):
    """Not enough samples/statistics for the requested operation."""


class DegenerateHistogramError(SpeclocateError):
    """Statistic histogram has no usable noise bulk (mode at bin < 2)."""


class UndefinedSnrError(SpeclocateError):
    """SNR is undefined (zero noise power)."""


class FormatError(SpeclocateError):
    """Binary mask file violates the SGM1 format."""


class PairingError(SpeclocateError):
    """Mask files and truth records cannot be paired by stem."""


class DataError(SpeclocateError):
    """Input data set is missing or unusable."""


class ConfigError(SpeclocateError):
    """Run configuration is invalid."""
