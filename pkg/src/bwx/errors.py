"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: file-format and OS errors are I/O
failures (2), NumericalError is a numerical failure (3), everything else
derived from BwxError counts as a usage/domain problem (1).
"""


class BwxError(Exception):
    """Base class for all errors raised by bwx."""


class DomainError(BwxError, ValueError):
    """A value lies outside its mathematical domain (e.g. cutoff above Nyquist)."""


class ShapeError(BwxError, ValueError):
    """Array shapes or band widths disagree with the declared layout."""


class LengthError(BwxError, ValueError):
    """A signal or frame sequence is too short for the requested operation."""


class NumericalError(BwxError, ArithmeticError):
    """A computation produced NaN/Inf where finite values are required."""


class FileFormatError(BwxError, ValueError):
    """Base class for problems with on-disk file contents."""


class UnsupportedCodecError(FileFormatError):
    """The file is valid but uses an encoding this package does not read."""


class MalformedHeaderError(FileFormatError):
    """Header bytes do not parse as the expected container structure."""


class TruncatedDataError(FileFormatError):
    """The file ends before its declared payload does."""


class BadMagicError(FileFormatError):
    """Magic bytes at the start of the file do not match."""


class PayloadMismatchError(FileFormatError):
    """Payload size disagrees with the header's frame/bin counts."""


class PayloadValueError(FileFormatError):
    """Payload values violate an invariant (NaN, negative magnitude)."""


class PipelineError(BwxError):
    """Failure inside a named pipeline stage; wraps the original error."""

    def __init__(self, stage: str, cause: BaseException):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}': {cause}")
