"""Exception hierarchy.

Every error raised deliberately by the library derives from :class:`SRVMError`.
The CLI maps the three families below onto its exit codes.
"""


class SRVMError(Exception):
    """Base class for library errors."""

    exit_code = 1


class UsageError(SRVMError):
    """Invalid configuration or flag combination."""

    exit_code = 2


class DataError(SRVMError):
    """Problems reading, fetching or decoding data."""

    exit_code = 3


class NumericError(SRVMError, ValueError):
    """Invalid numerical input or a degenerate computation."""

    exit_code = 4


class InvalidInputError(NumericError):
    pass


class DomainError(NumericError):
    pass


class DegenerateInputError(NumericError):
    pass


class CapacityError(NumericError):
    def __init__(self, required, cap):
        super().__init__(f"expansion needs {required} coefficients, cap is {cap}")
        self.required = required
        self.cap = cap


class ConfigurationError(UsageError, ValueError):
    pass


class ParseError(DataError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class EmptyDatasetError(DataError):
    pass


class FetchError(DataError):
    pass


class IntegrityError(DataError):
    pass


class DatasetLookupError(DataError, LookupError):
    pass


class DeserializationError(DataError):
    pass


class ArchiveVersionError(DeserializationError):
    pass
