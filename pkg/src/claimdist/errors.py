"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage/config problems -> 1,
data problems -> 2, internal invariant violations -> 3.
"""


class ClaimdistError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ClaimdistError):
    """Invalid manifest, option combination, or unresolvable input path."""


class DataError(ClaimdistError):
    """Malformed or unusable input data."""


class EmbeddingParseError(DataError):
    """A word-vector file could not be parsed.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class EmptyDocumentError(DataError):
    """No token of a document survived vocabulary filtering; it cannot be scored."""


class OutOfVocabularyError(DataError):
    """A word required to be in the embedding table is not."""


class OracleSizeError(ClaimdistError):
    """The exact-transport oracle refused an instance above its size cap."""


class InternalInvariantError(ClaimdistError):
    """A result violated an invariant the implementation promises to maintain."""
