"""Exception hierarchy shared across the toolkit.

Every error carries a short machine-readable ``code`` so the CLI can emit
structured error JSON and map failures onto exit codes (config errors vs.
data errors vs. endpoint errors).
"""


class StyleVerifyError(Exception):
    """Base class; ``code`` is a stable kebab-case identifier."""

    code = "error"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ConfigError(StyleVerifyError):
    code = "invalid-config"


class DataError(StyleVerifyError):
    code = "data-error"


class EndpointError(StyleVerifyError):
    code = "endpoint-failure"


class IneligibleDocumentError(DataError):
    code = "ineligible-document"


class InsufficientCorpusError(DataError):
    code = "insufficient-corpus"


class EmptyCorpusError(DataError):
    code = "empty-corpus"


class EmptyInputError(DataError):
    code = "empty-input"


class MalformedRecordError(DataError):
    code = "malformed-record"


class DuplicateIdError(DataError):
    code = "duplicate-id"


class NonFiniteInputError(DataError):
    code = "non-finite-input"


class ZeroVectorError(DataError):
    code = "zero-vector"


class MissingLabelClassError(DataError):
    code = "missing-label-class"


class VersionMismatchError(DataError):
    code = "version-mismatch"


class CorruptStoreError(DataError):
    code = "corrupt-store"


class PositiveLogProbError(DataError):
    code = "positive-logprob"


class LengthMismatchError(DataError):
    code = "length-mismatch"


class InsufficientParagraphsError(DataError):
    code = "insufficient-paragraphs"


class TooShortForCompletionError(DataError):
    code = "too-short-for-completion"


class MissingOfflineRecordError(DataError):
    code = "missing-offline-record"
