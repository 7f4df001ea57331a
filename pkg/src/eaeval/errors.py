"""Exception hierarchy and process exit codes."""


class EaevalError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 4  # internal error unless a subclass says otherwise


class InputError(EaevalError):
    """Bad user input: files, formats, preconditions."""

    exit_code = 2


class ProviderError(EaevalError):
    """A similarity or judge backend failed."""

    exit_code = 3


# --- input-side errors -------------------------------------------------------

class EmptyArgument(InputError):
    """Argument text is empty or whitespace-only."""


class UnknownDocument(InputError):
    """A prediction references a doc_id that is not in the gold dataset."""

    def __init__(self, doc_id):
        super().__init__(f"unknown document: {doc_id!r}")
        self.doc_id = doc_id


class DuplicateDocument(InputError):
    def __init__(self, doc_id):
        super().__init__(f"duplicate document: {doc_id!r}")
        self.doc_id = doc_id


class DuplicateRole(InputError):
    def __init__(self, doc_id, role):
        super().__init__(f"role {role!r} repeated for document {doc_id!r}")
        self.doc_id = doc_id
        self.role = role


class ParseError(InputError):
    """Malformed record file; carries the 1-based line number."""

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class MissingHeader(InputError):
    def __init__(self, path, missing):
        super().__init__(f"{path}: header is missing {missing}")
        self.path = str(path)
        self.missing = missing


class InvalidDeviation(InputError):
    """A deviation rate fell outside [0, 1]."""


class NoLedgers(InputError):
    """Alignment sampling requested before any evaluation run produced pairs."""


# --- provider-side errors ----------------------------------------------------

class ProviderFailure(ProviderError):
    """Similarity provider failed on a specific argument pair."""

    def __init__(self, pair, cause):
        super().__init__(f"provider failed on pair {pair!r}: {cause}")
        self.pair = pair
        self.cause = cause


class NetworkError(ProviderError):
    """Remote call still failing after the configured retries."""


class DimensionMismatch(ProviderError):
    """Embedding service returned vectors of different lengths."""


class RateLimited(ProviderError):
    """Server asked us to back off; retry_after is in seconds when known."""

    def __init__(self, message, retry_after=None):
        super().__init__(message)
        self.retry_after = retry_after


class JudgeParseError(ProviderError):
    """Judge response contained no recognizable verdict."""


class JudgeExhausted(ProviderError):
    """All retries spent on one judge pair; caller records it as unresolved."""


class UnboundPlaceholder(InputError):
    """Prompt template referenced a placeholder with no binding."""

    def __init__(self, name):
        super().__init__(f"unbound placeholder: {{{name}}}")
        self.name = name
