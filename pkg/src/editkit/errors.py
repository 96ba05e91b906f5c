"""Exception and warning types shared across editkit modules."""


class EditkitError(Exception):
    """Base class for all editkit errors."""


class ValidationError(EditkitError):
    """Invalid data or arguments (bad schema, misaligned inputs, bad config values)."""


class CorpusFormatError(ValidationError):
    """A corpus file could not be parsed. Carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ConfigError(ValidationError):
    """Run configuration file is malformed or inconsistent."""


class UsageError(ValidationError):
    """Bad command-line usage."""


class WriteError(EditkitError):
    """Output could not be fully written. `written` counts records flushed before failure."""

    def __init__(self, message: str, written: int = 0):
        self.written = written
        super().__init__(f"{message} ({written} records written before failure)")


class ScorerError(EditkitError):
    """An external similarity scorer misbehaved (bad handshake, bad score, early exit)."""


class BuildWarning(UserWarning):
    """Dataset construction took a defined fallback (e.g. cap over corpus size)."""


class MetricWarning(UserWarning):
    """Non-fatal metric edge case, e.g. scoring an empty hypothesis."""
