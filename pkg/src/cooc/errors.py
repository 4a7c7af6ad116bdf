"""Exception types shared across the toolkit."""


class CoocError(Exception):
    """Base class for all toolkit errors."""


class FormatError(CoocError):
    """A data file is malformed (bad magic, truncation, order violation)."""

    def __init__(self, path, offset, message):
        super().__init__(f"{path}: {message} (at byte offset {offset})")
        self.path = str(path)
        self.offset = offset


class IngestError(CoocError):
    """Invalid input during ingestion, e.g. a duplicate external id."""


class ConfigError(CoocError):
    """Invalid or incomplete configuration for an operation."""


class ContractViolation(CoocError):
    """A caller broke an input contract (unsorted stream, duplicate key, ...)."""


class GuardExceeded(CoocError):
    """A size or work guard tripped before an infeasible computation started."""


class ConsistencyError(CoocError):
    """Two artifacts that must describe the same collection do not."""
