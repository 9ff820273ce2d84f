"""Typed errors shared across the toolkit.

Every failure mode that callers are expected to handle gets its own class so
the CLI can map it to a stable exit code and tests can assert on the type
rather than on message text.
"""

from __future__ import annotations


class AsymGaugeError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AsymGaugeError):
    """Bad input values: nonpositive counts, unknown config keys, and so on."""


class ParseError(ValidationError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class PreconditionError(ValidationError):
    """An operation was called on inputs that violate its stated contract."""


class CoverageError(AsymGaugeError):
    """Required pairs are missing from a table or map. Lists the offenders."""

    def __init__(self, message: str, pairs=()):
        pairs = list(pairs)
        if pairs:
            shown = ", ".join(f"({a}, {b})" for a, b in pairs[:10])
            more = f" and {len(pairs) - 10} more" if len(pairs) > 10 else ""
            message = f"{message}: {shown}{more}"
        super().__init__(message)
        self.pairs = pairs


class AbsentWordError(AsymGaugeError):
    """A word required for a lookup is not in the vocabulary."""

    def __init__(self, word: str, where: str = "vocabulary"):
        super().__init__(f"word {word!r} not found in {where}")
        self.word = word


class ConfigurationError(ValidationError):
    """Invalid or inconsistent run configuration."""


class DomainError(ValidationError):
    """A numeric argument is outside the mathematical domain of an operation."""


class DimensionError(ValidationError):
    """Vector length does not match the table dimension."""


class UndefinedCorrelationError(AsymGaugeError):
    """Rank correlation is undefined (a constant input vector)."""


class IncompleteBatchError(AsymGaugeError):
    """A scoring batch came back without answers for some tasks."""

    def __init__(self, missing_ids):
        missing_ids = list(missing_ids)
        shown = ", ".join(missing_ids[:5])
        more = f" and {len(missing_ids) - 5} more" if len(missing_ids) > 5 else ""
        super().__init__(f"no result for task(s): {shown}{more}")
        self.missing_ids = missing_ids


class ScorerProtocolError(AsymGaugeError):
    """The scoring channel replied with something the protocol forbids."""


class ScorerChannelError(AsymGaugeError):
    """The scoring channel itself failed (broken pipe, bad JSON, timeout)."""


class DependencyError(AsymGaugeError):
    """A pipeline stage ran before the stage that produces its inputs."""


class StaleCheckpointError(ValidationError):
    """A checkpoint was written under a different configuration."""


class IndexFormatError(AsymGaugeError):
    """A persisted index file has the wrong magic or version."""
