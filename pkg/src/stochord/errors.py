"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: usage and parameter problems
exit 2, data ingestion problems exit 3, numeric or assumption failures
exit 4.
"""


class StochordError(Exception):
    """Base class for all package-specific failures."""


class ParameterError(StochordError):
    """A model or option was constructed with invalid parameters."""


class DomainError(StochordError):
    """An operation was called with an argument outside its domain."""


class DataError(StochordError):
    """Input data could not be ingested (missing file, bad CSV cell)."""


class NumericError(StochordError):
    """A numeric routine hit a singularity or a violated assumption."""
