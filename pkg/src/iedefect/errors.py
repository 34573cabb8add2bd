"""Exception hierarchy shared by the pipeline stages.

The CLI maps each class to a process exit code, so library code should raise
the most specific one that applies.
"""


class IEError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class ConfigError(IEError, ValueError):
    """Invalid user-supplied configuration (bad flags, out-of-range parameters)."""

    exit_code = 1


class DataError(IEError, ValueError):
    """Input data is malformed or violates the recording invariants."""

    exit_code = 2


class MethodError(IEError, ValueError):
    """The detection method cannot proceed on otherwise valid data.

    Raised for degenerate frequency distributions, a histogram with a single
    frequency range, too few distinct values for clustering, and similar.
    """

    exit_code = 3
