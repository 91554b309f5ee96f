"""Error hierarchy shared by all pipeline stages.

Each error class carries the process exit code the CLI maps it to.
"""


class SelmaskError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


class ConfigError(SelmaskError):
    """Invalid configuration: bad flag values, missing required options."""

    exit_code = 2


class DataError(SelmaskError):
    """Invalid input data: missing files, malformed records, bad corpora."""

    exit_code = 3


class InvariantError(SelmaskError):
    """An internal invariant was violated; indicates a bug, not bad input."""

    exit_code = 4
