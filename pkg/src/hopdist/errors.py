"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1, DataError (and its
subclasses) -> 2, NumericalError -> 3.
"""


class HopdistError(Exception):
    pass


class ConfigError(HopdistError):
    """Invalid configuration, flags, or argument combinations."""


class DataError(HopdistError):
    """Bad or missing input data (files, labels, dimensions)."""


class ParseError(DataError):
    """Malformed edge-list or embedding file."""


class NumericalError(HopdistError):
    """Training diverged (NaN/Inf loss) or a solve failed."""
