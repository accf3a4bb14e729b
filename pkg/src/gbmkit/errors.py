"""Exception types shared across the toolkit.

Grouped by how the CLI reports them: configuration mistakes exit with
status 2, bad input data with status 3, anything unexpected with 4.
"""


class GbmkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(GbmkitError):
    """Invalid parameter, option, or configuration value."""


class DataError(GbmkitError):
    """Input data violates a contract (format, shape, or domain)."""


class StratificationError(DataError):
    """A class has too few samples for the requested split."""


class ModelFormatError(DataError):
    """A serialized model document is malformed or incompatible."""
