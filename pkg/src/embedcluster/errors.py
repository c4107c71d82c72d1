"""Exception types shared across the package.

The CLI maps these onto distinct exit codes (config error = 2,
data error = 3, anything else = 4), so loaders and validators should
raise the most specific type that applies.
"""


class EmbedClusterError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(EmbedClusterError):
    """Invalid parameter or configuration value."""


class DataFormatError(EmbedClusterError):
    """Malformed or inconsistent input file."""
