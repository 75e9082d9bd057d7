"""Exception types shared across the package."""


class AugforgeError(Exception):
    """Base class for every error this package raises deliberately."""


class FormatError(AugforgeError):
    """A file or byte stream does not conform to its declared format."""


class UnsupportedFormatError(FormatError):
    """The container is recognized but uses an encoding this package does not read."""


class ConfigError(AugforgeError):
    """A configuration value, document, or combination of options is invalid."""


class BoundsError(AugforgeError, ValueError):
    """An interval refers to positions outside the target extent."""
