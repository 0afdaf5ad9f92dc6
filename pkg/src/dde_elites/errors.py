"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Raised for invalid run configurations (bad ratios, missing model, ...)."""


class DecoderFormatError(ValueError):
    """Raised when a decoder file is corrupt or missing a required field."""


class EmptyArchiveError(RuntimeError):
    """Raised when an operation needs at least one occupied archive cell."""
