"""Exception types shared across the package."""


class NumericError(RuntimeError):
    """Raised when training encounters non-finite values or diverges."""


class ArtifactError(RuntimeError):
    """Raised when a model artifact is malformed, truncated, or corrupted."""
