"""Exception types shared across the package."""


class CapabilityError(RuntimeError):
    """The requested operation is outside what this space kind supports."""
