"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid or inconsistent input data."""


class UnsupportedError(InputError):
    """The requested combination of spaces or rules is not supported."""


class ResourceError(RuntimeError):
    """A request would exceed the configured size or enumeration limits."""
