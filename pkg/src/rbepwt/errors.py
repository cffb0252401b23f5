"""Exception hierarchy shared by the codec modules and the CLI."""


class RbepwtError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(RbepwtError, ValueError):
    """A file or byte stream does not follow its declared format."""


class PreconditionError(RbepwtError, ValueError):
    """An operation was called on inputs it is not defined for."""
