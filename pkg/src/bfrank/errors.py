"""Exception types shared across the package."""


class BfrankError(Exception):
    """Base class for all package errors."""


class OrdinalParseError(BfrankError):
    """An ordinal expression string could not be parsed."""


class SpaceFormatError(BfrankError):
    """A space file is syntactically malformed.

    Carries the 1-based line number when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class SpaceValidationError(BfrankError):
    """A distance matrix violates the metric axioms.

    ``witness`` holds the offending index pair or triple.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ResourceLimitError(BfrankError):
    """A configured resource ceiling (node count, tuple count, search size)
    was exceeded."""
