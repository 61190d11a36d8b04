"""Exception roots for the triangle composition toolkit.

Library modules raise subclasses of these; the command line maps the
category base to an exit code.
"""


class TriangleToolError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(TriangleToolError):
    """Input violates a precondition of an operation."""


class BudgetExhausted(TriangleToolError):
    """A randomized search ran out of attempts without a witness."""


class MalformedFile(TriangleToolError):
    """An input file could not be parsed."""
