"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so library code should raise
these (rather than bare ValueError) for user-facing failure modes.
"""


class RegraphError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(RegraphError):
    """A precondition on user-supplied input was violated (exit code 2)."""


class ResourceLimitError(RegraphError):
    """A configured work/memory budget would be exceeded (exit code 3)."""


class NumericError(RegraphError):
    """A numeric computation failed to reach the required accuracy (exit code 4)."""
