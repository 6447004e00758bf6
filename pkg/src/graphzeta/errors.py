"""Exception types shared across the package.

The exit_code attribute drives the CLI status: 2 for validation or format
problems, 3 for numerical failures, 4 for requests outside the supported
domain.
"""


class GraphZetaError(Exception):
    exit_code = 1


class GraphFormatError(GraphZetaError):
    """Malformed graph document or inconsistent graph data."""

    exit_code = 2


class ValidationError(GraphZetaError):
    """Matching conditions fail the self-adjointness checks."""

    exit_code = 2


class NumericalError(GraphZetaError):
    """A numerical method failed to converge or hit a guard."""

    exit_code = 3


class UnsupportedError(GraphZetaError):
    """Request outside the supported domain of the implemented methods."""

    exit_code = 4
