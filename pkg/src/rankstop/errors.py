"""Package-wide error types."""


class ResourceBoundError(RuntimeError):
    """Raised when a request exceeds a documented feasibility budget.

    The CLI maps this to exit code 3; it is a refusal, not an
    approximation.
    """
