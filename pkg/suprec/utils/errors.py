"""
Exception hierarchy shared by the library, the tools and the CLI
"""


class SuprecError(Exception):
    """Base class for every error raised by suprec"""


class InvalidConfigError(SuprecError, ValueError):
    """A parameter, shape or file violates the model's preconditions"""


class UnboundedActivityError(InvalidConfigError):
    """An activity distribution without bounded support was passed where one is required"""


class WorkCapExceededError(SuprecError, RuntimeError):
    """An exhaustive search would exceed the configured work cap"""

    def __init__(self, what: str, estimate: float, cap: float):
        self.what = what
        self.estimate = estimate
        self.cap = cap
        super().__init__(
            f"{what}: estimated {estimate:.4g} evaluations exceeds the work cap of {cap:.4g}"
        )
