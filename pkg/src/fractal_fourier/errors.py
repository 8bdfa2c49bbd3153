"""Exception taxonomy shared by all subsystems.

Every error that a caller is expected to handle programmatically derives
from :class:`FractalFourierError`.  The CLI maps these onto exit codes
(config problems -> 2, inconsistent profiles -> 3, budget overruns -> 4).
"""


class FractalFourierError(Exception):
    """Base class for all library errors."""


class InvalidIFS(FractalFourierError):
    """An iterated function system violates a structural invariant."""


class BadConfig(FractalFourierError):
    """A configuration value is out of range or malformed."""


class ResourceExceeded(FractalFourierError):
    """A computation would exceed its enumeration budget.

    ``budget_name`` identifies which budget was hit so the CLI can name it.
    """

    def __init__(self, message: str, budget_name: str = "leaf_budget"):
        super().__init__(message)
        self.budget_name = budget_name


class InconsistentProfile(FractalFourierError):
    """A dimension profile violates the exponent ordering chain.

    ``violated`` names the specific inequality, e.g. ``"kappa1 <= d_inf"``.
    """

    def __init__(self, violated: str, detail: str = ""):
        self.violated = violated
        message = f"inconsistent profile, violated: {violated}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class MissingExponent(FractalFourierError):
    """A bound formula needs an exponent the profile does not supply."""


class NotApplicable(FractalFourierError):
    """The hypotheses of the requested formula are not met."""


class Unsupported(FractalFourierError):
    """The operation is not defined for this ambient dimension or kind."""


class MissingHessianBound(FractalFourierError):
    """The order-1 scheme needs a Hessian bound that was not supplied."""


class SupportNotPositive(FractalFourierError):
    """A factor measure's support hull is not contained in (0, inf)."""


class CenterInsideSupport(FractalFourierError):
    """A radial-projection centre coordinate intersects the support hull."""
