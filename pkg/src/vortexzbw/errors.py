"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: ConfigError -> 2, invariant
failures -> 1, numerical failures (grid non-convergence, NaN/Inf
contamination, degenerate fits) -> 3.
"""


class ConfigError(ValueError):
    """Malformed or out-of-range run configuration."""


class NumericalFailure(RuntimeError):
    """Base class for tagged numerical failures."""


class GridConvergenceError(NumericalFailure):
    """Node doubling exhausted without meeting the convergence target.

    Carries a diagnostics dict (domain, node counts, last deltas) so the
    failure is actionable rather than a bare message.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class DomainError(NumericalFailure):
    """NaN or Inf appeared in an integrand on the quadrature domain."""


class UnderresolvedSeriesError(ValueError):
    """Time series too sparse or too short for the requested fit."""


class RegimeWarning(UserWarning):
    """Packet parameters leave the regime a closed-form law assumes."""


class RegimeError(ValueError):
    """Refusal to run a scaling experiment outside its validity regime.

    Raised by sweeps when a momentum scale exceeds the non-relativistic
    bound and the caller did not pass the explicit override.
    """
