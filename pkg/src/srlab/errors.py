"""Exception types shared across the package."""


class SrlabError(Exception):
    """Base class for all package-specific errors."""


class DegenerateDetuning(SrlabError):
    """Raised when an operation needs a nonzero detuning but got zero."""


class UnequalDetunings(SrlabError):
    """Raised when a mean-field operation is called with delta_c != delta_a."""


class ZeroCoupling(SrlabError):
    """Raised when the closed-form branch solution is requested at lambda = 0."""


class OffShell(SrlabError):
    """Raised when |z| > 1/2, i.e. no real field amplitude exists for that z."""


class EigenFailure(SrlabError):
    """Raised when the eigenvalue solver fails to converge on a drift matrix."""


class UnstableDrift(SrlabError):
    """Raised when a Lyapunov solve is requested for a drift matrix that has
    a positive eigenvalue, or a driven marginal mode, so no steady covariance
    exists."""


class BoundaryPole(SrlabError):
    """Raised when the closed-form normal-phase variance hits a vanishing
    denominator."""


class NonConvergence(SrlabError):
    """Raised when the steady-state solver cannot reach the residual target.

    Carries the achieved residual so callers can report it.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class StepRejected(SrlabError):
    """Raised when the time integrator fails its tolerance control."""


class CutoffTooSmall(SrlabError):
    """Raised when a state carries non-negligible weight in the top Fock
    levels, so quantities computed from it are truncation-dominated."""


class NoStableSolution(SrlabError):
    """Raised when phase classification finds no stable fixed point at all."""


class ConfigError(SrlabError):
    """Raised on sweep-configuration parse or validation problems."""

    def __init__(self, message, section=None, option=None):
        loc = ""
        if section is not None:
            loc = f" [{section}]" + (f" {option}" if option else "")
        super().__init__(message + loc)
        self.section = section
        self.option = option
