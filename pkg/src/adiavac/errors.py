"""Exception types raised across the package.

Everything derives from AdiavacError so callers can catch the package's
failures with a single except clause; the CLI maps them to nonzero exits.
"""


class AdiavacError(Exception):
    """Base class for all errors raised by this package."""


class ConfigInvalid(AdiavacError):
    """Experiment configuration failed validation."""


# --- jets ------------------------------------------------------------------

class JetMismatch(AdiavacError):
    """Arithmetic between jets with different base points or orders."""


class DivisionByZeroJet(AdiavacError):
    """Jet division where the divisor's value coefficient is zero."""


class NegativeSqrtJet(AdiavacError):
    """Jet square root of a jet whose value coefficient is not positive."""


# --- background ------------------------------------------------------------

class NonPositiveScaleFactor(AdiavacError):
    """Scale factor evaluated where it is zero or negative."""


class OrderUnavailable(AdiavacError):
    """Requested jet order exceeds what the model can provide."""


class MasslessZeroMode(AdiavacError):
    """m = 0 with k = 0 has no oscillator frequency; the channel is rejected."""


# --- adiabatic frequencies -------------------------------------------------

class FrequencySquaredNonPositive(AdiavacError):
    """Squared recursion frequency lost positivity in strict mode."""

    def __init__(self, k: int, n: int, value: float):
        self.k = k
        self.n = n
        self.value = value
        super().__init__(
            f"squared frequency not positive at k={k}, order n={n}: {value!r}"
        )


class DegenerateFit(AdiavacError):
    """Power-law fit attempted on degenerate data (underflow or zero spread)."""


# --- mode evolution --------------------------------------------------------

class StepSizeUnderflow(AdiavacError):
    """Adaptive step size collapsed below the representable floor."""


class ToleranceNotMet(AdiavacError):
    """Integrator could not satisfy the requested error budget."""


# --- Bogoliubov ------------------------------------------------------------

class NotNormalized(AdiavacError):
    """Mode data handed to a bracket is not Wronskian-normalized."""


# --- detector --------------------------------------------------------------

class CutoffInadequate(AdiavacError):
    """Mode cutoff too low for the requested energy range."""


class InsufficientPoints(AdiavacError):
    """Not enough samples inside the fit window."""
