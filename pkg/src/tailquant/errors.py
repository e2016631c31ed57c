"""Exception hierarchy shared by every tailquant module."""


class TailquantError(Exception):
    """Base class for all errors raised by tailquant."""


class InvalidParams(TailquantError, ValueError):
    """Parameters violate a model invariant."""


class DomainError(TailquantError, ValueError):
    """The argument lies outside the asymptotic regime of a formula."""


class UnsupportedTail(TailquantError, ValueError):
    """No tail model is available for this (distribution, side) pair."""


class SupportError(TailquantError, ValueError):
    """A density was evaluated outside the distribution's support."""


class RangeError(TailquantError, ValueError):
    """A baseline approximation was evaluated outside its validity range."""


class InsufficientData(TailquantError, ValueError):
    """Too few usable rows to fit an order."""


class OracleError(TailquantError, RuntimeError):
    """Base class for failures of the reference computation."""


class QuadratureFailure(OracleError):
    """Adaptive quadrature did not reach its tolerance within budget."""


class UnderflowRegime(OracleError):
    """A probability is below the representable range; use the log-space API."""


class BracketFailure(OracleError):
    """No sign-changing bracket was found for a quantile."""


class ConvergenceFailure(OracleError):
    """Root-finding stopped without meeting the residual tolerance."""


class TooManyFailures(OracleError):
    """More than the allowed fraction of grid rows failed.

    ``oracle_caused`` is False when every failed row came from the
    approximant side (for example a grid point outside its domain).
    """

    def __init__(self, message: str, oracle_caused: bool = True):
        super().__init__(message)
        self.oracle_caused = oracle_caused
