"""Exception types shared across the package."""


class ImpulseGeoError(Exception):
    """Base class for all errors raised by this package."""


class ChartDomainError(ImpulseGeoError):
    """A point lies outside the declared chart domain of a manifold."""


class ConfigError(ImpulseGeoError):
    """A scenario configuration failed validation."""


class NumericalError(ImpulseGeoError):
    """Base class for runtime numerical failures."""


class IntegrationFailure(NumericalError):
    """Integration stopped before reaching the requested endpoint.

    Attributes
    ----------
    reason : str
        One of ``"blow_up"``, ``"chart_escape"``, ``"step_underflow"``,
        ``"step_limit"``.
    u : float
        Parameter value of the last computed state.
    state : numpy.ndarray
        Raw state vector at ``u``.
    phase : str or None
        Integration phase in which the failure occurred.
    partial : object or None
        Dense path covering the part of the trajectory that was completed,
        when at least one step was accepted.
    """

    def __init__(self, reason, u, state, phase=None, message=None, partial=None):
        self.reason = reason
        self.u = u
        self.state = state
        self.phase = phase
        self.partial = partial
        super().__init__(message or f"integration failed ({reason}) at u={u:.6g}")


class CertificateViolation(NumericalError):
    """A fixed-point iterate left the certified containment region."""


class ShootingFailure(NumericalError):
    """Geodesic shooting did not converge."""
