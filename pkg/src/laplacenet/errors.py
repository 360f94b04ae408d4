"""Exception and warning types shared across the package."""


class LaplaceNetError(Exception):
    """Base class for all errors raised by laplacenet."""


class EpsTooLarge(LaplaceNetError):
    """Requested net radius is too large for the manifold's injectivity radius."""


class EmptyCell(LaplaceNetError):
    """A net cell received no quadrature samples; raise the oversample factor."""


class RhoOutOfRange(LaplaceNetError):
    """Graph radius violates eps < rho < i0/2."""


class KTooLarge(LaplaceNetError):
    """More eigenpairs requested than the graph has vertices."""


class NoConvergence(LaplaceNetError):
    """Iterative eigensolver hit its iteration cap before reaching tolerance.

    Carries the partial result on the ``result`` attribute.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class IntervalNotResolved(LaplaceNetError):
    """Spectral projection interval extends past the computed spectrum."""


class ThetaNonpositive(LaplaceNetError):
    """Smoothing normalizer hit a nonpositive value (radius too large or
    quadrature too sparse)."""


class RadiusNonpositive(LaplaceNetError):
    """Interpolation requires rho - 2*eps > 0."""


class ClusterMismatch(LaplaceNetError):
    """Graph spectrum has no gap-separated cluster matching the exact one."""


class ConfigError(LaplaceNetError):
    """Invalid sweep configuration."""


class DisconnectedGraphWarning(UserWarning):
    """Graph is disconnected; spectral claims about lambda_2 do not apply."""
