"""Exception types shared across the toolkit."""


class SipStickyError(Exception):
    """Base class for all toolkit errors."""


class KernelError(SipStickyError):
    """Invalid jump kernel."""


class NonIrreducible(KernelError):
    """Support of the jump weights generates a proper sublattice of Z."""


class AllZero(KernelError):
    """All jump weights vanish."""


class WindowTooSmall(SipStickyError):
    """Doubling the truncation window moved the answer beyond tolerance."""


class RejectionStall(SipStickyError):
    """Rejection sampler acceptance rate collapsed; envelope is wrong."""


class QuadratureNotConverged(SipStickyError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class SingularSystem(SipStickyError):
    """Linear system for the dual form is singular on this window."""


class ConfigError(SipStickyError):
    """Unknown key, missing file, or bad value in an experiment config."""


class ToleranceError(SipStickyError):
    """A numeric routine reported non-convergence during an experiment."""
