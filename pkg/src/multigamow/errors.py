"""Exception types raised by the numerical routines."""


class GamowError(Exception):
    """Base class for all errors raised by multigamow."""


class InputError(GamowError, ValueError):
    """Invalid physical input (length mismatch, negative mass, bad energy...)."""


class BelowThresholdError(InputError):
    """The requested energy cannot be carried by the particles at any finite travel time."""


class MasslessParticleError(InputError):
    """A massless relativistic particle was passed to a routine that cannot handle it."""


class ConvergenceError(GamowError, ArithmeticError):
    """An iterative solver or quadrature failed to reach its tolerance."""


class UnderResolvedError(ConvergenceError):
    """A quadrature grid is too coarse for the oscillation it has to resolve."""
