"""Inclusion-process condensation toolkit.

Simulates the symmetric inclusion process and its two-particle gap walk,
evaluates the closed-form sticky kernel and density-field variance it
converges to under condensive rescaling, and exercises the discrete
Dirichlet forms whose limit identifies the sticky motion.
"""

__version__ = "0.1.0"

from . import backend  # noqa: F401
from .jump_kernel import FiniteRangeKernel, chi, support_sets  # noqa: F401
