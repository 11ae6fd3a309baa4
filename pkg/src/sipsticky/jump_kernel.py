"""Finite-range symmetric jump kernels on Z.

A kernel stores only the positive half p(1..R); p(-r) = p(r) is structural
and p(0) = 0. Weights are raw rates, deliberately not normalized to a
probability: every formula downstream is written in terms of the raw p(r).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZero, NonIrreducible


@dataclass(frozen=True)
class FiniteRangeKernel:
    """Symmetric finite-range jump law, positive half only.

    Attributes
    ----------
    weights : tuple of float
        p(1), ..., p(R); nonnegative, at least one positive, and the gcd
        of the supported distances must be 1 (otherwise the walk lives on
        a sublattice).
    """

    weights: tuple = field(default_factory=lambda: (0.5,))

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        validate(self)

    @property
    def range(self) -> int:
        return len(self.weights)

    def p(self, r: int) -> float:
        """Weight for a jump of displacement r (either sign)."""
        r = abs(int(r))
        if r == 0 or r > self.range:
            return 0.0
        return self.weights[r - 1]

    @property
    def chi(self) -> float:
        """Second-moment constant sum_{r>=1} r^2 p(r)."""
        return chi(self)

    @property
    def total_weight(self) -> float:
        """sum_{r in A} p(r) over both signs."""
        return 2.0 * float(np.sum(self.weights))

    def displacements(self) -> np.ndarray:
        """All jump displacements A = {-R..R} \\ {0} as an int array."""
        R = self.range
        return np.array([r for r in range(-R, R + 1) if r != 0], dtype=np.int64)

    def rates_array(self) -> np.ndarray:
        """weights as a float array p(1..R)."""
        return np.asarray(self.weights, dtype=np.float64)


def validate(kernel: FiniteRangeKernel) -> None:
    """Raise AllZero / NonIrreducible when the invariants fail."""
    w = kernel.weights
    if any(x < 0 for x in w):
        raise AllZero(f"negative weight in {w}")
    support = [r + 1 for r, x in enumerate(w) if x > 0]
    if not support:
        raise AllZero("kernel has no positive weight")
    g = 0
    for r in support:
        g = math.gcd(g, r)
    if g != 1:
        raise NonIrreducible(f"supported distances {support} have gcd {g}")


def chi(kernel: FiniteRangeKernel) -> float:
    """sum_{r=1}^R r^2 p(r); strictly positive for a valid kernel."""
    w = kernel.rates_array()
    r = np.arange(1, kernel.range + 1, dtype=np.float64)
    return float(np.sum(r * r * w))


def support_sets(kernel: FiniteRangeKernel, N: int):
    """Scaled jump sets (A_N, A_N_plus, B_N) on the grid (1/N)Z.

    A_N = (1/N)({-R..R} \\ {0}), A_N_plus its absolute values,
    B_N = (1/N){-2R..2R}.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    R = kernel.range
    a = kernel.displacements() / float(N)
    a_plus = np.arange(1, R + 1, dtype=np.float64) / float(N)
    b = np.arange(-2 * R, 2 * R + 1, dtype=np.int64) / float(N)
    return a, a_plus, b


PRESETS = {
    # nearest-neighbor walk of the main variance theorem
    "nn": FiniteRangeKernel((0.5,)),
    "range2": FiniteRangeKernel((0.25, 0.25)),
}


def from_spec(spec: str) -> FiniteRangeKernel:
    """Parse a preset name or a comma-separated weight list 'p1,p2,...'."""
    if spec in PRESETS:
        return PRESETS[spec]
    try:
        weights = tuple(float(tok) for tok in spec.split(","))
    except ValueError as exc:
        raise AllZero(f"cannot parse kernel spec {spec!r}") from exc
    return FiniteRangeKernel(weights)
