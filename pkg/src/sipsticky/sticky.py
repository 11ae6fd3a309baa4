"""Closed-form two-sided sticky kernel, marginal sampler, and path simulator.

The process: Brownian motion with diffusion constant chi (generator
chi f'', so variance 2 chi t), time-changed through the inverse of
T_s = s + sqrt2 gamma L_s^0, where L^0 is the occupation-density local
time at the origin. It is reversible with respect to dx + sqrt2 gamma
delta_0, and its law at time t started from 0 is an atom at 0 plus a
density:

    atom(t)       = erfcx(b),                      b = sqrt(2 chi t) / gamma
    density(v, t) = erfcx(b + u) exp(-u^2) / (sqrt2 gamma),
                    u = |v| / sqrt(4 chi t)

(erfcx(x) = exp(x^2) erfc(x)). The hitting probability of the atom from
v != 0 is sqrt2 gamma density(v, t) by reversibility, which is continuous
at v = 0 and dominated by the atom mass.

All parameters are calibrated against the rescaled two-particle gap walk:
the walk's probability of being at 0 converges to ``mass_at_zero`` and its
off-origin hit probabilities to ``hit_zero_prob`` (see the difference
module and the acceptance suite). The same family written with stickiness
role and scale swapped, gamma -> sqrt(chi/2)/gamma, reproduces the other
parameterization floating around the literature; ``dual_gamma`` maps
between the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import RejectionStall
from .special import erfcx

SQRT2 = math.sqrt(2.0)
DEFAULT_CHI = 0.5  # nearest-neighbor walk; standard Brownian limit


@dataclass(frozen=True)
class StickyParams:
    """gamma scales the origin atom of the reversible measure
    dx + sqrt2 gamma delta_0; larger gamma means stickier."""

    gamma: float
    chi: float = DEFAULT_CHI

    def __post_init__(self):
        if self.gamma <= 0 or self.chi <= 0:
            raise ValueError("gamma and chi must be positive")


def dual_gamma(gamma: float, chi: float = DEFAULT_CHI) -> float:
    """Parameter swap mapping this kernel family onto the alternative
    convention in which the atom reads erfcx(2 gamma sqrt(t))."""
    return math.sqrt(chi / 2.0) / gamma


def _scaled_time(t, chi):
    # the kernel of diffusion constant chi is the chi = 1/2 kernel at 2 chi t
    return 2.0 * chi * t


def mass_at_zero(t: float, gamma: float, chi: float = DEFAULT_CHI) -> float:
    """Probability of sitting at the origin at time t, started at 0."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 1.0
    tp = _scaled_time(t, chi)
    return float(erfcx(math.sqrt(tp) / gamma))


def density(v, t: float, gamma: float, chi: float = DEFAULT_CHI):
    """Continuous part of the time-t law started at 0, evaluated at v.

    Computed through erfcx so the exponential growth of the prefactor and
    the erfc decay cancel analytically instead of numerically.
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    tp = _scaled_time(t, chi)
    u = np.abs(np.asarray(v, dtype=float)) / math.sqrt(2.0 * tp)
    b = math.sqrt(tp) / gamma
    out = erfcx(b + u) * np.exp(-u * u) / (SQRT2 * gamma)
    return out if out.shape else float(out)


def hit_zero_prob(v, t: float, gamma: float, chi: float = DEFAULT_CHI):
    """Probability of being at the origin at time t, started from v.

    Equals the atom mass at v = 0 and sqrt2 gamma density(v, t) elsewhere
    (reversibility with respect to dx + sqrt2 gamma delta_0); the two
    branches agree in the limit v -> 0.
    """
    if np.ndim(v) == 0 and v == 0:
        return mass_at_zero(t, gamma, chi)
    return SQRT2 * gamma * density(v, t, gamma, chi)


@dataclass(frozen=True)
class StickyKernelEval:
    """Atom-plus-density snapshot of the time-t law from the origin."""

    t: float
    gamma: float
    chi: float = DEFAULT_CHI
    atom: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "atom", mass_at_zero(self.t, self.gamma, self.chi))

    def density(self, v):
        return density(v, self.t, self.gamma, self.chi)

    def normalization_defect(self, quad_points: int = 768) -> float:
        """|atom + integral of density - 1| by wide fixed quadrature."""
        from .quadrature import gl_fixed
        tp = _scaled_time(self.t, self.chi)
        hi = 12.0 * math.sqrt(tp)
        integral = 2.0 * gl_fixed(self.density, 0.0, hi, quad_points)
        return abs(self.atom + integral - 1.0)


# ---------------------------------------------------------------------------
# marginal sampler
# ---------------------------------------------------------------------------

def sample_marginal(t: float, gamma: float, seed: int, size: int = 1,
                    chi: float = DEFAULT_CHI, replica: int = 0) -> np.ndarray:
    """Draws from the time-t law started at 0.

    With probability mass_at_zero returns exactly 0; otherwise rejection
    samples the continuous part under the Gaussian envelope
    erfcx(b) N(0, 2 chi t), where the acceptance ratio erfcx(b+u)/erfcx(b)
    stays above ~2/pi uniformly in (t, gamma).
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    gen = rng.generator(seed, replica)
    tp = _scaled_time(t, chi)
    b = math.sqrt(tp) / gamma
    sd = math.sqrt(tp)
    atom = mass_at_zero(t, gamma, chi)
    out = np.zeros(size)
    need = np.flatnonzero(gen.random(size) >= atom)
    pending = len(need)
    filled = 0
    proposals = 0
    vals = np.empty(pending)
    while filled < pending:
        m = max(pending - filled, 64)
        v = gen.normal(0.0, sd, size=m)
        u = np.abs(v) / math.sqrt(2.0 * tp)
        accept = gen.random(m) < erfcx(b + u) / erfcx(b)
        got = v[accept]
        take = min(len(got), pending - filled)
        vals[filled:filled + take] = got[:take]
        filled += take
        proposals += m
        if proposals > 10_000 and filled / proposals < 1e-3:
            raise RejectionStall(
                f"acceptance rate {filled / proposals:.2e}; envelope broken")
    out[need] = vals
    return out


# ---------------------------------------------------------------------------
# path simulation via the local-time time change
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TimeChangeGrid:
    """Euler-grid Brownian path with accumulated local time and clock.

    T is strictly increasing and L nondecreasing by construction; tau is
    realized by searchsorted inversion of T.
    """

    dt: float
    s: np.ndarray        # grid times of the underlying Brownian motion
    B: np.ndarray        # Brownian path
    L: np.ndarray        # band estimate of the local time at 0
    T: np.ndarray        # T_s = s + sqrt2 gamma L_s

    def tau_index(self, t) -> np.ndarray:
        """Grid index of the inverse clock.

        t in [T_j, T_{j+1}) maps to j: the clock increment over that
        interval was generated by the path value at j (the in-band point
        during sticky dwells), so the value reported for t is B_j.
        """
        idx = np.searchsorted(self.T, np.asarray(t, dtype=float), side="right") - 1
        return np.clip(idx, 0, len(self.T) - 1)


def time_change_path(t_end: float, gamma: float, dt: float, seed: int,
                     n_eval: int = 512, band_factor: float = 1.0,
                     replica: int = 0):
    """Simulate the sticky path B_{tau(t)} on an evaluation grid.

    The Brownian path is standard (chi = 1/2); local time accrues through
    the band estimator (1/2 eps) * time in [-eps, eps] with
    eps = band_factor sqrt(dt), and the new clock is T_s = s + sqrt2
    gamma L_s. Returns (t_grid, path values, TimeChangeGrid).
    """
    if dt <= 0 or t_end <= 0:
        raise ValueError("dt and t_end must be > 0")
    n = int(math.ceil(t_end / dt))
    gen = rng.generator(seed, replica)
    incr = gen.normal(0.0, math.sqrt(dt), size=n)
    B = np.concatenate([[0.0], np.cumsum(incr)])
    s = np.arange(n + 1) * dt
    eps = band_factor * math.sqrt(dt)
    inband = (np.abs(B) <= eps).astype(float)
    # left-endpoint Riemann sum of (1/2eps) int 1[-eps,eps](B) ds
    L = np.concatenate([[0.0], np.cumsum(inband[:-1]) * dt / (2.0 * eps)])
    T = s + SQRT2 * gamma * L
    grid = TimeChangeGrid(dt=dt, s=s, B=B, L=L, T=T)
    t_grid = np.linspace(0.0, t_end, n_eval)
    path = B[grid.tau_index(t_grid)]
    return t_grid, path, grid
