"""Inclusion-process configuration dynamics on a periodic lattice.

Particles at site i hop to j at rate p(j-i) eta_i (k + eta_j): a random
walk part of strength k plus attraction proportional to the target
occupancy. Simulation is exact event-driven (Gillespie) in the compiled
or pure backend. The module also carries the product-measure samplers,
the factorized duality function, and a Monte Carlo self-duality check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln
from scipy.stats import nbinom, poisson

from . import backend, rng
from .jump_kernel import FiniteRangeKernel


@dataclass
class Configuration:
    """Occupancies on sites 0..L-1 (periodic)."""

    occupancies: np.ndarray
    total: int = field(init=False)

    def __post_init__(self):
        occ = np.ascontiguousarray(self.occupancies, dtype=np.int64)
        if occ.ndim != 1:
            raise ValueError("occupancies must be 1-d")
        if np.any(occ < 0):
            raise ValueError("occupancies must be nonnegative")
        self.occupancies = occ
        self.total = int(occ.sum())

    @property
    def L(self) -> int:
        return len(self.occupancies)

    def copy(self) -> "Configuration":
        return Configuration(self.occupancies.copy())


@dataclass(frozen=True)
class SipParams:
    k: float
    kernel: FiniteRangeKernel
    L: int

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")
        if self.L <= 2 * self.kernel.range:
            raise ValueError("lattice must satisfy L > 2R")


@dataclass(frozen=True)
class DualConfiguration:
    """Finite multiset of labeled particle positions."""

    positions: tuple

    def __post_init__(self):
        object.__setattr__(self, "positions",
                           tuple(int(x) for x in self.positions))

    @property
    def n(self) -> int:
        return len(self.positions)

    def site_counts(self) -> dict:
        out: dict = {}
        for x in self.positions:
            out[x] = out.get(x, 0) + 1
        return out


# ---------------------------------------------------------------------------
# initial measures
# ---------------------------------------------------------------------------

def sample_poisson_product(rho: float, L: int, seed: int,
                           replica: int = 0) -> Configuration:
    """i.i.d. Poisson(rho) occupancies; second factorial moment rho^2."""
    if rho <= 0:
        raise ValueError("rho must be > 0")
    gen = rng.generator(seed, replica)
    return Configuration(gen.poisson(rho, size=L).astype(np.int64))


def sample_stationary_product(rho: float, k: float, L: int, seed: int,
                              replica: int = 0) -> Configuration:
    """i.i.d. draws from the reversible single-site marginal:
    negative binomial with shape k and success weight rho/(k + rho),
    i.e. P(n) = k^k rho^n / (k+rho)^{k+n} * Gamma(k+n) / (n! Gamma(k))."""
    if rho <= 0 or k <= 0:
        raise ValueError("rho and k must be > 0")
    gen = rng.generator(seed, replica)
    draws = gen.negative_binomial(k, k / (k + rho), size=L)
    return Configuration(draws.astype(np.int64))


def stationary_marginal_pmf(n, rho: float, k: float):
    """Exact marginal pmf, for histogram comparisons."""
    return nbinom.pmf(n, k, k / (k + rho))


def poisson_marginal_pmf(n, rho: float):
    return poisson.pmf(n, rho)


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

def simulate(eta0: Configuration, params: SipParams, T: float, seed: int,
             replica: int = 0) -> Configuration:
    """Exact realization of the configuration process at time T."""
    if T < 0:
        raise ValueError("T must be >= 0")
    out = eta0.copy()
    if T == 0 or out.total == 0:
        return out
    bg = np.random.PCG64(rng.replica_seed(seed, replica))
    mod = backend.get_module()
    mod.sip_gillespie(out.occupancies, params.kernel.rates_array(),
                      params.k, T, bg)
    return Configuration(out.occupancies)


def simulate_dual(xi: DualConfiguration, params: SipParams, T: float,
                  seed: int, replica: int = 0) -> DualConfiguration:
    """Evolve finitely many labeled particles under the same interaction."""
    if T < 0:
        raise ValueError("T must be >= 0")
    pos = np.array([x % params.L for x in xi.positions], dtype=np.int64)
    if T == 0 or len(pos) == 0:
        return DualConfiguration(tuple(pos))
    bg = np.random.PCG64(rng.replica_seed(seed, replica))
    mod = backend.get_module()
    mod.labeled_walkers(pos, params.L, params.kernel.rates_array(),
                        params.k, T, bg)
    return DualConfiguration(tuple(pos))


# ---------------------------------------------------------------------------
# duality
# ---------------------------------------------------------------------------

def duality_single(m: int, n: int, k: float) -> float:
    """d(m, n) = n! Gamma(k) / ((n-m)! Gamma(k+m)) for m <= n, else 0.

    Evaluated in log-Gamma space; d(0, n) = 1 exactly.
    """
    if m < 0 or n < 0:
        raise ValueError("occupation numbers must be >= 0")
    if m > n:
        return 0.0
    if m == 0:
        return 1.0
    return float(math.exp(gammaln(n + 1) - gammaln(n - m + 1)
                          + gammaln(k) - gammaln(k + m)))


def duality_product(xi: DualConfiguration, eta: Configuration, k: float) -> float:
    """Product over sites of duality_single(xi_i, eta_i, k)."""
    out = 1.0
    L = eta.L
    for site, m in xi.site_counts().items():
        out *= duality_single(m, int(eta.occupancies[site % L]), k)
        if out == 0.0:
            break
    return out


def duality_check(xi: DualConfiguration, eta: Configuration,
                  params: SipParams, t: float, reps: int, seed: int):
    """Monte Carlo check of E_eta[D(xi, eta_t)] = E_xi[D(xi_t, eta)].

    Returns ((lhs, se_lhs), (rhs, se_rhs)); both sides are estimated with
    ``reps`` replicas on the same torus.
    """
    if xi.n > 3:
        raise ValueError("dual configuration limited to <= 3 particles")
    k = params.k
    lhs_vals = np.empty(reps)
    rhs_vals = np.empty(reps)
    for j in range(reps):
        eta_t = simulate(eta, params, t, seed, replica=2 * j)
        lhs_vals[j] = duality_product(xi, eta_t, k)
        xi_t = simulate_dual(xi, params, t, seed, replica=2 * j + 1)
        rhs_vals[j] = duality_product(xi_t, eta, k)
    lhs = float(lhs_vals.mean())
    rhs = float(rhs_vals.mean())
    se_l = float(lhs_vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    se_r = float(rhs_vals.std(ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    return (lhs, se_l), (rhs, se_r)


def centered_pair_correlation_mc(x: int, y: int, rho: float,
                                 params: SipParams, t: float, reps: int,
                                 seed: int):
    """MC estimate of E_nu[(eta_t(x) - rho)(eta_t(y) - rho)] from Poisson
    product initial data; returns (estimate, standard error)."""
    vals = np.empty(reps)
    L = params.L
    for j in range(reps):
        eta0 = sample_poisson_product(rho, L, seed, replica=2 * j)
        eta_t = simulate(eta0, params, t, seed, replica=2 * j + 1)
        vals[j] = (eta_t.occupancies[x % L] - rho) * (eta_t.occupancies[y % L] - rho)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(reps))


def pair_correlation_formula(x: int, y: int, rho: float, sigma: float,
                             k: float, p_diff_zero: float) -> float:
    """Duality form of the centered pair correlation:
    (1 + 1[x=y]/k)(k sigma/(k+1) - rho^2) P(gap walk from x-y is at 0)
    + 1[x=y](rho^2/k + rho)."""
    same = 1.0 if x == y else 0.0
    return ((1.0 + same / k) * (k * sigma / (k + 1.0) - rho * rho) * p_diff_zero
            + same * (rho * rho / k + rho))
