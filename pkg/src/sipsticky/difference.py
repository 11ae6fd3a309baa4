"""The two-particle gap walk on Z and its condensively scaled version.

The walk jumps w -> w + r at rate 2 p(|r|) (k + 1[r == -w]): a free
finite-range walk away from the origin, pulled onto 0 from within jump
range. Transition probabilities are computed exactly (to a stated
truncation error) by uniformization on a reflecting window, and paths by
exact event-driven simulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from . import backend, rng
from .errors import WindowTooSmall
from .jump_kernel import FiniteRangeKernel

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class DiffChainParams:
    k: float
    kernel: FiniteRangeKernel

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("k must be positive")


@dataclass(frozen=True)
class ScaledDiffParams:
    """Condensive scaling: lattice 1/N, time factor gamma N^3 t / sqrt2,
    inclusion parameter k_N = 1/(sqrt2 gamma N)."""

    N: int
    gamma: float
    kernel: FiniteRangeKernel

    def __post_init__(self):
        if self.N < 1 or self.gamma <= 0:
            raise ValueError("need N >= 1 and gamma > 0")

    @property
    def k_N(self) -> float:
        return 1.0 / (SQRT2 * self.gamma * self.N)

    def alpha(self, t: float) -> float:
        """Physical chain time corresponding to macroscopic time t."""
        return self.gamma * self.N**3 * t / SQRT2

    def unscaled(self) -> DiffChainParams:
        return DiffChainParams(k=self.k_N, kernel=self.kernel)


@dataclass(frozen=True)
class TruncationWindow:
    """Reflecting truncation to {-M..M}."""

    M: int

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")


def jump_rates(w: int, params: DiffChainParams) -> dict:
    """Map r -> rate of jumping from w to w + r, for r in the jump set."""
    out = {}
    for r in params.kernel.displacements():
        r = int(r)
        out[r] = 2.0 * params.kernel.p(r) * (params.k + (1.0 if r == -w else 0.0))
    return out


def total_rate(w: int, params: DiffChainParams) -> float:
    return float(sum(jump_rates(w, params).values()))


def stationary_weight(w: int, k: float) -> float:
    """Reversible weight: 1 + 1/k at the origin, 1 elsewhere.

    Independent of the kernel range.
    """
    return 1.0 + 1.0 / k if w == 0 else 1.0


def detailed_balance_residual(w: int, r: int, params: DiffChainParams) -> float:
    """nu(w) rate(w -> w+r) - nu(w+r) rate(w+r -> w); zero up to rounding."""
    k = params.k
    fwd = stationary_weight(w, k) * jump_rates(w, params)[r]
    bwd = stationary_weight(w + r, k) * jump_rates(w + r, params)[-r]
    return fwd - bwd


def simulate_path(w0: int, params: DiffChainParams, t: float, seed: int,
                  replica: int = 0, sticky: bool = True) -> int:
    """Exact end state of one path; ``sticky=False`` drops the origin pull."""
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return int(w0)
    bg = np.random.PCG64(rng.replica_seed(seed, replica))
    mod = backend.get_module()
    return int(mod.diff_walk_final(int(w0), params.k,
                                   params.kernel.rates_array(), t, bg, sticky))


def simulate_many(w0: int, params: DiffChainParams, t: float, seed: int,
                  replicas: int, sticky: bool = True) -> np.ndarray:
    """End states of independent replicas (replica j uses seed ^ splitmix(j))."""
    out = np.empty(replicas, dtype=np.int64)
    mod = backend.get_module()
    pw = params.kernel.rates_array()
    for j in range(replicas):
        if t == 0:
            out[j] = w0
            continue
        bg = np.random.PCG64(rng.replica_seed(seed, j))
        out[j] = mod.diff_walk_final(int(w0), params.k, pw, t, bg, sticky)
    return out


# ---------------------------------------------------------------------------
# uniformization
# ---------------------------------------------------------------------------

def default_window(params: DiffChainParams, t: float, w0: int = 0) -> TruncationWindow:
    """Initial window from the diffusive spread, 6 standard deviations plus
    slack; the doubling check in :func:`transition_prob` verifies it."""
    ker = params.kernel
    var_rate = 4.0 * params.k * ker.chi  # free-walk variance growth
    spread = math.sqrt(var_rate * max(t, 0.0) + 1.0)
    M = int(math.ceil(6.0 * spread)) + ker.range + abs(int(w0)) + 2
    return TruncationWindow(M=M)


def _poisson_weights(mu: float, tail: float = 5e-11):
    """pmf array over m = 0..hi with both tails below ``tail``; entries
    outside [lo, hi] are zero so they are skipped in the accumulation."""
    if mu <= 0:
        return np.array([1.0]), 0.0
    lo = int(poisson.ppf(tail, mu))
    hi = int(poisson.ppf(1.0 - tail, mu)) + 1
    m = np.arange(lo, hi + 1, dtype=np.float64)
    logpmf = m * math.log(mu) - mu - gammaln(m + 1.0)
    pmf = np.zeros(hi + 1)
    pmf[lo:] = np.exp(logpmf)
    trunc = abs(1.0 - pmf.sum())
    return pmf, trunc


def transition_row(w0: int, params: DiffChainParams, t: float,
                   window: TruncationWindow):
    """(states, probs, trunc_error): the full row p_t(w0, .) on the window."""
    M = window.M
    if abs(w0) > M:
        raise ValueError("start state outside window")
    states = np.arange(-M, M + 1)
    if t == 0:
        probs = np.zeros(2 * M + 1)
        probs[M + w0] = 1.0
        return states, probs, 0.0
    ker = params.kernel
    pw = ker.rates_array()
    # free outflow 2k sum_{r in A} p(r) plus the largest origin pull
    lam = 2.0 * params.k * ker.total_weight + 2.0 * float(pw.max())
    pmf, trunc = _poisson_weights(lam * t)
    acc = np.zeros(2 * M + 1)
    mod = backend.get_module()
    mod.uniformize_accumulate(M, int(w0), params.k, pw, lam, pmf, acc)
    return states, acc, trunc


def transition_prob(w0: int, params: DiffChainParams, t: float,
                    window: TruncationWindow | None = None,
                    target: int = 0, tol: float = 1e-8):
    """P(w_t = target | w_0 = w0) with an a-posteriori error bound.

    Computes on the window and again on its double; the difference plus
    the Poisson truncation is returned as ``error_bound``. Raises
    WindowTooSmall if the doubling moved the value by more than ``tol``.
    """
    if window is None:
        window = default_window(params, t, w0)
    _, probs, trunc = transition_row(w0, params, t, window)
    p1 = float(probs[window.M + target])
    _, probs2, trunc2 = transition_row(w0, params, t, TruncationWindow(2 * window.M))
    p2 = float(probs2[2 * window.M + target])
    drift = abs(p2 - p1)
    if drift > tol:
        raise WindowTooSmall(
            f"window M={window.M}: doubling moved p by {drift:.3e} > tol {tol:.3e}")
    return p2, drift + trunc + trunc2


def scaled_transition(v: float, t: float, sp: ScaledDiffParams,
                      window: TruncationWindow | None = None,
                      tol: float = 1e-8):
    """P(w_N(t) = 0) from w_N(0) = v, v on the grid (1/N)Z.

    Runs the unscaled chain at inclusion parameter k_N for time alpha(N, t);
    the start state N v is computed in integers.
    """
    w0 = int(round(v * sp.N))
    params = sp.unscaled()
    p, _err = transition_prob(w0, params, sp.alpha(t), window, tol=tol)
    return p


def scaled_transition_row(sp: ScaledDiffParams, t: float,
                          window: TruncationWindow | None = None):
    """Row p_alpha(0, .) of the scaled chain, for bulk consumers.

    By reversibility p_alpha(w, 0) = (1 + 1/k_N) p_alpha(0, w) for w != 0,
    so one run serves every start state.
    """
    params = sp.unscaled()
    alpha = sp.alpha(t)
    if window is None:
        window = default_window(params, alpha, 0)
    return transition_row(0, params, alpha, window)


def transition_prob_mc(w0: int, params: DiffChainParams, t: float, seed: int,
                       replicas: int, target: int = 0):
    """Monte Carlo estimate (p_hat, standard_error) of p_t(w0, target)."""
    ends = simulate_many(w0, params, t, seed, replicas)
    hits = float(np.count_nonzero(ends == target))
    p = hits / replicas
    se = math.sqrt(max(p * (1.0 - p), 1e-300) / replicas)
    return p, se
