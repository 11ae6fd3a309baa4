"""Time-dependent variance of the rescaled density fluctuation field.

The field is X_N(t) = (1/N) sum_x phi(x/N) (eta_{alpha(N,t)}(x) - rho).
Its second moment reduces, through self-duality, to the two-particle gap
walk: with sigma the second factorial moment of the initial product
measure,

  E[X_N^2] = (1/N^2) sum_{x,y} phi(x/N) phi(y/N)
             (1 + sqrt2 gamma N 1[x=y]) (sigma/(1 + sqrt2 gamma N) - rho^2)
             p_alpha(x - y, 0)
           + (1/N^2) sum_x phi(x/N)^2 (sqrt2 gamma N rho^2 + rho),

and the N -> infinity limit is expressed through the sticky kernel:

  lim E[X_N^2] = - rho^2 II phi(x) phi(y) hit(x - y) dx dy
               + sqrt2 gamma rho^2 (1 - atom) I phi^2,

where hit/atom are the sticky hitting probability and origin mass of the
sticky module. Two independent quadrature representations of the limit,
plus the uncentred second moment via the arbitrary-start kernel, are
implemented as cross-checks of each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sticky
from .difference import ScaledDiffParams, TruncationWindow, default_window, \
    scaled_transition_row, transition_row
from .jump_kernel import FiniteRangeKernel
from .quadrature import gl_adaptive, gl_fixed
from .testfunctions import TestFunction

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class VarianceInputs:
    rho: float
    gamma: float
    t: float
    sigma: float
    N: int | None = None

    def __post_init__(self):
        if self.rho <= 0 or self.sigma < 0:
            raise ValueError("need rho > 0 and sigma >= 0")


def sigma_poisson(rho: float) -> float:
    """Second factorial moment of Poisson(rho)."""
    return rho * rho


def sigma_stationary(rho: float, k: float) -> float:
    """Second factorial moment of the stationary negative-binomial marginal."""
    return rho * rho * (k + 1.0) / k


def phi_correlation(phi: TestFunction, d: float, n: int = 192) -> float:
    """C(d) = integral phi(x) phi(x - d) dx; even in d."""
    lo, hi = phi.support
    a = lo + max(d, 0.0)
    b = hi + min(d, 0.0)
    if b <= a:
        return 0.0
    return gl_fixed(lambda x: phi(x) * phi(x - d), a, b, n)


# ---------------------------------------------------------------------------
# finite N
# ---------------------------------------------------------------------------

def finite_variance(N: int, t: float, phi: TestFunction, rho: float,
                    sigma: float, gamma: float, kernel: FiniteRangeKernel,
                    window: TruncationWindow | None = None,
                    check_window: bool = True) -> float:
    """E[X_N^2] by the exact duality formula at finite N."""
    if N < 1:
        raise ValueError("N must be >= 1")
    sp = ScaledDiffParams(N=N, gamma=gamma, kernel=kernel)
    lo, hi = phi.support
    xs = np.arange(math.ceil(lo * N), math.floor(hi * N) + 1)
    fv = phi(xs / N)
    span = len(xs) - 1
    if window is None:
        base = default_window(sp.unscaled(), sp.alpha(t), 0)
        window = TruncationWindow(base.M + span)
    states, probs, _ = scaled_transition_row(sp, t, window)
    if check_window:
        _, probs2, _ = scaled_transition_row(sp, t, TruncationWindow(2 * window.M))
        drift = abs(probs2[2 * window.M] - probs[window.M])
        if drift > 1e-8:
            from .errors import WindowTooSmall
            raise WindowTooSmall(f"doubling moved p(0,0) by {drift:.2e}")
        probs, window = probs2, TruncationWindow(2 * window.M)
    M = window.M
    kN = sp.k_N
    nu0 = 1.0 + 1.0 / kN
    # p_alpha(d, 0) from the single row started at 0, by reversibility
    dmax = span
    d = np.arange(-dmax, dmax + 1)
    p_d0 = probs[M + d] * nu0
    p_d0[dmax] = probs[M]  # d = 0: no weight ratio
    # A(d) = sum_x phi(x/N) phi((x-d)/N)
    A = np.correlate(fv, fv, mode="full")  # d from -span..span
    gN = SQRT2 * gamma * N
    s1 = float(np.sum(A * p_d0))
    coeff = sigma / (1.0 + gN) - rho * rho
    a0 = float(A[span])
    return (coeff * (s1 + gN * a0 * probs[M]) + (gN * rho * rho + rho) * a0) / (N * N)


# ---------------------------------------------------------------------------
# the limit, two representations
# ---------------------------------------------------------------------------

def limit_variance(t: float, phi: TestFunction, rho: float, gamma: float,
                   tol: float = 1e-10) -> float:
    """Limit of E[X_N^2]: correlation integral against the sticky
    hitting kernel plus the atom-deficit diagonal term."""
    if t <= 0:
        raise ValueError("t must be > 0")
    lo, hi = phi.support
    D = hi - lo
    term1 = -2.0 * rho * rho * gl_adaptive(
        lambda d: phi_correlation_vec(phi, d) * sticky.hit_zero_prob(d, t, gamma),
        0.0, D, tol=tol)
    atom = sticky.mass_at_zero(t, gamma)
    term2 = SQRT2 * gamma * rho * rho * (1.0 - atom) * phi.l2sq
    return term1 + term2


def phi_correlation_vec(phi: TestFunction, d):
    d = np.asarray(d, dtype=float)
    if d.ndim == 0:
        return phi_correlation(phi, float(d))
    return np.array([phi_correlation(phi, float(x)) for x in d])


def limit_variance_alt(t: float, phi: TestFunction, rho: float, gamma: float,
                       tol: float = 1e-10) -> float:
    """Same limit in center-of-mass form:

    (sqrt2 gamma rho^2 / 2) I du [ phi(u/2)^2 (1 - atom)
        - I dv density(v) phi((u+v)/2) phi((u-v)/2) ].
    """
    if t <= 0:
        raise ValueError("t must be > 0")
    lo, hi = phi.support
    atom = sticky.mass_at_zero(t, gamma)

    def inner(u):
        vmax = min(2.0 * hi - u, u - 2.0 * lo)
        if vmax <= 0:
            return phi(u / 2.0) ** 2 * (1.0 - atom)
        val = gl_fixed(
            lambda v: sticky.density(v, t, gamma)
            * phi((u + v) / 2.0) * phi((u - v) / 2.0),
            0.0, vmax, 256)
        return phi(u / 2.0) ** 2 * (1.0 - atom) - 2.0 * val

    outer = gl_adaptive(lambda u: np.array([inner(float(x)) for x in np.atleast_1d(u)]),
                        2.0 * lo, 2.0 * hi, tol=tol)
    return 0.5 * SQRT2 * gamma * rho * rho * outer


# ---------------------------------------------------------------------------
# uncentred second moment and the arbitrary-start kernel cross-check
# ---------------------------------------------------------------------------

def _gaussian_pdf(x, var):
    return np.exp(-x * x / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def _j_interp(phi: TestFunction, t: float, gamma: float, n_cheb: int = 64):
    """Chebyshev fit (in sqrt tau) of J(tau) = I C(w) density(w, tau) dw."""
    lo, hi = phi.support
    D = hi - lo
    xi_nodes = 0.5 * math.sqrt(t) * (np.cos(np.pi * np.arange(n_cheb + 1) / n_cheb) + 1.0)
    vals = []
    for xi in xi_nodes:
        tau = xi * xi
        if tau <= 0:
            vals.append(0.0)
            continue
        vals.append(2.0 * gl_fixed(
            lambda w: phi_correlation_vec(phi, w) * sticky.density(w, tau, gamma),
            0.0, D, 192))
    fit = np.polynomial.chebyshev.Chebyshev.fit(
        xi_nodes, np.array(vals), deg=max(n_cheb - 16, 8),
        domain=[0.0, math.sqrt(t)])

    def J(tau):
        tau = np.clip(tau, 0.0, t)
        return fit(np.sqrt(tau))

    return J


def uncentred_second_moment(t: float, phi: TestFunction, rho: float,
                            gamma: float, check: bool = True,
                            check_tol: float = 1e-5):
    """lim E[Z_N^2] for the uncentred field Z_N = (1/N) sum phi(x/N) eta(x).

    Returns rho^2 (I phi)^2 + limit_variance. With ``check=True`` the same
    number is recomputed from the arbitrary-start sticky kernel (free part
    by the reflection principle, plus first-passage convolution with the
    origin-started kernel) and the two must agree to ``check_tol``.
    """
    base = rho * rho * phi.int_f**2 + limit_variance(t, phi, rho, gamma)
    if not check:
        return base
    direct = _uncentred_direct(t, phi, rho, gamma)
    if abs(direct - base) > check_tol * max(1.0, abs(base)):
        from .errors import QuadratureNotConverged
        raise QuadratureNotConverged(
            f"kernel representation {direct} vs duality form {base}")
    return base


def _uncentred_direct(t: float, phi: TestFunction, rho: float, gamma: float):
    """rho^2 I dv II phi(x) phi(y) pbar_t(v; dx, dy), computed from the
    v-started kernel: density part splits into the zero-avoiding free part
    (reflection principle) and paths through the origin (first-passage time
    convolved with the origin-started kernel, in half-normal form)."""
    lo, hi = phi.support
    D = hi - lo
    J = _j_interp(phi, t, gamma)
    sqrt2pi = math.sqrt(math.pi)

    def integrand(v):
        # v > 0; same-side free part
        avoid = gl_fixed(
            lambda w: phi_correlation_vec(phi, w)
            * (_gaussian_pdf(w - v, t) - _gaussian_pdf(w + v, t)),
            0.0, D, 192)
        # through-the-origin part: q = v / sqrt(2 s) turns the first-passage
        # density into a half-normal; q = qmin + y^2 then removes the sqrt
        # edge singularity of the remaining-time kernel
        qmin = v / math.sqrt(2.0 * t)

        def half_normal(y):
            q = qmin + y * y
            return 2.0 * y * np.exp(-q * q) * J(t - v * v / (2.0 * q * q))

        through = (2.0 / sqrt2pi) * gl_fixed(half_normal, 0.0, 3.0, 160)
        atom_part = sticky.hit_zero_prob(v, t, gamma) * phi.l2sq
        return avoid + through + atom_part

    vmax = D + 10.0 * math.sqrt(t)
    total = gl_adaptive(
        lambda v: np.array([integrand(float(x)) for x in np.atleast_1d(v)]),
        1e-12, vmax, tol=1e-8, n0=128, max_doublings=5)
    return 2.0 * rho * rho * total
