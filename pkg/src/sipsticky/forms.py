"""Discrete Dirichlet-form workbench on the grid (1/N)Z.

Two quadratic forms act on finitely supported grid functions:

  R_N: the diffusively rescaled free-walk form,
       (N/2) sum_w sum_{r in A} p(|r|) (g(w + r/N) - g(w))^2
  E_N: the gap-walk form, which adds the origin bonds
       E_N(g) = R_N(g) + sqrt2 gamma N^2 sum_{r in A} p(|r|) (g(r/N) - g(0))^2

both also evaluated literally as -sum g . (generator g) . measure for a
cross-check. The flattening map psi_N removes the origin-bond excess
exactly, and E_N(psi_N f) converges at rate 1/N to chi * integral f'^2
with chi = sum_{r >= 1} r^2 p(r) (the symmetrized Taylor constant; half
that value is also reported for comparison with the generator-halved
convention). Dual (Legendre-transform) values of R_N are computed by two
independent routes, a banded solve and a Fourier sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solveh_banded

from .errors import SingularSystem
from .jump_kernel import FiniteRangeKernel
from .quadrature import gl_adaptive, gl_fixed
from .testfunctions import TestFunction

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class FormParams:
    gamma: float
    kernel: FiniteRangeKernel
    N: int

    def __post_init__(self):
        if self.gamma <= 0 or self.N < 1:
            raise ValueError("need gamma > 0 and N >= 1")


@dataclass(frozen=True)
class GridFunction:
    """Function on (1/N)Z with finite support window and constant fill.

    ``values[j]`` is the value at site (offset + j)/N; outside the window
    the function equals ``fill`` (0 for compactly supported functions,
    the constant itself for constants).
    """

    N: int
    offset: int
    values: np.ndarray
    fill: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values",
                           np.ascontiguousarray(self.values, dtype=np.float64))

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.values))

    def at_index(self, i: np.ndarray) -> np.ndarray:
        """Values at integer sites i (vectorized, fill outside)."""
        i = np.asarray(i)
        j = i - self.offset
        ok = (j >= 0) & (j < len(self.values))
        out = np.full(i.shape, self.fill, dtype=np.float64)
        out[ok] = self.values[j[ok]]
        return out

    def value_at_zero(self) -> float:
        return float(self.at_index(np.array([0]))[0])

    @classmethod
    def from_function(cls, f, N: int, W: float, fill: float = 0.0):
        """Restrict callable f to the window [-W, W] of (1/N)Z."""
        m = int(math.ceil(W * N))
        idx = np.arange(-m, m + 1)
        return cls(N=N, offset=-m, values=np.asarray(f(idx / N), dtype=float),
                   fill=fill)

    @classmethod
    def constant(cls, c: float, N: int, W: float):
        g = cls.from_function(lambda x: np.full_like(x, c, dtype=float), N, W,
                              fill=c)
        return g


def phi_n(f: TestFunction, N: int, W: float | None = None) -> GridFunction:
    """Pointwise restriction of f to the grid; window covers the support."""
    if W is None:
        W = max(abs(f.support[0]), abs(f.support[1]))
    return GridFunction.from_function(f.f, N, W)


def psi_n(f: TestFunction, N: int, kernel: FiniteRangeKernel,
          W: float | None = None) -> GridFunction:
    """Recovery modification of phi_n: equals f(0) on the jump set
    (1/N)({-R..R} \\ {0}), f elsewhere."""
    g = phi_n(f, N, W)
    vals = g.values.copy()
    R = kernel.range
    f0 = float(f(np.zeros(1))[0])
    for r in range(-R, R + 1):
        if r == 0:
            continue
        j = r - g.offset
        if 0 <= j < len(vals):
            vals[j] = f0
    return GridFunction(N=g.N, offset=g.offset, values=vals, fill=g.fill)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def norm_rw_sq(g: GridFunction) -> float:
    """Squared norm with the counting measure weighted 1/N.

    Finite only for fill = 0; constants are excluded by contract.
    """
    return float(np.sum((g.values - g.fill) ** 2) / g.N
                 + (0.0 if g.fill == 0.0 else math.inf))


def norm_sip_sq(g: GridFunction, gamma: float) -> float:
    """norm_rw_sq plus the origin atom sqrt2 gamma g(0)^2."""
    return norm_rw_sq(g) + SQRT2 * gamma * g.value_at_zero() ** 2


# ---------------------------------------------------------------------------
# quadratic forms: symmetrized (authoritative) and literal
# ---------------------------------------------------------------------------

def _pad_indices(g: GridFunction, R: int):
    lo = g.offset - R
    hi = g.offset + len(g.values) - 1 + R
    idx = np.arange(lo, hi + 1)
    return idx, g.at_index(idx)


def form_r_n(g: GridFunction, kernel: FiniteRangeKernel, N: int) -> float:
    """(N/2) sum_w sum_{r in A} p(|r|) (g(w+r) - g(w))^2; nonnegative."""
    R = kernel.range
    idx, v = _pad_indices(g, R)
    tot = 0.0
    for r in range(1, R + 1):
        d = v[r:] - v[:-r]
        tot += 2.0 * kernel.p(r) * float(np.dot(d, d))
    return 0.5 * N * tot


def form_gap(g: GridFunction, params: FormParams) -> float:
    """Closed-form difference E_N - R_N: the origin-bond excess
    sqrt2 gamma N^2 sum_{r in A} p(|r|) (g(r) - g(0))^2."""
    ker, N = params.kernel, params.N
    g0 = g.value_at_zero()
    tot = 0.0
    for r in ker.displacements():
        gr = float(g.at_index(np.array([r]))[0])
        tot += ker.p(int(r)) * (gr - g0) ** 2
    return SQRT2 * params.gamma * N * N * tot


def form_e_n(g: GridFunction, params: FormParams) -> float:
    """Gap-walk Dirichlet form, symmetrized representation."""
    return form_r_n(g, params.kernel, params.N) + form_gap(g, params)


def form_r_n_literal(g: GridFunction, kernel: FiniteRangeKernel, N: int) -> float:
    """- sum_w g(w) (Delta_N g)(w) / N with the centered second difference.

    Sites beyond the padded window contribute nothing: there g is locally
    the fill constant and the second difference vanishes.
    """
    R = kernel.range
    idx, v = _pad_indices(g, R)
    lap = np.zeros(len(idx))
    for r in range(1, R + 1):
        lap += kernel.p(r) * (g.at_index(idx + r) - 2.0 * v + g.at_index(idx - r))
    lap *= N * N
    return -float(np.dot(v, lap)) / N


def form_e_n_literal(g: GridFunction, params: FormParams) -> float:
    """- sum_w g(w) sum_r 2 p(r) (N^2/2 + (N^3 gamma/sqrt2) 1[r=-w])
    (g(w+r) - g(w)) nu(w), the double sum written out."""
    ker, N, gamma = params.kernel, params.N, params.gamma
    R = ker.range
    idx, v = _pad_indices(g, R)
    tot = 0.0
    for j, w in enumerate(idx):
        nu = 1.0 / N + (SQRT2 * gamma if w == 0 else 0.0)
        s = 0.0
        for r in range(-R, R + 1):
            if r == 0:
                continue
            vr = float(g.at_index(np.array([w + r]))[0])
            rate = 2.0 * ker.p(r) * (N * N / 2.0
                                     + (N**3 * gamma / SQRT2 if r == -w else 0.0))
            s += rate * (vr - v[j])
        tot += v[j] * s * nu
    return -tot


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------

def mosco_flattened_sequence(f: TestFunction, Ns, params_gamma: float,
                             kernel: FiniteRangeKernel):
    """E_N(psi_N f) along Ns with Richardson extrapolation and fitted order.

    Returns dict with per-N values, the extrapolated limit (order-1
    Richardson on the last pair), the observed order, and the two
    reference constants chi * I f'^2 and (chi/2) * I f'^2.
    """
    Ns = sorted(int(n) for n in Ns)
    vals = []
    for N in Ns:
        params = FormParams(gamma=params_gamma, kernel=kernel, N=N)
        g = psi_n(f, N, kernel)
        vals.append(form_e_n(g, params))
    vals = np.array(vals)
    extrapolated = 2.0 * vals[-1] - vals[-2]
    errs = np.abs(vals - extrapolated)
    mask = errs > 0
    order = float(-np.polyfit(np.log(np.array(Ns)[mask]), np.log(errs[mask]), 1)[0]) \
        if np.count_nonzero(mask) >= 2 else float("nan")
    chi = kernel.chi
    return {
        "N": list(Ns),
        "E_N_psi": vals.tolist(),
        "extrapolated": float(extrapolated),
        "order": order,
        "limit_symmetrized": chi * f.grad_l2sq,
        "limit_halved": 0.5 * chi * f.grad_l2sq,
    }


def continuum_forms(f: TestFunction, gamma: float, chi: float):
    """(half Dirichlet integral, chi-scaled Dirichlet integral) of f."""
    lo, hi = f.support
    e = gl_adaptive(lambda x: f.fprime(x) ** 2, lo, hi, tol=1e-12)
    return 0.5 * e, 0.5 * chi * e


# ---------------------------------------------------------------------------
# potential kernel and dual form
# ---------------------------------------------------------------------------

def potential_kernel(n: int, kernel: FiniteRangeKernel) -> float:
    """a(n) = (1/2pi) int (1 - cos nk) / phihat(k) dk over (-pi, pi], with
    phihat(k) = sum_{r>=1} 2 p(r) (1 - cos rk).

    Convention: the p-weighted discrete Laplacian of a is +delta_0, so
    a(n) = |n| for the nearest-neighbor kernel. The integrand extends
    analytically through k = 0, so Gauss-Legendre converges spectrally.
    """
    n = abs(int(n))
    if n == 0:
        return 0.0
    w = kernel.rates_array()

    def integrand(k):
        # 1 - cos(x) written as 2 sin^2(x/2): no cancellation near k = 0
        k = np.asarray(k)
        num = 2.0 * np.sin(0.5 * n * k) ** 2
        den = np.zeros_like(k)
        for r in range(1, kernel.range + 1):
            den += 4.0 * w[r - 1] * np.sin(0.5 * r * k) ** 2
        return num / den

    # Gauss-Legendre nodes are interior, so the removable 0/0 at k = 0 is
    # never evaluated
    val = gl_adaptive(integrand, 0.0, math.pi, tol=1e-12,
                      n0=max(128, 8 * n), max_doublings=6)
    return val / math.pi


def laplacian_of_potential_kernel(n: int, kernel: FiniteRangeKernel) -> float:
    """sum_{r in A} p(|r|) (a(n + r) - a(n)); equals 1 at n = 0, else 0."""
    out = 0.0
    an = potential_kernel(n, kernel)
    for r in kernel.displacements():
        out += kernel.p(int(r)) * (potential_kernel(n + int(r), kernel) - an)
    return out


def grid_mean(g: GridFunction) -> float:
    """sum g / N, the discrete integral."""
    return float(np.sum(g.values)) / g.N


def dual_form_rw_routes(g: GridFunction, kernel: FiniteRangeKernel,
                        margin: int | None = None):
    """The Legendre dual of R_N at g by two independent routes.

    Route A maximizes <g, h>_rw - R_N(h) exactly: the stationarity
    condition is the banded positive-semidefinite system
    2 (-Delta_N) h = g on a window with free boundary, solved with the
    zero-mean gauge fixed; the value is <g, h>_rw / 2. Route B is the
    Fourier form (1/(8 pi N^3)) int |ghat|^2 / phihat. Inputs whose grid
    sum is nonzero have an infinite dual; callers check that first.
    """
    N = g.N
    R = kernel.range
    if margin is None:
        margin = max(8 * R, 32)
    # --- route A: banded solve on [support - margin, support + margin]
    lo = g.offset - margin
    hi = g.offset + len(g.values) - 1 + margin
    sites = np.arange(lo, hi + 1)
    n = len(sites)
    rhs = g.at_index(sites) / 2.0
    # (-Delta_N) with free boundary: banded symmetric, bands 0..R
    bands = np.zeros((R + 1, n))
    for r in range(1, R + 1):
        p = kernel.p(r)
        bands[0, :] += p * 2.0
        bands[0, :r] -= p
        bands[0, n - r:] -= p
        bands[r, : n - r] -= p
    bands *= N * N
    # gauge: add rank-one ones.ones^T / n; keeps symmetry, kills the null
    # space exactly because rhs is mean-zero
    try:
        h = _solve_banded_gauged(bands, rhs, R)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    legendre = float(np.dot(g.at_index(sites), h)) / (2.0 * N)
    # --- route B: Fourier with the subtracted-mean trick near k = 0
    w = kernel.rates_array()

    def fourier(m_nodes: int) -> float:
        k = (np.arange(m_nodes) + 0.5) * math.pi / m_nodes
        gh = np.zeros(m_nodes, dtype=complex)
        for site, val in zip(g.sites, g.values):
            if val != 0.0:
                gh += val * (np.exp(1j * k * site) - 1.0)
        ph = np.zeros(m_nodes)
        for r in range(1, R + 1):
            ph += 4.0 * w[r - 1] * np.sin(0.5 * r * k) ** 2
        return float(np.sum(np.abs(gh) ** 2 / ph)) * 2.0 * (math.pi / m_nodes) \
            / (8.0 * math.pi * N**3)

    f1, f2 = fourier(2048), fourier(4096)
    if abs(f1 - f2) > 1e-10 * max(1.0, abs(f2)):
        f2 = fourier(16384)
    return legendre, f2


def _solve_banded_gauged(bands_lower, rhs, R):
    """Solve the singular free-boundary system in the mean-zero gauge."""
    n = bands_lower.shape[1]
    # dense assembly of A + ones ones^T/n (rank-one gauge term is dense,
    # so solve densely; windows here are small)
    A = np.zeros((n, n))
    A[np.arange(n), np.arange(n)] = bands_lower[0]
    for r in range(1, R + 1):
        i = np.arange(n - r)
        A[i, i + r] = bands_lower[r, :n - r]
        A[i + r, i] = bands_lower[r, :n - r]
    A += np.ones((n, n)) / n
    return np.linalg.solve(A, rhs)


def dual_form_rw(g: GridFunction, kernel: FiniteRangeKernel,
                 mean_tol: float = 1e-8, agree_tol: float = 1e-8) -> float:
    """Dual value of R_N at g; +inf when the grid sum is nonzero.

    Raises SingularSystem when the two routes disagree beyond
    ``agree_tol`` (window too small for the support).
    """
    if abs(grid_mean(g)) > mean_tol:
        return math.inf
    leg, fou = dual_form_rw_routes(g, kernel)
    if abs(leg - fou) > agree_tol * max(1.0, abs(leg), abs(fou)):
        raise SingularSystem(
            f"legendre {leg} and fourier {fou} routes disagree")
    return 0.5 * (leg + fou)
