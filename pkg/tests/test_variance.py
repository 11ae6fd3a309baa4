import math

import numpy as np
import pytest

from sipsticky import variance as fv
from sipsticky.jump_kernel import PRESETS
from sipsticky.testfunctions import TestFunction, poly_bump, raised_cosine

NN = PRESETS["nn"]
SQRT2 = math.sqrt(2.0)


def zero_function():
    return TestFunction(name="zero", f=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                        fprime=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                        support=(-1.0, 1.0), int_f=0.0, l2sq=0.0, grad_l2sq=0.0)


# ---------------------------------------------------------------------------
# analytic limit
# ---------------------------------------------------------------------------

def test_limit_matches_alt_representation():
    phi = raised_cosine(0.0, 1.0)
    for g, t in ((0.5, 0.3), (1.0, 1.0), (2.0, 0.1)):
        a = fv.limit_variance(t, phi, 1.0, g)
        b = fv.limit_variance_alt(t, phi, 1.0, g)
        assert abs(a - b) <= 1e-6


def test_limit_zero_function():
    phi = zero_function()
    assert fv.limit_variance(0.5, phi, 1.0, 1.0) == pytest.approx(0.0, abs=1e-12)
    assert fv.limit_variance_alt(0.5, phi, 1.0, 1.0) == pytest.approx(0.0, abs=1e-12)


def test_limit_small_time_vanishes():
    phi = raised_cosine(0.0, 1.0)
    g = 1.0
    scale = SQRT2 * g * phi.l2sq
    assert abs(fv.limit_variance(1e-6, phi, 1.0, g)) <= 1e-4 * scale


def test_limit_long_time_plateau():
    phi = raised_cosine(0.0, 1.0)
    g = 1.0
    plateau = SQRT2 * g * phi.l2sq
    val = fv.limit_variance(4e4, phi, 1.0, g)
    assert abs(val - plateau) / plateau <= 0.01


def test_limit_monotone_in_t_endpoints():
    phi = poly_bump(0.0, 1.0)
    g = 1.0
    ts = [0.05, 0.2, 1.0, 5.0, 40.0]
    vals = [fv.limit_variance(t, phi, 1.0, g) for t in ts]
    # trend logged: increasing from ~0 toward the plateau
    assert all(a < b for a, b in zip(vals, vals[1:]))
    assert vals[0] > 0
    assert vals[-1] < SQRT2 * g * phi.l2sq


def test_alt_nonnegative():
    phi = raised_cosine(0.4, 0.8)
    for g, t in ((0.5, 0.2), (1.0, 1.0), (2.0, 5.0)):
        assert fv.limit_variance_alt(t, phi, 1.0, g) >= -1e-8


def test_density_scaling_covariance():
    # replacing rho by c rho multiplies the limit by c^2 exactly
    phi = raised_cosine(0.0, 1.0)
    g, t, c = 1.0, 0.7, 3.0
    a = fv.limit_variance(t, phi, 1.0, g)
    b = fv.limit_variance(t, phi, c, g)
    assert b == pytest.approx(c * c * a, rel=1e-12)


# ---------------------------------------------------------------------------
# finite N
# ---------------------------------------------------------------------------

def test_finite_variance_t_zero_collapses():
    phi = raised_cosine(0.0, 1.0)
    rho, g, N = 1.0, 1.0, 20
    for sigma in (rho * rho, 2.5 * rho * rho):
        got = fv.finite_variance(N, 0.0, phi, rho, sigma, g, NN,
                                 check_window=False)
        xs = np.arange(-N, N + 1)
        a0 = float(np.sum(phi(xs / N) ** 2))
        want = a0 * (sigma - rho * rho + rho) / (N * N)
        assert got == pytest.approx(want, rel=1e-12)


def test_finite_variance_zero_function():
    phi = zero_function()
    assert fv.finite_variance(10, 0.1, phi, 1.0, 1.0, 1.0, NN,
                              check_window=False) == 0.0


def test_finite_variance_scaling_structure():
    # The finite-N formula is quadratic in rho except for the Poisson
    # shot-noise diagonal rho A(0) / N^2, which is linear; so
    # F(c rho) = c^2 (F(rho) - rho A0/N^2) + c rho A0/N^2 exactly,
    # and pure c^2 covariance holds only in the limit formula.
    phi = raised_cosine(0.0, 1.0)
    g, t, c, N = 1.0, 0.05, 2.0, 15
    a = fv.finite_variance(N, t, phi, 1.0, fv.sigma_poisson(1.0), g, NN,
                           check_window=False)
    b = fv.finite_variance(N, t, phi, c, fv.sigma_poisson(c), g, NN,
                           check_window=False)
    xs = np.arange(-N, N + 1)
    shot = float(np.sum(phi(xs / N) ** 2)) / (N * N)
    assert b == pytest.approx(c * c * (a - shot) + c * shot, rel=1e-12)


def test_finite_variance_approaches_limit():
    phi = raised_cosine(0.0, 1.0)
    g, rho, t = 1.0, 1.0, 0.1
    lim = fv.limit_variance(t, phi, rho, g)
    errs = [abs(fv.finite_variance(N, t, phi, rho, rho * rho, g, NN) - lim)
            for N in (10, 20, 40)]
    assert errs[0] > errs[1] > errs[2]


def test_sigma_helpers():
    assert fv.sigma_poisson(2.0) == 4.0
    assert fv.sigma_stationary(2.0, 1.0) == pytest.approx(8.0)


# ---------------------------------------------------------------------------
# uncentred second moment
# ---------------------------------------------------------------------------

def test_uncentred_both_routes_agree():
    phi = raised_cosine(0.0, 1.0)
    val = fv.uncentred_second_moment(1.0, phi, 1.0, 1.0, check=True)
    want = 1.0 * phi.int_f**2 + fv.limit_variance(1.0, phi, 1.0, 1.0)
    assert val == pytest.approx(want, rel=1e-12)


def test_uncentred_zero_function():
    phi = zero_function()
    assert fv.uncentred_second_moment(0.5, phi, 1.0, 1.0, check=False) == \
        pytest.approx(0.0, abs=1e-12)


def test_uncentred_long_time():
    phi = raised_cosine(0.0, 1.0)
    rho, g = 1.2, 1.0
    val = fv.uncentred_second_moment(4e4, phi, rho, g, check=False)
    want = rho**2 * phi.int_f**2 + SQRT2 * g * rho**2 * phi.l2sq
    assert val == pytest.approx(want, rel=0.02)


# ---------------------------------------------------------------------------
# Monte Carlo oracle for the finite-N duality formula
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_finite_variance_against_direct_simulation():
    from sipsticky import sip
    from sipsticky.difference import ScaledDiffParams

    phi = raised_cosine(0.0, 1.0)
    N, g, rho, t = 10, 1.0, 1.0, 0.05
    L = 32 * N
    sp = ScaledDiffParams(N=N, gamma=g, kernel=NN)
    params = sip.SipParams(k=sp.k_N, kernel=NN, L=L)
    horizon = sp.alpha(t)
    reps = 10_000
    xs = np.arange(-N, N + 1)
    weights = phi(xs / N) / N
    vals = np.empty(reps)
    for j in range(reps):
        eta0 = sip.sample_poisson_product(rho, L, seed=505, replica=2 * j)
        eta = sip.simulate(eta0, params, horizon, seed=505, replica=2 * j + 1)
        field = float(np.dot(weights, eta.occupancies[xs % L] - rho))
        vals[j] = field * field
    got = vals.mean()
    se = vals.std(ddof=1) / math.sqrt(reps)
    want = fv.finite_variance(N, t, phi, rho, fv.sigma_poisson(rho), g, NN)
    assert abs(got - want) <= 4 * se
