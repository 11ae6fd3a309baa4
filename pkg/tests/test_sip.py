import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sipsticky import sip
from sipsticky.jump_kernel import PRESETS
from sipsticky.sip import Configuration, DualConfiguration, SipParams

NN = PRESETS["nn"]
R2 = PRESETS["range2"]


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------

def test_poisson_product_moments():
    rho, L = 1.3, 1_000_000
    eta = sip.sample_poisson_product(rho, L, seed=1)
    occ = eta.occupancies.astype(float)
    se_mean = math.sqrt(rho / L)
    assert abs(occ.mean() - rho) <= 4 * se_mean
    fact = occ * (occ - 1.0)
    se_fact = fact.std(ddof=1) / math.sqrt(L)
    assert abs(fact.mean() - rho * rho) <= 4 * se_fact


def test_poisson_small_rho_mostly_empty():
    eta = sip.sample_poisson_product(1e-6, 10_000, seed=2)
    assert eta.total <= 3


def test_stationary_product_mean():
    rho, k, L = 2.0, 0.7, 500_000
    eta = sip.sample_stationary_product(rho, k, L, seed=3)
    occ = eta.occupancies.astype(float)
    var = rho * (1 + rho / k)  # negative binomial variance
    assert abs(occ.mean() - rho) <= 4 * math.sqrt(var / L)


def test_stationary_zero_probability():
    rho, k = 1.5, 0.9
    want = (k / (k + rho)) ** k
    assert sip.stationary_marginal_pmf(0, rho, k) == pytest.approx(want, rel=1e-12)


def test_stationary_approaches_poisson_in_k():
    # total-variation distance on a truncated range decreases in k
    rho = 1.0
    ns = np.arange(0, 60)
    tv = []
    for k in (0.5, 2.0, 8.0, 32.0):
        pm = sip.stationary_marginal_pmf(ns, rho, k)
        po = sip.poisson_marginal_pmf(ns, rho)
        tv.append(0.5 * np.abs(pm - po).sum())
    assert all(a > b for a, b in zip(tv, tv[1:]))


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

def test_simulate_t_zero_identity():
    eta0 = sip.sample_poisson_product(1.0, 32, seed=4)
    params = SipParams(k=1.0, kernel=NN, L=32)
    eta = sip.simulate(eta0, params, 0.0, seed=5)
    np.testing.assert_array_equal(eta.occupancies, eta0.occupancies)


@given(st.integers(0, 10_000), st.floats(0.1, 3.0))
@settings(max_examples=20, deadline=None)
def test_particle_conservation(seed, T):
    eta0 = sip.sample_poisson_product(0.8, 24, seed=seed)
    params = SipParams(k=0.5, kernel=R2, L=24)
    eta = sip.simulate(eta0, params, T, seed=seed + 1)
    assert eta.total == eta0.total
    assert np.all(eta.occupancies >= 0)


def test_single_particle_is_rate_k_walk():
    # one particle jumps at total rate k sum_{r in A} p(r); the event count
    # over [0, T] is Poisson with that mean
    k, T, reps = 0.8, 2.0, 4000
    params = SipParams(k=k, kernel=R2, L=31)
    from sipsticky import backend, rng
    mod = backend.get_module()
    counts = np.empty(reps)
    for j in range(reps):
        occ = np.zeros(31, dtype=np.int64)
        occ[15] = 1
        bg = np.random.PCG64(rng.replica_seed(606, j))
        counts[j] = mod.sip_gillespie(occ, R2.rates_array(), k, T, bg)
    lam = k * R2.total_weight * T
    assert abs(counts.mean() - lam) <= 4 * math.sqrt(lam / reps)
    # Poisson: variance equals the mean
    assert abs(counts.var(ddof=1) - lam) <= 4 * lam * math.sqrt(2.0 / reps)


@pytest.mark.slow
def test_stationarity_of_product_measure():
    # occupation histogram after dynamics matches the reversible marginal
    rho, k, T = 1.0, 1.0, 1.0
    L, reps = 2048, 8
    params = SipParams(k=k, kernel=NN, L=L)
    freqs = np.zeros((reps, 4))
    for j in range(reps):
        eta0 = sip.sample_stationary_product(rho, k, L, seed=70, replica=2 * j)
        eta = sip.simulate(eta0, params, T, seed=70, replica=2 * j + 1)
        for n in range(4):
            freqs[j, n] = np.mean(eta.occupancies == n)
    for n in range(4):
        want = sip.stationary_marginal_pmf(n, rho, k)
        got = freqs[:, n].mean()
        se = freqs[:, n].std(ddof=1) / math.sqrt(reps)
        assert abs(got - want) <= 4 * se, (n, got, want, se)


# ---------------------------------------------------------------------------
# duality functions
# ---------------------------------------------------------------------------

def test_duality_single_values():
    assert sip.duality_single(0, 5, 1.0) == 1.0
    assert sip.duality_single(2, 3, 1.0) == pytest.approx(3.0, rel=1e-12)
    assert sip.duality_single(4, 3, 1.0) == 0.0
    # d(1, n) = n / k
    assert sip.duality_single(1, 7, 2.0) == pytest.approx(3.5, rel=1e-12)


def test_duality_single_large_occupancy_no_overflow():
    val = sip.duality_single(3, 400, 0.5)
    assert np.isfinite(val) and val > 0


def test_duality_product_examples():
    occ = np.zeros(16, dtype=np.int64)
    occ[3], occ[7] = 5, 2
    eta = Configuration(occ)
    k = 1.5
    assert sip.duality_product(DualConfiguration(()), eta, k) == 1.0
    assert sip.duality_product(DualConfiguration((3,)), eta, k) == \
        pytest.approx(5.0 / k, rel=1e-12)
    assert sip.duality_product(DualConfiguration((7, 7, 7)), eta, k) == 0.0


def test_duality_product_multiplicative_over_disjoint_support():
    occ = np.zeros(20, dtype=np.int64)
    occ[2], occ[11] = 4, 6
    eta = Configuration(occ)
    k = 0.7
    both = sip.duality_product(DualConfiguration((2, 11, 11)), eta, k)
    left = sip.duality_product(DualConfiguration((2,)), eta, k)
    right = sip.duality_product(DualConfiguration((11, 11)), eta, k)
    assert both == pytest.approx(left * right, rel=1e-12)


def test_duality_check_t_zero_exact():
    occ = np.zeros(16, dtype=np.int64)
    occ[0], occ[1] = 2, 1
    eta = Configuration(occ)
    params = SipParams(k=1.0, kernel=NN, L=16)
    xi = DualConfiguration((0, 1))
    (lhs, se_l), (rhs, se_r) = sip.duality_check(xi, eta, params, 0.0, 50, 1)
    want = sip.duality_product(xi, eta, 1.0)
    assert lhs == want and rhs == want and se_l == 0.0 and se_r == 0.0


def test_duality_check_empty_dual():
    eta = sip.sample_poisson_product(1.0, 16, seed=6)
    params = SipParams(k=1.0, kernel=NN, L=16)
    (lhs, _), (rhs, _) = sip.duality_check(DualConfiguration(()), eta, params,
                                           0.7, 30, 2)
    assert lhs == 1.0 and rhs == 1.0


def test_duality_check_monte_carlo():
    occ = np.zeros(32, dtype=np.int64)
    occ[0], occ[2], occ[5] = 3, 2, 1
    eta = Configuration(occ)
    params = SipParams(k=1.0, kernel=NN, L=32)
    xi = DualConfiguration((0, 1))
    (lhs, se_l), (rhs, se_r) = sip.duality_check(xi, eta, params, 0.5,
                                                 8000, seed=33)
    assert abs(lhs - rhs) <= 4 * math.hypot(se_l, se_r)


def test_pair_correlation_formula_poisson_cancellation():
    # for sigma = rho^2 and k = 1, the x != y correlation reduces to
    # -(rho^2/2) p and the diagonal to 2 - p at rho = 1
    p = 0.37
    assert sip.pair_correlation_formula(0, 1, 1.0, 1.0, 1.0, p) == \
        pytest.approx(-0.5 * p, rel=1e-12)
    assert sip.pair_correlation_formula(0, 0, 1.0, 1.0, 1.0, p) == \
        pytest.approx(2.0 * (-0.5) * p + 2.0, rel=1e-12)
