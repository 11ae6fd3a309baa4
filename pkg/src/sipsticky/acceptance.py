"""Acceptance suite: one function per criterion, pinned tolerances.

Each criterion function returns a CriterionResult with the measured
numbers in ``details`` and auxiliary observations in ``notes``; nothing
here adapts tolerances at run time. ``run_suite`` executes the criteria,
prints one verdict line each, and writes the report plus the standard
CSV artifacts consumed by the plotting package.

Criterion 5 compares the rescaled gap walk against the fixed reference
constant exp(4 g^2 t) erfc(2 g sqrt(t)). The walk provably converges to
the calibrated atom mass ``sticky.mass_at_zero`` instead (the two
parameterizations coincide only at gamma = 1/sqrt2), so the 10% clause
of criterion 5 cannot hold at gamma = 1; it is kept as stated and
reported honestly, with the calibrated comparison printed alongside.
"""

from __future__ import annotations

import functools
import json
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import sticky
from . import difference as dc
from . import forms as fm
from . import sip as sip_mod
from . import variance as fv
from .csvio import ResultTable
from .jump_kernel import PRESETS
from .quadrature import gl_adaptive
from .special import erfcx
from .testfunctions import raised_cosine

SQRT2 = math.sqrt(2.0)
NN = PRESETS["nn"]
RANGE2 = PRESETS["range2"]
SEED = 20250809


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    details: str
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"[{verdict}] criterion {self.number:2d} ({self.name}): "
                f"{self.details} [{self.seconds:.1f}s]")


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.time()
        res = fn(*args, **kwargs)
        res.seconds = time.time() - t0
        return res
    return wrapper


# ---------------------------------------------------------------------------
# 1. sticky kernel normalization
# ---------------------------------------------------------------------------

@_timed
def criterion_1() -> CriterionResult:
    worst = 0.0
    for g in (0.5, 1.0, 2.0):
        for t in (0.1, 1.0, 10.0):
            defect = sticky.StickyKernelEval(t=t, gamma=g).normalization_defect()
            worst = max(worst, defect)
    return CriterionResult(1, "sticky kernel normalization", worst <= 1e-8,
                           f"max |atom + int density - 1| = {worst:.2e} (tol 1e-8)")


# ---------------------------------------------------------------------------
# 2. semigroup identity at the atom
# ---------------------------------------------------------------------------

@_timed
def criterion_2() -> CriterionResult:
    g = 1.0
    worst = 0.0
    for (s, t) in ((0.5, 0.5), (0.2, 1.0)):
        cap = 10.0 * (math.sqrt(s) + math.sqrt(t))
        cross = 2.0 * gl_adaptive(
            lambda z: sticky.density(z, s, g) * sticky.density(z, t, g),
            0.0, cap, tol=1e-12)
        lhs = sticky.mass_at_zero(s + t, g)
        rhs = sticky.mass_at_zero(s, g) * sticky.mass_at_zero(t, g) \
            + SQRT2 * g * cross
        worst = max(worst, abs(lhs - rhs))
    return CriterionResult(2, "semigroup identity at the atom", worst <= 1e-6,
                           f"max defect = {worst:.2e} (tol 1e-6)")


# ---------------------------------------------------------------------------
# 3. detailed balance, exhaustive
# ---------------------------------------------------------------------------

@_timed
def criterion_3() -> CriterionResult:
    worst = 0.0
    for kernel in (NN, RANGE2):
        R = kernel.range
        for k in (0.1, 1.0, 10.0):
            params = dc.DiffChainParams(k=k, kernel=kernel)
            for w in range(-2 * R, 2 * R + 1):
                for r in kernel.displacements():
                    r = int(r)
                    fwd = dc.stationary_weight(w, k) * dc.jump_rates(w, params)[r]
                    res = dc.detailed_balance_residual(w, r, params)
                    worst = max(worst, abs(res) / max(abs(fwd), 1e-300))
    return CriterionResult(3, "gap-walk detailed balance", worst <= 1e-14,
                           f"max relative residual = {worst:.2e} (tol 1e-14)")


# ---------------------------------------------------------------------------
# 4. uniformization vs Monte Carlo
# ---------------------------------------------------------------------------

@_timed
def criterion_4() -> CriterionResult:
    params = dc.DiffChainParams(k=1.0, kernel=NN)
    ok = True
    parts = []
    for w0 in (0, 1, 2):
        p, _ = dc.transition_prob(w0, params, 1.0)
        phat, se = dc.transition_prob_mc(w0, params, 1.0, SEED + w0, 100_000)
        dev = abs(phat - p) / se
        ok = ok and dev <= 4.0
        parts.append(f"w0={w0}: |dp|={dev:.2f} SE")
    return CriterionResult(4, "uniformization vs Monte Carlo", ok,
                           "; ".join(parts) + " (tol 4 SE, 1e5 replicas)")


# ---------------------------------------------------------------------------
# 5 and 6 share the condensive N-sweep
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _condensive_sweep(gamma: float = 1.0, t: float = 0.5):
    """Rows p_alpha(0, .) of the scaled gap walk for N in the schedule."""
    rows = {}
    for N in (25, 50, 100, 200):
        sp = dc.ScaledDiffParams(N=N, gamma=gamma, kernel=NN)
        params = sp.unscaled()
        alpha = sp.alpha(t)
        window = dc.default_window(params, alpha, 0)
        # doubled window run only (serves as its own convergence check
        # against the base window)
        _, probs1, _ = dc.transition_row(0, params, alpha, window)
        _, probs2, _ = dc.transition_row(
            0, params, alpha, dc.TruncationWindow(2 * window.M))
        drift = abs(probs2[2 * window.M] - probs1[window.M])
        rows[N] = (probs2, 2 * window.M, drift, 1.0 + 1.0 / sp.k_N)
    return rows


@_timed
def criterion_5() -> CriterionResult:
    g, t = 1.0, 0.5
    reference = math.exp(4.0 * g * g * t) * math.erfc(2.0 * g * math.sqrt(t))
    calibrated = sticky.mass_at_zero(t, g)
    rows = _condensive_sweep(g, t)
    rel_errors = []
    cal_errors = []
    for N in (25, 50, 100, 200):
        probs, M, _, _ = rows[N]
        p00 = float(probs[M])
        rel_errors.append(abs(p00 - reference) / reference)
        cal_errors.append(abs(p00 - calibrated) / calibrated)
    decreasing = all(a > b for a, b in zip(rel_errors, rel_errors[1:]))
    passed = decreasing and rel_errors[-1] <= 0.10
    details = (f"rel errors vs exp(4g^2 t) erfc(2g sqrt t) = "
               + ", ".join(f"{e:.3f}" for e in rel_errors)
               + f"; decreasing={decreasing}, final<=10%: {rel_errors[-1] <= 0.10}")
    notes = [
        "reference constant 0.33620 is not the N->infinity limit of the walk "
        "(the walk converges to the calibrated atom mass 0.52316; the two "
        "parameterizations coincide only at gamma = 1/sqrt2)",
        "rel errors vs calibrated mass_at_zero(t, gamma) = "
        + ", ".join(f"{e:.4f}" for e in cal_errors)
        + f"; final<=10%: {cal_errors[-1] <= 0.10}",
    ]
    return CriterionResult(5, "condensive atom convergence", passed, details,
                           notes=notes)


@_timed
def criterion_6() -> CriterionResult:
    g, t = 1.0, 0.5
    rows = _condensive_sweep(g, t)
    ok = True
    parts = []
    err_table = {}
    for v in (0.25, 0.5):
        target = SQRT2 * g * sticky.density(v, t, g)
        errs = []
        for N in (25, 50, 100, 200):
            probs, M, _, nu0 = rows[N]
            d = int(math.floor(v * N))
            p_v0 = float(probs[M + d]) * nu0
            errs.append(abs(p_v0 - target))
        decreasing = all(a > b for a, b in zip(errs, errs[1:]))
        ok = ok and decreasing
        err_table[v] = errs
        parts.append(f"v={v}: errors " + ", ".join(f"{e:.4f}" for e in errs)
                     + f" decreasing={decreasing}")
    res = CriterionResult(6, "condensive off-atom convergence", ok,
                          "; ".join(parts))
    res.notes.append(json.dumps({str(v): e for v, e in err_table.items()}))
    return res


# ---------------------------------------------------------------------------
# 7. analytic variance: internal consistency and endpoints
# ---------------------------------------------------------------------------

@_timed
def criterion_7() -> CriterionResult:
    phi = raised_cosine(0.0, 1.0)
    rho = 1.0
    worst = 0.0
    for g in (0.5, 1.0, 2.0):
        for t in (0.1, 1.0, 4.0):
            a = fv.limit_variance(t, phi, rho, g)
            b = fv.limit_variance_alt(t, phi, rho, g)
            worst = max(worst, abs(a - b))
    consistent = worst <= 1e-6
    # endpoints at gamma = 1
    g = 1.0
    plateau = SQRT2 * g * rho * rho * phi.l2sq
    small = abs(fv.limit_variance(1e-6, phi, rho, g))
    small_ok = small <= 1e-4 * plateau
    t_inf = 4.0e4  # plateau approach is O(mass(t)) ~ t^{-1/2}; 1% needs t this large
    large_dev = abs(fv.limit_variance(t_inf, phi, rho, g) - plateau) / plateau
    large_ok = large_dev <= 0.01
    passed = consistent and small_ok and large_ok
    details = (f"max |direct - com-form| = {worst:.2e} (tol 1e-6); "
               f"t=1e-6 -> {small:.2e} (tol {1e-4 * plateau:.1e}); "
               f"t={t_inf:g} dev from sqrt2 g rho^2 |phi|^2 = {large_dev:.3%} (tol 1%)")
    notes = [f"informational: deviation at t=1e3 is "
             f"{abs(fv.limit_variance(1e3, phi, rho, g) - plateau) / plateau:.3%} "
             "(the plateau is approached at rate ~ gamma/sqrt(pi chi t))"]
    return CriterionResult(7, "variance formula consistency", passed, details,
                           notes=notes)


# ---------------------------------------------------------------------------
# 8. finite-N variance approaches the limit
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _finite_variance_sweep(t: float = 0.1, gamma: float = 1.0, rho: float = 1.0):
    phi = raised_cosine(0.0, 1.0)
    lim = fv.limit_variance(t, phi, rho, gamma)
    vals = {N: fv.finite_variance(N, t, phi, rho, fv.sigma_poisson(rho),
                                  gamma, NN) for N in (20, 40, 80)}
    return phi, lim, vals


@_timed
def criterion_8() -> CriterionResult:
    _, lim, vals = _finite_variance_sweep()
    errs = [abs(vals[N] - lim) for N in (20, 40, 80)]
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    details = (f"limit={lim:.6f}; |finite-limit| = "
               + ", ".join(f"{e:.4f}" for e in errs)
               + f"; decreasing={decreasing}")
    return CriterionResult(8, "finite-to-limit variance", decreasing, details)


# ---------------------------------------------------------------------------
# 9. duality oracles
# ---------------------------------------------------------------------------

@_timed
def criterion_9() -> CriterionResult:
    # (a) self-duality with two dual particles
    params = sip_mod.SipParams(k=1.0, kernel=NN, L=32)
    occ = np.zeros(32, dtype=np.int64)
    occ[0], occ[2], occ[5] = 3, 2, 1
    eta = sip_mod.Configuration(occ)
    xi = sip_mod.DualConfiguration((0, 1))
    (lhs, se_l), (rhs, se_r) = sip_mod.duality_check(
        xi, eta, params, 0.5, 100_000, SEED + 9)
    se_ab = math.hypot(se_l, se_r)
    dev_a = abs(lhs - rhs) / se_ab
    ok_a = dev_a <= 4.0

    # (b) centered pair correlation vs the gap-walk formula on L = 64
    params_b = sip_mod.SipParams(k=1.0, kernel=NN, L=64)
    rho, t, reps = 1.0, 1.0, 100_000
    vals00 = np.empty(reps)
    vals01 = np.empty(reps)
    for j in range(reps):
        eta0 = sip_mod.sample_poisson_product(rho, 64, SEED + 90, replica=2 * j)
        eta_t = sip_mod.simulate(eta0, params_b, t, SEED + 90, replica=2 * j + 1)
        d0 = eta_t.occupancies[0] - rho
        vals00[j] = d0 * d0
        vals01[j] = d0 * (eta_t.occupancies[1] - rho)
    chain = dc.DiffChainParams(k=1.0, kernel=NN)
    sigma = rho * rho
    devs = []
    for (d, vals) in ((0, vals00), (1, vals01)):
        p_d0, _ = dc.transition_prob(d, chain, t)
        want = sip_mod.pair_correlation_formula(0, d, rho, sigma, 1.0, p_d0)
        got = vals.mean()
        se = vals.std(ddof=1) / math.sqrt(reps)
        devs.append(abs(got - want) / se)
    ok_b = all(d <= 4.0 for d in devs)
    details = (f"self-duality |lhs-rhs| = {dev_a:.2f} SE; pair correlations "
               f"|MC-formula| = {devs[0]:.2f}, {devs[1]:.2f} SE (tol 4 SE)")
    return CriterionResult(9, "duality oracles", ok_a and ok_b, details)


# ---------------------------------------------------------------------------
# 10. flattened-sequence form limit
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def _mosco_sequence():
    phi = raised_cosine(0.3, 1.0)
    return phi, fm.mosco_flattened_sequence(phi, (32, 64, 128, 256), 1.0, NN)


@_timed
def criterion_10() -> CriterionResult:
    _, seq = _mosco_sequence()
    target = seq["limit_symmetrized"]
    rel = abs(seq["extrapolated"] - target) / target
    slope_ok = 0.8 <= seq["order"] <= 1.2
    passed = slope_ok and rel <= 0.01
    details = (f"fitted order {seq['order']:.3f} (tol [0.8, 1.2]); "
               f"extrapolated {seq['extrapolated']:.6f} vs chi |phi'|^2 = "
               f"{target:.6f}, rel {rel:.2e} (tol 1%)")
    notes = [f"halved-constant convention (chi/2) |phi'|^2 = "
             f"{seq['limit_halved']:.6f}, reported for comparison"]
    return CriterionResult(10, "flattened-form limit", passed, details,
                           notes=notes)


# ---------------------------------------------------------------------------
# 11. closed-form gap between the two discrete forms
# ---------------------------------------------------------------------------

@_timed
def criterion_11() -> CriterionResult:
    gen = np.random.default_rng(SEED + 11)
    worst = 0.0
    for kernel in (NN, RANGE2):
        for N in (16, 64):
            params = fm.FormParams(gamma=1.0, kernel=kernel, N=N)
            for _ in range(100):
                vals = gen.normal(size=25)
                g = fm.GridFunction(N=N, offset=-12, values=vals)
                gap = fm.form_e_n(g, params) - fm.form_r_n(g, kernel, N)
                closed = fm.form_gap(g, params)
                worst = max(worst,
                            abs(gap - closed) / max(1.0, abs(closed)))
    return CriterionResult(11, "form domination gap", worst <= 1e-10,
                           f"max |(E-R) - closed form| = {worst:.2e} (tol 1e-10)")


# ---------------------------------------------------------------------------
# 12. dual form double route
# ---------------------------------------------------------------------------

@_timed
def criterion_12() -> CriterionResult:
    gen = np.random.default_rng(SEED + 12)
    worst = 0.0
    inf_ok = True
    for N in (16, 64):
        for _ in range(100):
            vals = gen.normal(size=21)
            vals -= vals.mean()
            g = fm.GridFunction(N=N, offset=-10, values=vals)
            leg, fou = fm.dual_form_rw_routes(g, NN)
            worst = max(worst, abs(leg - fou) / max(1.0, abs(leg), abs(fou)))
        bad = fm.GridFunction(N=N, offset=-10, values=gen.normal(size=21) + 1.0)
        inf_ok = inf_ok and math.isinf(fm.dual_form_rw(bad, NN))
    passed = worst <= 1e-8 and inf_ok
    return CriterionResult(12, "dual form double route", passed,
                           f"max route disagreement = {worst:.2e} (tol 1e-8); "
                           f"nonzero-mean -> inf: {inf_ok}")


# ---------------------------------------------------------------------------
# 13. potential kernel
# ---------------------------------------------------------------------------

@_timed
def criterion_13() -> CriterionResult:
    a0 = fm.potential_kernel(0, NN)
    worst = max(abs(fm.potential_kernel(n, NN) - n) for n in range(21))
    passed = worst <= 1e-10 and a0 == 0.0
    return CriterionResult(13, "potential kernel", passed,
                           f"max |a(n) - n| for n <= 20: {worst:.2e} "
                           f"(tol 1e-10); a(0) = {a0}")


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
    13: criterion_13,
}


# ---------------------------------------------------------------------------
# artifact CSVs for the plotting package
# ---------------------------------------------------------------------------

def _write_artifacts(out_dir: str, results: list):
    phi, lim_t01, vals = _finite_variance_sweep()
    rho = gamma = 1.0

    var_t = ResultTable(columns=["N", "t", "value", "error_estimate"],
                        metadata={"kind": "variance-vs-t", "phi": phi.name,
                                  "gamma": gamma, "rho": rho})
    for t in (0.02, 0.05, 0.1, 0.2, 0.4):
        for N in (20, 40):
            val = fv.finite_variance(N, t, phi, rho, fv.sigma_poisson(rho),
                                     gamma, NN)
            var_t.add(N, t, val, 1e-8)
        var_t.add("limit", t, fv.limit_variance(t, phi, rho, gamma), 1e-10)
    var_t.write(os.path.join(out_dir, "variance_vs_t.csv"))

    err_n = ResultTable(columns=["experiment", "N", "error"],
                        metadata={"kind": "error-vs-N"})
    rows = _condensive_sweep()
    cal = sticky.mass_at_zero(0.5, 1.0)
    for N in (25, 50, 100, 200):
        probs, M, _, nu0 = rows[N]
        err_n.add("atom", N, abs(float(probs[M]) - cal))
        for v in (0.25, 0.5):
            d = int(math.floor(v * N))
            target = SQRT2 * sticky.density(v, 0.5, 1.0)
            err_n.add(f"offatom_v{v}", N, abs(float(probs[M + d]) * nu0 - target))
    for N in (20, 40, 80):
        err_n.add("variance", N, abs(vals[N] - lim_t01))
    err_n.write(os.path.join(out_dir, "error_vs_N.csv"))

    kern = ResultTable(columns=["t", "v", "density", "atom", "hit_zero_prob"],
                       metadata={"kind": "kernel-profile", "gamma": gamma})
    for t in (0.1, 0.5, 1.0):
        atom = sticky.mass_at_zero(t, gamma)
        for v in np.linspace(-3.0, 3.0, 121):
            kern.add(t, float(v), float(sticky.density(v, t, gamma)), atom,
                     float(sticky.hit_zero_prob(float(v), t, gamma)))
    kern.write(os.path.join(out_dir, "sticky_kernel.csv"))

    t_grid, path, _ = sticky.time_change_path(1.0, gamma, 1e-4, SEED)
    trace = ResultTable(columns=["t", "value"],
                        metadata={"kind": "path-trace", "gamma": gamma})
    for t, x in zip(t_grid, path):
        trace.add(float(t), float(x))
    trace.write(os.path.join(out_dir, "sticky_path.csv"))

    phi_m, seq = _mosco_sequence()
    mosco = ResultTable(columns=["N", "E_N_psi", "abs_error"],
                        metadata={"kind": "mosco", "phi": phi_m.name,
                                  "extrapolated": seq["extrapolated"],
                                  "fitted_order": seq["order"],
                                  "limit_symmetrized": seq["limit_symmetrized"],
                                  "limit_halved": seq["limit_halved"]})
    for N, v in zip(seq["N"], seq["E_N_psi"]):
        mosco.add(N, v, abs(v - seq["limit_symmetrized"]))
    mosco.write(os.path.join(out_dir, "mosco.csv"))

    report = ResultTable(columns=["criterion", "name", "passed", "seconds",
                                  "details"],
                         metadata={"kind": "acceptance-report"})
    for r in results:
        report.add(r.number, r.name, int(r.passed), round(r.seconds, 3),
                   r.details.replace(",", ";"))
    report.write(os.path.join(out_dir, "acceptance_report.csv"))


def run_suite(out_dir: str = "acceptance_out", only=None,
              write_artifacts: bool = True) -> list:
    """Run the criteria, print verdict lines, write report and CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    numbers = sorted(only) if only else sorted(CRITERIA)
    results = []
    for num in numbers:
        if num not in CRITERIA:
            raise ValueError(f"no criterion {num}")
        res = CRITERIA[num]()
        results.append(res)
        print(res.line())
        for note in res.notes:
            print(f"       note: {note}")
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed")
    with open(os.path.join(out_dir, "acceptance_report.json"), "w",
              encoding="utf-8") as fh:
        json.dump({
            "passed": n_pass,
            "total": len(results),
            "criteria": [{
                "number": r.number, "name": r.name, "passed": r.passed,
                "seconds": round(r.seconds, 3), "details": r.details,
                "notes": r.notes,
            } for r in results],
        }, fh, indent=2)
    if write_artifacts and not only:
        _write_artifacts(out_dir, results)
    return results
