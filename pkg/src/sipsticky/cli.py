"""Command-line harness: subcommand dispatch, config handling, CSV output.

Every subcommand accepts --config FILE (plain `key = value` lines) with
explicit flags taking precedence, and writes one CSV table (stdout or
--out). Output bodies are deterministic for a fixed seed; replica j of
any Monte Carlo run draws from seed ^ splitmix64(j).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, backend, sticky
from . import difference as dc
from . import forms as fm
from . import jump_kernel as jk
from . import sip as sip_mod
from . import testfunctions as tf
from . import variance as fv
from .config import ExperimentConfig, parse_config_file, resolve
from .csvio import ResultTable
from .errors import ConfigError, SipStickyError, ToleranceError

DEFAULT_SEED = 20250809


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("SIPSTICKY_THREADS", "1")))
    except ValueError:
        return 1


COMMON = {
    "seed": (int, DEFAULT_SEED, "base RNG seed"),
    "out": (str, "-", "output CSV path ('-' for stdout)"),
    "threads": (int, _default_threads(), "worker processes for replicas"),
    "tolerance": (float, 1e-8, "numeric tolerance where applicable"),
}

SCHEMAS = {
    "kernel-info": {
        **COMMON,
        "kernel": (str, "nn", "preset name or comma-separated weights"),
    },
    "simulate-sip": {
        **COMMON,
        "kernel": (str, "nn", "jump kernel"),
        "lattice": (int, 64, "number of sites (periodic)"),
        "k": (float, 1.0, "diffusion parameter"),
        "rho": (float, 1.0, "initial density"),
        "initial": (str, "poisson", "initial measure: poisson | stationary"),
        "T": (float, 1.0, "simulation time"),
        "replicas": (int, 1, "independent replicas"),
        "output_mode": (str, "summary", "summary | occupancies"),
    },
    "diff-prob": {
        **COMMON,
        "kernel": (str, "nn", "jump kernel"),
        "k": (float, 1.0, "diffusion parameter (unscaled mode)"),
        "N": (int, 0, "scaling parameter; > 0 selects condensive scaling"),
        "gamma": (float, 0.0, "stickiness scale (condensive scaling)"),
        "t_list": ((list, float), [1.0], "times"),
        "w0_list": ((list, int), [0], "start states (integer sites)"),
    },
    "diff-sim": {
        **COMMON,
        "kernel": (str, "nn", "jump kernel"),
        "k": (float, 1.0, "diffusion parameter"),
        "w0": (int, 0, "start state"),
        "t": (float, 1.0, "time"),
        "replicas": (int, 10000, "replicas"),
        "free": (bool, False, "drop the origin pull (plain walk)"),
    },
    "sticky-kernel": {
        **COMMON,
        "gamma": (float, 1.0, "stickiness scale"),
        "chi": (float, sticky.DEFAULT_CHI, "diffusion constant"),
        "t_list": ((list, float), [0.1, 1.0], "times"),
        "v_max": (float, 3.0, "evaluation grid half-width"),
        "v_points": (int, 41, "evaluation grid size"),
    },
    "sticky-path": {
        **COMMON,
        "gamma": (float, 1.0, "stickiness scale"),
        "t_end": (float, 1.0, "path end time"),
        "dt": (float, 1e-4, "Euler grid step"),
        "n_eval": (int, 512, "evaluation grid size"),
    },
    "variance": {
        **COMMON,
        "kernel": (str, "nn", "jump kernel"),
        "gamma": (float, 1.0, "stickiness scale"),
        "rho": (float, 1.0, "density"),
        "t_list": ((list, float), [0.1], "times"),
        "n_list": ((list, int), [20, 40], "finite N values"),
        "include_limit": (bool, True, "append analytic-limit rows"),
        "phi": (str, "raised-cosine", "test function preset"),
        "phi_center": (float, 0.0, "test function center"),
        "phi_halfwidth": (float, 1.0, "test function half-width"),
        "sigma_mode": (str, "poisson", "poisson | stationary"),
    },
    "mosco": {
        **COMMON,
        "kernel": (str, "nn", "jump kernel"),
        "gamma": (float, 1.0, "stickiness scale"),
        "n_list": ((list, int), [32, 64, 128, 256], "grid parameters"),
        "phi": (str, "raised-cosine", "test function preset"),
        "phi_center": (float, 0.3, "test function center"),
        "phi_halfwidth": (float, 1.0, "test function half-width"),
    },
    "duality-check": {
        **COMMON,
        "kernel": (str, "nn", "jump kernel"),
        "k": (float, 1.0, "diffusion parameter"),
        "lattice": (int, 32, "torus size"),
        "t": (float, 0.5, "time"),
        "replicas": (int, 20000, "replicas"),
        "xi": (str, "0,1", "dual particle positions"),
        "eta": (str, "0:3,2:2,5:1", "configuration as site:count pairs"),
    },
    "acceptance": {
        **COMMON,
        "out_dir": (str, "acceptance_out", "directory for report and CSVs"),
        "only": ((list, int), [], "criteria subset (empty = all)"),
    },
}


def _phi_from_config(cfg: ExperimentConfig) -> tf.TestFunction:
    return tf.from_spec(cfg["phi"], cfg["phi_center"], cfg["phi_halfwidth"])


def _meta(cfg: ExperimentConfig, extra: dict | None = None) -> dict:
    meta = {
        "command": cfg.subcommand,
        "config_hash": cfg.digest(),
        "code_version": __version__,
        "backend": backend.backend_name(),
        "config": cfg.canonical(),
    }
    if extra:
        meta.update(extra)
    return meta


def _parallel_map(fn, tasks, threads: int):
    """Run fn over tasks; results ordered by task index regardless of
    completion order."""
    if threads <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------

def run_kernel_info(cfg: ExperimentConfig) -> ResultTable:
    kernel = jk.from_spec(cfg["kernel"])
    table = ResultTable(columns=["quantity", "value"], metadata=_meta(cfg))
    table.add("range", kernel.range)
    for r in range(1, kernel.range + 1):
        table.add(f"p({r})", kernel.p(r))
    table.add("chi", kernel.chi)
    table.add("total_weight", kernel.total_weight)
    table.add("gcd_check", "ok")
    return table


def _sip_replica(task):
    (cfg_opts, j) = task
    kernel = jk.from_spec(cfg_opts["kernel"])
    params = sip_mod.SipParams(k=cfg_opts["k"], kernel=kernel,
                               L=cfg_opts["lattice"])
    seed = cfg_opts["seed"]
    if cfg_opts["initial"] == "poisson":
        eta0 = sip_mod.sample_poisson_product(cfg_opts["rho"], params.L, seed,
                                              replica=2 * j)
    elif cfg_opts["initial"] == "stationary":
        eta0 = sip_mod.sample_stationary_product(cfg_opts["rho"], cfg_opts["k"],
                                                 params.L, seed, replica=2 * j)
    else:
        raise ConfigError(f"unknown initial measure {cfg_opts['initial']!r}")
    eta = sip_mod.simulate(eta0, params, cfg_opts["T"], seed, replica=2 * j + 1)
    return j, eta.occupancies


def run_simulate_sip(cfg: ExperimentConfig) -> ResultTable:
    tasks = [(cfg.options, j) for j in range(cfg["replicas"])]
    results = _parallel_map(_sip_replica, tasks, cfg["threads"])
    results.sort(key=lambda pair: pair[0])
    if cfg["output_mode"] == "occupancies":
        table = ResultTable(columns=["replica", "site", "occupancy"],
                            metadata=_meta(cfg))
        for j, occ in results:
            for site, n in enumerate(occ):
                table.add(j, site, int(n))
    elif cfg["output_mode"] == "summary":
        table = ResultTable(
            columns=["replica", "total", "mean", "var", "max", "occupied_sites"],
            metadata=_meta(cfg))
        for j, occ in results:
            table.add(j, int(occ.sum()), float(occ.mean()), float(occ.var()),
                      int(occ.max()), int(np.count_nonzero(occ)))
    else:
        raise ConfigError(f"unknown output_mode {cfg['output_mode']!r}")
    return table


def run_diff_prob(cfg: ExperimentConfig) -> ResultTable:
    kernel = jk.from_spec(cfg["kernel"])
    table = ResultTable(columns=["w0", "t", "p", "error_bound"],
                        metadata=_meta(cfg))
    scaled = cfg["N"] > 0 and cfg["gamma"] > 0
    for t in cfg["t_list"]:
        if scaled:
            sp = dc.ScaledDiffParams(N=cfg["N"], gamma=cfg["gamma"], kernel=kernel)
            params, horizon = sp.unscaled(), sp.alpha(t)
        else:
            params, horizon = dc.DiffChainParams(k=cfg["k"], kernel=kernel), t
        for w0 in cfg["w0_list"]:
            p, err = dc.transition_prob(w0, params, horizon, tol=cfg["tolerance"])
            table.add(w0, t, p, err)
    return table


def _diff_replica(task):
    opts, j = task
    kernel = jk.from_spec(opts["kernel"])
    params = dc.DiffChainParams(k=opts["k"], kernel=kernel)
    return j, dc.simulate_path(opts["w0"], params, opts["t"], opts["seed"],
                               replica=j, sticky=not opts["free"])


def run_diff_sim(cfg: ExperimentConfig) -> ResultTable:
    tasks = [(cfg.options, j) for j in range(cfg["replicas"])]
    ends = _parallel_map(_diff_replica, tasks, cfg["threads"])
    ends.sort(key=lambda pair: pair[0])
    values = np.array([w for _, w in ends])
    table = ResultTable(columns=["w", "count"], metadata=_meta(cfg, {
        "mean": float(values.mean()), "var": float(values.var(ddof=1))}))
    for w in np.unique(values):
        table.add(int(w), int(np.count_nonzero(values == w)))
    return table


def run_sticky_kernel(cfg: ExperimentConfig) -> ResultTable:
    g, chi = cfg["gamma"], cfg["chi"]
    table = ResultTable(columns=["t", "v", "density", "atom", "hit_zero_prob"],
                        metadata=_meta(cfg))
    grid = np.linspace(-cfg["v_max"], cfg["v_max"], cfg["v_points"])
    for t in cfg["t_list"]:
        atom = sticky.mass_at_zero(t, g, chi)
        for v in grid:
            table.add(t, float(v), float(sticky.density(v, t, g, chi)), atom,
                      float(sticky.hit_zero_prob(float(v), t, g, chi)))
    return table


def run_sticky_path(cfg: ExperimentConfig) -> ResultTable:
    t_grid, path, _ = sticky.time_change_path(
        cfg["t_end"], cfg["gamma"], cfg["dt"], cfg["seed"],
        n_eval=cfg["n_eval"])
    table = ResultTable(columns=["t", "value"], metadata=_meta(cfg))
    for t, x in zip(t_grid, path):
        table.add(float(t), float(x))
    return table


def run_variance(cfg: ExperimentConfig) -> ResultTable:
    kernel = jk.from_spec(cfg["kernel"])
    phi = _phi_from_config(cfg)
    g, rho = cfg["gamma"], cfg["rho"]
    table = ResultTable(columns=["N", "t", "value", "error_estimate"],
                        metadata=_meta(cfg, {"phi": phi.name}))
    for t in cfg["t_list"]:
        for N in cfg["n_list"]:
            if cfg["sigma_mode"] == "poisson":
                sig = fv.sigma_poisson(rho)
            elif cfg["sigma_mode"] == "stationary":
                sig = fv.sigma_stationary(rho, dc.ScaledDiffParams(
                    N=N, gamma=g, kernel=kernel).k_N)
            else:
                raise ConfigError(f"unknown sigma_mode {cfg['sigma_mode']!r}")
            val = fv.finite_variance(N, t, phi, rho, sig, g, kernel)
            table.add(N, t, val, cfg["tolerance"])
        if cfg["include_limit"]:
            lv = fv.limit_variance(t, phi, rho, g)
            table.add("limit", t, lv, 1e-10)
    return table


def run_mosco(cfg: ExperimentConfig) -> ResultTable:
    kernel = jk.from_spec(cfg["kernel"])
    phi = _phi_from_config(cfg)
    g = cfg["gamma"]
    seq = fm.mosco_flattened_sequence(phi, cfg["n_list"], g, kernel)
    gradient = tf.gradient_of(phi)
    table = ResultTable(
        columns=["N", "E_N_psi", "R_N_phi", "dual_rw_gradient",
                 "norm_rw_sq", "norm_sip_sq"],
        metadata=_meta(cfg, {
            "extrapolated_limit": seq["extrapolated"],
            "fitted_order": seq["order"],
            "limit_symmetrized_chi": seq["limit_symmetrized"],
            "limit_halved_chi": seq["limit_halved"],
            "phi": phi.name,
        }))
    for N, e_psi in zip(seq["N"], seq["E_N_psi"]):
        gphi = fm.phi_n(phi, N)
        ggrad = fm.phi_n(gradient, N)
        # the restriction of an exact derivative has grid sum O(1/N^2);
        # project it out so the dual is finite and trends to the continuum
        centered = fm.GridFunction(N=N, offset=ggrad.offset,
                                   values=ggrad.values - ggrad.values.mean())
        table.add(N, e_psi, fm.form_r_n(gphi, kernel, N),
                  fm.dual_form_rw(centered, kernel),
                  fm.norm_rw_sq(gphi), fm.norm_sip_sq(gphi, g))
    return table


def _parse_eta(spec: str, L: int) -> sip_mod.Configuration:
    occ = np.zeros(L, dtype=np.int64)
    for tok in spec.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            site, count = tok.split(":")
            occ[int(site) % L] = int(count)
        except ValueError as exc:
            raise ConfigError(f"bad eta token {tok!r}; want site:count") from exc
    return sip_mod.Configuration(occ)


def run_duality_check(cfg: ExperimentConfig) -> ResultTable:
    kernel = jk.from_spec(cfg["kernel"])
    params = sip_mod.SipParams(k=cfg["k"], kernel=kernel, L=cfg["lattice"])
    xi = sip_mod.DualConfiguration(
        tuple(int(tok) for tok in cfg["xi"].split(",") if tok.strip()))
    eta = _parse_eta(cfg["eta"], params.L)
    (lhs, se_l), (rhs, se_r) = sip_mod.duality_check(
        xi, eta, params, cfg["t"], cfg["replicas"], cfg["seed"])
    combined = math.hypot(se_l, se_r)
    table = ResultTable(columns=["side", "estimate", "standard_error"],
                        metadata=_meta(cfg, {
                            "difference": lhs - rhs,
                            "combined_se": combined,
                            "within_4se": bool(abs(lhs - rhs) <= 4 * combined),
                        }))
    table.add("configuration_process", lhs, se_l)
    table.add("dual_particles", rhs, se_r)
    return table


def run_acceptance(cfg: ExperimentConfig):
    from .acceptance import run_suite
    report = run_suite(out_dir=cfg["out_dir"],
                       only=set(cfg["only"]) or None)
    return report


RUNNERS = {
    "kernel-info": run_kernel_info,
    "simulate-sip": run_simulate_sip,
    "diff-prob": run_diff_prob,
    "diff-sim": run_diff_sim,
    "sticky-kernel": run_sticky_kernel,
    "sticky-path": run_sticky_path,
    "variance": run_variance,
    "mosco": run_mosco,
    "duality-check": run_duality_check,
    "acceptance": run_acceptance,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_subparser(subparsers, name: str):
    schema = SCHEMAS[name]
    sub = subparsers.add_parser(name)
    sub.add_argument("--config", default=None, help="key = value file")
    for key, (typ, default, helptext) in schema.items():
        flag = "--" + key.replace("_", "-")
        if typ is bool:
            sub.add_argument(flag, default=None, action="store_const",
                             const=True, help=helptext)
        elif isinstance(typ, tuple):
            _, elem = typ
            sub.add_argument(flag, default=None, help=helptext + " (comma list)",
                             type=lambda s, e=elem: [e(tok) for tok in
                                                     s.split(",") if tok.strip()])
        else:
            sub.add_argument(flag, default=None, type=typ, help=helptext)
    return sub


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sipsticky",
        description="Inclusion-process condensation toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SCHEMAS:
        _add_subparser(subparsers, name)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    name = args.subcommand
    file_values = parse_config_file(args.config) if args.config else {}
    flag_values = {k: v for k, v in vars(args).items()
                   if k not in ("subcommand", "config")}
    cfg = resolve(name, SCHEMAS[name], file_values, flag_values)
    started = time.time()
    result = RUNNERS[name](cfg)
    if isinstance(result, ResultTable):
        result.metadata["wall_seconds"] = f"{time.time() - started:.3f}"
        result.write(cfg.get("out", "-"))
    return 0


def main() -> None:
    try:
        sys.exit(run())
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        sys.exit(2)
    except ToleranceError as exc:
        print(f"tolerance error: {exc}", file=sys.stderr)
        sys.exit(3)
    except SipStickyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(4)


if __name__ == "__main__":
    main()
