"""Benchmark the compiled extension against the pure-Python fallback.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

from sipsticky import backend
from sipsticky.jump_kernel import PRESETS

NN = PRESETS["nn"]
R2 = PRESETS["range2"]


def bench_sip(mod):
    eta = np.random.default_rng(3).poisson(1.0, 4096).astype(np.int64)
    bg = np.random.PCG64(12345)
    t0 = time.perf_counter()
    n = mod.sip_gillespie(eta, NN.rates_array(), 1.0, 4.0, bg)
    dt = time.perf_counter() - t0
    return n / dt, "events/s"


def bench_diff(mod):
    pw = R2.rates_array()
    t0 = time.perf_counter()
    total_t = 0.0
    for j in range(3000):
        bg = np.random.PCG64(j)
        mod.diff_walk_final(0, 1.0, pw, 5.0, bg)
        total_t += 5.0
    dt = time.perf_counter() - t0
    # rate ~ 2 k sum_A p = 2 events per unit time
    return 2.0 * total_t / dt, "events/s"


def bench_uniformize(mod):
    M = 400
    pmf = np.full(3000, 1.0 / 3000)
    acc = np.zeros(2 * M + 1)
    t0 = time.perf_counter()
    mod.uniformize_accumulate(M, 0, 0.01, NN.rates_array(), 1.05, pmf, acc)
    dt = time.perf_counter() - t0
    return len(pmf) * (2 * M + 1) / dt, "state-updates/s"


BENCHES = [
    ("SIP Gillespie (L=4096, T=4)", bench_sip),
    ("gap walk (3000 paths, T=5)", bench_diff),
    ("uniformization (M=400, 3000 steps)", bench_uniformize),
]


def main():
    names = backend.available_backends()
    print(f"backends: {', '.join(names)}\n")
    header = f"{'benchmark':<38}" + "".join(f"{n:>16}" for n in names) + f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, fn in BENCHES:
        rates = {}
        unit = ""
        for name in names:
            rate, unit = fn(backend.get_module(name))
            rates[name] = rate
        cells = "".join(f"{rates[n]:>16,.0f}" for n in names)
        speedup = (rates.get("compiled", float("nan"))
                   / rates.get("pure", float("nan")))
        print(f"{label:<38}{cells}{speedup:>9.1f}x   ({unit})")


if __name__ == "__main__":
    main()
