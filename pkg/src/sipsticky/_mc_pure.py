"""Pure-Python backend mirroring the compiled ``_mc_speed`` module.

The Monte Carlo routines replay the compiled code operation for
operation on the same uniform-double stream, so a fixed seed gives
bit-identical trajectories on either backend (the compiled one is just
fast). The uniformization routine is vectorized with numpy instead;
it computes the same quantity with a different summation order, so
backends agree there to rounding, not to the bit.
"""

from __future__ import annotations

from math import log

import numpy as np

BACKEND = "pure"


class _Stream:
    """Uniform doubles from a BitGenerator, matching next_double order.

    Generator.random() draws the same 53-bit uniforms as the C-level
    next_double used by the compiled backend.
    """

    def __init__(self, bit_generator):
        self._gen = np.random.Generator(bit_generator)

    def __call__(self) -> float:
        return self._gen.random()


def _wrap(j, L):
    if j < 0:
        return j + L
    if j >= L:
        return j - L
    return j


# ---------------------------------------------------------------------------
# difference walk
# ---------------------------------------------------------------------------

def diff_walk_final(w0, k, pw, T, bit_generator, sticky=True):
    draw = _Stream(bit_generator)
    w = int(w0)
    R = len(pw)
    t = 0.0
    while True:
        tot = 0.0
        for r in range(-R, R + 1):
            if r == 0:
                continue
            rate = 2.0 * pw[abs(r) - 1] * (k + (1.0 if sticky and r == -w else 0.0))
            tot += rate
        u = draw()
        t += -log(1.0 - u) / tot
        if t > T:
            break
        target = draw() * tot
        c = 0.0
        for r in range(-R, R + 1):
            if r == 0:
                continue
            rate = 2.0 * pw[abs(r) - 1] * (k + (1.0 if sticky and r == -w else 0.0))
            c += rate
            if c > target:
                w += r
                break
    return w


# ---------------------------------------------------------------------------
# SIP Gillespie with a Fenwick tree
# ---------------------------------------------------------------------------

class _Fenwick:
    def __init__(self, L):
        self.L = L
        self.tree = [0.0] * L
        self.logL = 0
        while (1 << (self.logL + 1)) <= L:
            self.logL += 1

    def add(self, i, delta):
        j = i + 1
        while j <= self.L:
            self.tree[j - 1] += delta
            j += j & (-j)

    def total(self):
        s = 0.0
        j = self.L
        while j > 0:
            s += self.tree[j - 1]
            j -= j & (-j)
        return s

    def find(self, target):
        pos = 0
        step = 1 << self.logL
        acc = 0.0
        while step > 0:
            if pos + step <= self.L and acc + self.tree[pos + step - 1] <= target:
                pos += step
                acc += self.tree[pos - 1]
            step >>= 1
        return min(pos, self.L - 1)


def _site_outflow(eta, L, pw, R, k, pa, s):
    if eta[s] == 0:
        return 0.0
    acc = 0.0
    for r in range(-R, R + 1):
        if r == 0:
            continue
        acc += pw[abs(r) - 1] * eta[_wrap(s + r, L)]
    return eta[s] * (k * pa + acc)


def sip_gillespie(eta, pw, k, T, bit_generator):
    draw = _Stream(bit_generator)
    L = len(eta)
    R = len(pw)
    pa = 0.0
    for r in range(R):
        pa += 2.0 * pw[r]
    tree = _Fenwick(L)
    outflow = [0.0] * L
    for s in range(L):
        outflow[s] = _site_outflow(eta, L, pw, R, k, pa, s)
        tree.add(s, outflow[s])
    t = 0.0
    n_events = 0
    while True:
        tot = tree.total()
        if tot <= 0.0:
            break
        u = draw()
        t += -log(1.0 - u) / tot
        if t > T:
            break
        target = draw() * tot
        i = tree.find(target)
        sumr = 0.0
        for r in range(-R, R + 1):
            if r == 0:
                continue
            sumr += pw[abs(r) - 1] * (k + eta[_wrap(i + r, L)])
        target = draw() * sumr
        c = 0.0
        j = i
        for r in range(-R, R + 1):
            if r == 0:
                continue
            q = _wrap(i + r, L)
            c += pw[abs(r) - 1] * (k + eta[q])
            if c > target:
                j = q
                break
        if j == i:
            continue
        eta[i] -= 1
        eta[j] += 1
        n_events += 1
        touched = []
        for base in (i, j):
            for r in range(-R, R + 1):
                site = _wrap(base + r, L)
                if site not in touched:
                    touched.append(site)
        for site in touched:
            new_rate = _site_outflow(eta, L, pw, R, k, pa, site)
            tree.add(site, new_rate - outflow[site])
            outflow[site] = new_rate
    return n_events


# ---------------------------------------------------------------------------
# labeled dual particles
# ---------------------------------------------------------------------------

def labeled_walkers(pos, L, pw, k, T, bit_generator):
    draw = _Stream(bit_generator)
    n = len(pos)
    R = len(pw)
    t = 0.0
    n_events = 0

    def rate_of(m, r):
        x = pos[m]
        y = _wrap(x + r, L) if L > 0 else x + r
        occ = 0.0
        for m2 in range(n):
            if m2 != m and pos[m2] == y:
                occ += 1.0
        return pw[abs(r) - 1] * (k + occ), y

    while n > 0:
        tot = 0.0
        for m in range(n):
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                rate, _ = rate_of(m, r)
                tot += rate
        u = draw()
        t += -log(1.0 - u) / tot
        if t > T:
            break
        target = draw() * tot
        c = 0.0
        moved = False
        for m in range(n):
            if moved:
                break
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                rate, y = rate_of(m, r)
                c += rate
                if c > target:
                    pos[m] = y
                    n_events += 1
                    moved = True
                    break
    return n_events


# ---------------------------------------------------------------------------
# uniformization (numpy-vectorized)
# ---------------------------------------------------------------------------

def uniformize_accumulate(M, w0, k, pw, lam, pmf, acc):
    n = 2 * M + 1
    R = len(pw)
    pw = np.asarray(pw, dtype=np.float64)
    pmf = np.asarray(pmf, dtype=np.float64)
    u = np.zeros(n)
    u[w0 + M] = 1.0
    # per-displacement outgoing rate at every state, boundary jumps cut
    w = np.arange(-M, M + 1)
    rates = {}
    for r in [r for r in range(-R, R + 1) if r != 0]:
        vec = 2.0 * pw[abs(r) - 1] * (k + (w == -r).astype(np.float64))
        if r > 0:
            vec[n - r:] = 0.0
        else:
            vec[:-r] = 0.0
        rates[r] = vec / lam
    out = acc  # numpy array provided by caller
    out[:] = pmf[0] * u
    v = np.empty(n)
    for m in range(1, len(pmf)):
        v[:] = u
        for r, vec in rates.items():
            flow = u * vec
            if r > 0:
                v[r:] += flow[:-r]
            else:
                v[:r] += flow[-r:]
            v -= flow
        u, v = v, u
        if pmf[m] != 0.0:
            out += pmf[m] * u
    return out
