# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot loops: event-driven lattice simulation and uniformization.

The pure-Python twin lives in ``_mc_pure``; both consume the same stream of
uniform doubles from a numpy bit generator and perform the same arithmetic
in the same order, so Monte Carlo results for a fixed seed are identical
across backends.
"""

from libc.math cimport log
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

import numpy as np

BACKEND = "compiled"


cdef inline bitgen_t *_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline long _wrap(long j, long L) noexcept:
    # torus index for j in [-L, 2L); jump ranges are < L
    if j < 0:
        return j + L
    if j >= L:
        return j - L
    return j


# ---------------------------------------------------------------------------
# difference walk on Z: w -> w + r at rate 2 p(|r|) (k + 1[r == -w])
# ---------------------------------------------------------------------------

def diff_walk_final(long w0, double k, double[::1] pw, double T,
                    object bit_generator, bint sticky=True):
    """End state of one exact path of the two-particle gap walk."""
    cdef bitgen_t *bg = _bitgen(bit_generator)
    cdef long w = w0
    cdef int R = pw.shape[0]
    cdef double t = 0.0, tot, c, u, dt, target
    cdef int r
    cdef double rate
    with bit_generator.lock:
        while True:
            tot = 0.0
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                rate = 2.0 * pw[(r if r > 0 else -r) - 1] * \
                    (k + (1.0 if sticky and r == -w else 0.0))
                tot += rate
            u = bg.next_double(bg.state)
            dt = -log(1.0 - u) / tot
            t += dt
            if t > T:
                break
            target = bg.next_double(bg.state) * tot
            c = 0.0
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                rate = 2.0 * pw[(r if r > 0 else -r) - 1] * \
                    (k + (1.0 if sticky and r == -w else 0.0))
                c += rate
                if c > target:
                    w += r
                    break
    return w


# ---------------------------------------------------------------------------
# SIP on a periodic lattice, exact Gillespie with a Fenwick tree over sites
# ---------------------------------------------------------------------------

cdef inline void _fenwick_add(double[::1] tree, long L, long i, double delta) noexcept:
    cdef long j = i + 1
    while j <= L:
        tree[j - 1] += delta
        j += j & (-j)

cdef inline double _fenwick_total(double[::1] tree, long L) noexcept:
    cdef double s = 0.0
    cdef long j = L
    while j > 0:
        s += tree[j - 1]
        j -= j & (-j)
    return s

cdef inline long _fenwick_find(double[::1] tree, long L, long logL, double target) noexcept:
    # smallest i with prefix_sum(0..i) > target
    cdef long pos = 0
    cdef long step = 1 << logL
    cdef double acc = 0.0
    while step > 0:
        if pos + step <= L and acc + tree[pos + step - 1] <= target:
            pos += step
            acc += tree[pos - 1]
        step >>= 1
    if pos >= L:
        pos = L - 1
    return pos

cdef inline double _site_outflow(long[::1] eta, long L, double[::1] pw, int R,
                                 double k, double pa, long s) noexcept:
    # eta_s * (k * pa + sum_r p(|r|) eta_{s+r}),  pa = sum over A of p
    cdef double acc = 0.0
    cdef int r
    cdef long j
    if eta[s] == 0:
        return 0.0
    for r in range(-R, R + 1):
        if r == 0:
            continue
        j = _wrap(s + r, L)
        acc += pw[(r if r > 0 else -r) - 1] * eta[j]
    return eta[s] * (k * pa + acc)


def sip_gillespie(long[::1] eta, double[::1] pw, double k, double T,
                  object bit_generator):
    """Evolve occupancies in place to time T; returns the event count.

    Ordered-pair move rates are p(j-i) eta_i (k + eta_j) with distances
    taken mod L.
    """
    cdef bitgen_t *bg = _bitgen(bit_generator)
    cdef long L = eta.shape[0]
    cdef int R = pw.shape[0]
    cdef double pa = 0.0
    cdef int r
    for r in range(R):
        pa += 2.0 * pw[r]
    cdef long logL = 0
    while (1 << (logL + 1)) <= L:
        logL += 1

    cdef double[::1] tree = np.zeros(L)
    cdef double[::1] outflow = np.zeros(L)
    cdef long s, i, j, q, site
    for s in range(L):
        outflow[s] = _site_outflow(eta, L, pw, R, k, pa, s)
        _fenwick_add(tree, L, s, outflow[s])

    cdef double t = 0.0, tot, u, dt, target, c, new_rate, sumr
    cdef long n_events = 0
    cdef long[::1] touched = np.zeros(4 * R + 2, dtype=np.int64)
    cdef int n_touched, m, dup
    with bit_generator.lock:
        while True:
            tot = _fenwick_total(tree, L)
            if tot <= 0.0:
                break
            u = bg.next_double(bg.state)
            dt = -log(1.0 - u) / tot
            t += dt
            if t > T:
                break
            target = bg.next_double(bg.state) * tot
            i = _fenwick_find(tree, L, logL, target)
            # choose displacement r with weight p(|r|) (k + eta_{i+r})
            sumr = 0.0
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                j = _wrap(i + r, L)
                sumr += pw[(r if r > 0 else -r) - 1] * (k + eta[j])
            target = bg.next_double(bg.state) * sumr
            c = 0.0
            j = i
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                q = _wrap(i + r, L)
                c += pw[(r if r > 0 else -r) - 1] * (k + eta[q])
                if c > target:
                    j = q
                    break
            if j == i:
                continue
            eta[i] -= 1
            eta[j] += 1
            n_events += 1
            # refresh outflow of every site whose rate saw eta_i or eta_j
            n_touched = 0
            for r in range(-R, R + 1):
                site = _wrap(i + r, L)
                dup = 0
                for m in range(n_touched):
                    if touched[m] == site:
                        dup = 1
                        break
                if not dup:
                    touched[n_touched] = site
                    n_touched += 1
            for r in range(-R, R + 1):
                site = _wrap(j + r, L)
                dup = 0
                for m in range(n_touched):
                    if touched[m] == site:
                        dup = 1
                        break
                if not dup:
                    touched[n_touched] = site
                    n_touched += 1
            for m in range(n_touched):
                site = touched[m]
                new_rate = _site_outflow(eta, L, pw, R, k, pa, site)
                _fenwick_add(tree, L, site, new_rate - outflow[site])
                outflow[site] = new_rate
    return n_events


# ---------------------------------------------------------------------------
# finitely many labeled inclusion particles (the dual process)
# ---------------------------------------------------------------------------

def labeled_walkers(long[::1] pos, long L, double[::1] pw, double k, double T,
                    object bit_generator):
    """Evolve n labeled inclusion particles in place; returns event count.

    Particle m at x jumps to x + r at rate p(|r|) (k + #{m' != m at x + r}).
    Positions are mod L when L > 0, on Z when L == 0.
    """
    cdef bitgen_t *bg = _bitgen(bit_generator)
    cdef int n = pos.shape[0]
    cdef int R = pw.shape[0]
    cdef double t = 0.0, tot, u, dt, target, c, rate
    cdef int m, m2, r, moved
    cdef long x, y
    cdef long n_events = 0
    cdef double occ
    with bit_generator.lock:
        while n > 0:
            tot = 0.0
            for m in range(n):
                x = pos[m]
                for r in range(-R, R + 1):
                    if r == 0:
                        continue
                    y = _wrap(x + r, L) if L > 0 else x + r
                    occ = 0.0
                    for m2 in range(n):
                        if m2 != m and pos[m2] == y:
                            occ += 1.0
                    tot += pw[(r if r > 0 else -r) - 1] * (k + occ)
            u = bg.next_double(bg.state)
            dt = -log(1.0 - u) / tot
            t += dt
            if t > T:
                break
            target = bg.next_double(bg.state) * tot
            c = 0.0
            moved = 0
            for m in range(n):
                if moved:
                    break
                x = pos[m]
                for r in range(-R, R + 1):
                    if r == 0:
                        continue
                    y = _wrap(x + r, L) if L > 0 else x + r
                    occ = 0.0
                    for m2 in range(n):
                        if m2 != m and pos[m2] == y:
                            occ += 1.0
                    rate = pw[(r if r > 0 else -r) - 1] * (k + occ)
                    c += rate
                    if c > target:
                        pos[m] = y
                        n_events += 1
                        moved = 1
                        break
    return n_events


# ---------------------------------------------------------------------------
# uniformization: accumulate sum_m pois(m) u_m on the reflected window
# ---------------------------------------------------------------------------

def uniformize_accumulate(long M, long w0, double k, double[::1] pw,
                          double lam, double[::1] pmf, double[::1] acc):
    """Poisson-weighted powers of the uniformized reflected chain.

    States are w in {-M..M} stored at index w + M. Starts at w0 and writes
    sum_{m < len(pmf)} pmf[m] * (delta_{w0} P^m) into ``acc`` where
    P = I + Q / lam and Q is the gap-walk generator with jumps leaving
    {-M..M} suppressed.
    """
    cdef long n = 2 * M + 1
    cdef int R = pw.shape[0]
    cdef long n_steps = pmf.shape[0]
    cdef double[::1] u = np.zeros(n)
    cdef double[::1] v = np.zeros(n)
    # per-displacement outgoing probabilities rate(s, r) / lam, boundary cut
    cdef double[:, ::1] prob = np.zeros((2 * R + 1, n))
    cdef long s, m, tgt
    cdef int r, ri
    cdef double flow, p0
    for r in range(-R, R + 1):
        if r == 0:
            continue
        ri = r + R
        for s in range(n):
            tgt = s + r
            if tgt < 0 or tgt >= n:
                continue
            prob[ri, s] = 2.0 * pw[(r if r > 0 else -r) - 1] * \
                (k + (1.0 if r == -(s - M) else 0.0)) / lam
    u[w0 + M] = 1.0
    p0 = pmf[0]
    for s in range(n):
        acc[s] = p0 * u[s]
    with nogil:
        for m in range(1, n_steps):
            for s in range(n):
                v[s] = u[s]
            for r in range(-R, R + 1):
                if r == 0:
                    continue
                ri = r + R
                for s in range(n):
                    flow = u[s] * prob[ri, s]
                    if flow != 0.0:
                        v[s + r] += flow
                        v[s] -= flow
            for s in range(n):
                u[s] = v[s]
            p0 = pmf[m]
            if p0 != 0.0:
                for s in range(n):
                    acc[s] += p0 * u[s]
    return np.asarray(acc)
