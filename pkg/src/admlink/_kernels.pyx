# cython: language_level=3
"""Compiled demodulation kernels (hot loops of the Monte Carlo simulator).

Bit-exact counterparts of ``admlink._kernels_py``; see that module for the
argument and output contracts.  Rounding uses nearbyint (round-half-to-even
under the default floating environment) to match numpy's rint exactly.
"""

from libc.math cimport cos, fmod, nearbyint

import numpy as np

cdef double PI = 3.14159265358979323846264338327950288


def dpsk_rule(double[::1] phi,
              const unsigned char[:, ::1] up,
              const unsigned char[:, ::1] down,
              const unsigned char[::1] packed):
    """16-DPSK rule-based ranking kernel; see _kernels_py.dpsk_rule."""
    cdef Py_ssize_t n = phi.shape[0]
    hard_arr = np.empty(n, dtype=np.uint8)
    masks_arr = np.empty((n, 4), dtype=np.uint8)
    cdef unsigned char[::1] hard = hard_arr
    cdef unsigned char[:, ::1] masks = masks_arr
    cdef double step = PI / 8.0
    cdef Py_ssize_t t
    cdef double nearest, chi, alt, bestd
    cdef long m
    cdef double dvals[4]
    cdef int used[4]
    cdef int j, pos, best, mask
    for t in range(n):
        nearest = nearbyint(phi[t] / step)
        chi = phi[t] - nearest * step
        m = (<long> nearest) % 16
        if m < 0:
            m += 16
        for j in range(4):
            dvals[j] = up[m, j] * step - chi
            alt = down[m, j] * step + chi
            if alt < dvals[j]:
                dvals[j] = alt
            used[j] = 0
        mask = 0
        for pos in range(4):
            best = 0
            bestd = -1e300
            for j in range(4):
                if used[j] == 0 and dvals[j] > bestd:
                    bestd = dvals[j]
                    best = j
            used[best] = 1
            mask |= 1 << best
            masks[t, pos] = <unsigned char> mask
        hard[t] = packed[m]
    return hard_arr, masks_arr


cdef inline long _phase_index(double psi, double step, double *chi_out) nogil:
    cdef double nearest = nearbyint(psi / step)
    cdef long m = (<long> nearest) % 8
    if m < 0:
        m += 8
    chi_out[0] = psi - nearest * step
    return m


cdef inline void _phase_distances(long m, double chi, double step,
                                  const unsigned char[:, ::1] up,
                                  const unsigned char[:, ::1] down,
                                  double *dvals) nogil:
    cdef int j
    cdef double alt
    for j in range(3):
        dvals[j] = up[m, j] * step - chi
        alt = down[m, j] * step + chi
        if alt < dvals[j]:
            dvals[j] = alt


cdef inline void _sort_phase_bits(double *dvals, int *porder) nogil:
    # selection sort, 3 items, ties to the lower bit index
    cdef int used[3]
    cdef int pos, j, best
    cdef double bestd
    used[0] = used[1] = used[2] = 0
    for pos in range(3):
        best = 0
        bestd = -1e300
        for j in range(3):
            if used[j] == 0 and dvals[j] > bestd:
                bestd = dvals[j]
                best = j
        used[best] = 1
        porder[pos] = best + 1  # bit indices 1..3


def dapsk_rule(double[::1] r_prime,
               double[::1] psi,
               const unsigned char[:, ::1] up,
               const unsigned char[:, ::1] down,
               const unsigned char[::1] phase_packed4,
               double delta0,
               double ring_ratio):
    """16-DAPSK full-rule ranking kernel; see _kernels_py.dapsk_rule."""
    cdef Py_ssize_t n = r_prime.shape[0]
    hard_arr = np.empty(n, dtype=np.uint8)
    masks_arr = np.empty((n, 4), dtype=np.uint8)
    cdef unsigned char[::1] hard = hard_arr
    cdef unsigned char[:, ::1] masks = masks_arr
    cdef double step = PI / 4.0
    cdef double denom = ring_ratio * ring_ratio - 1.0
    cdef Py_ssize_t t
    cdef double chi, rp
    cdef long m
    cdef double dvals[3]
    cdef int porder[3]
    cdef int order[4]
    cdef int j, pos, losses, beats, mask
    for t in range(n):
        rp = r_prime[t]
        m = _phase_index(psi[t], step, &chi)
        _phase_distances(m, chi, step, up, down, dvals)
        _sort_phase_bits(dvals, porder)
        losses = 0
        for j in range(3):
            if rp > delta0:
                beats = rp > 2.0 * (ring_ratio - cos(dvals[j])) / denom
            elif rp < delta0:
                beats = rp < 2.0 * (ring_ratio * cos(dvals[j]) - 1.0) / denom
            else:
                beats = 0
            if beats == 0:
                losses += 1
        for pos in range(4):
            if pos < losses:
                order[pos] = porder[pos]
            elif pos == losses:
                order[pos] = 0
            else:
                order[pos] = porder[pos - 1]
        mask = 0
        for pos in range(4):
            mask |= 1 << order[pos]
            masks[t, pos] = <unsigned char> mask
        hard[t] = phase_packed4[m] | (1 if rp < delta0 else 0)
    return hard_arr, masks_arr


def dapsk_simple(double[::1] r_prime,
                 double[::1] psi,
                 const unsigned char[:, ::1] up,
                 const unsigned char[:, ::1] down,
                 const unsigned char[::1] phase_packed4,
                 double delta0,
                 double d1, double d2, double d3, double d4,
                 double center0, double period, double halfwidth,
                 int beta):
    """Simplified banded 16-DAPSK kernel; see _kernels_py.dapsk_simple."""
    cdef Py_ssize_t n = r_prime.shape[0]
    hard_arr = np.empty(n, dtype=np.uint8)
    keep_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] hard = hard_arr
    cdef unsigned char[::1] keep = keep_arr
    cdef double step = PI / 4.0
    cdef Py_ssize_t t
    cdef double chi, rp, off, u
    cdef long m
    cdef double dvals[3]
    cdef int porder[3]
    cdef int j, keep_b0, mask
    for t in range(n):
        rp = r_prime[t]
        m = _phase_index(psi[t], step, &chi)
        _phase_distances(m, chi, step, up, down, dvals)
        _sort_phase_bits(dvals, porder)

        if rp > d1 or rp <= d4:
            keep_b0 = 1
        elif rp > d3 and rp <= d2:
            keep_b0 = 0
        else:
            off = fmod(psi[t] - center0, period)
            if off < 0.0:
                off += period
            u = off if off < period - off else period - off
            keep_b0 = 0 if u < halfwidth else 1

        if keep_b0 == 1:
            mask = 1
            for j in range(beta - 1):
                mask |= 1 << porder[j]
        else:
            mask = 0
            for j in range(beta):
                mask |= 1 << porder[j]
        keep[t] = <unsigned char> mask
        hard[t] = phase_packed4[m] | (1 if rp < delta0 else 0)
    return hard_arr, keep_arr
