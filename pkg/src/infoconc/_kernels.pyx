# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Semantics are defined by ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log1p, fabs
from libc.stdint cimport uint64_t

cnp.import_array()

BACKEND = "cython"

cdef uint64_t GOLDEN_GAMMA = 0x9E3779B97F4A7C15ULL
cdef double TWO_M53 = 1.1102230246251565e-16
cdef double SERIES_CUTOFF = 1.0
cdef enum:
    SERIES_TERMS = 20

from ._kernels_py import SERIES_COEF as _COEF_PY

cdef double C0[SERIES_TERMS]
cdef double C1[SERIES_TERMS]
cdef double C2[SERIES_TERMS]
for _k in range(SERIES_TERMS):
    C0[_k] = _COEF_PY[0, _k]
    C1[_k] = _COEF_PY[1, _k]
    C2[_k] = _COEF_PY[2, _k]


cdef inline uint64_t _mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def uniforms(uint64_t key, uint64_t start, Py_ssize_t count):
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    cdef uint64_t z
    with nogil:
        for i in range(count):
            z = _mix64(key + (start + <uint64_t>(i + 1)) * GOLDEN_GAMMA)
            o[i] = (<double>(z >> 11) + 0.5) * TWO_M53
    return out


cdef inline void _phi(double d, double* p0, double* p1, double* p2) noexcept nogil:
    cdef double em, s0, s1, s2
    cdef int k
    if d < SERIES_CUTOFF:
        s0 = 0.0
        s1 = 0.0
        s2 = 0.0
        for k in range(SERIES_TERMS - 1, -1, -1):
            s0 = s0 * d + C0[k]
            s1 = s1 * d + C1[k]
            s2 = s2 * d + C2[k]
        p0[0] = s0
        p1[0] = s1
        p2[0] = s2
    else:
        em = exp(-d)
        p0[0] = (1.0 - em) / d
        p1[0] = (1.0 - em * (1.0 + d)) / (d * d)
        p2[0] = (2.0 - em * (2.0 + 2.0 * d + d * d)) / (d * d * d)


def pl_weights(x, U, double alpha, double shift):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] uv = np.ascontiguousarray(U, dtype=np.float64)
    cdef Py_ssize_t nseg = xv.shape[0] - 1
    w0 = np.empty(nseg, dtype=np.float64)
    w1 = np.empty(nseg, dtype=np.float64)
    w2 = np.empty(nseg, dtype=np.float64)
    cdef double[::1] o0 = w0
    cdef double[::1] o1 = w1
    cdef double[::1] o2 = w2
    cdef Py_ssize_t i
    cdef double dx, al, ar, d, base, p0, p1, p2
    with nogil:
        for i in range(nseg):
            dx = xv[i + 1] - xv[i]
            al = alpha * (uv[i] - shift)
            ar = alpha * (uv[i + 1] - shift)
            d = ar - al
            if d >= 0.0:
                base = dx * exp(-al)
                _phi(d, &p0, &p1, &p2)
                o0[i] = base * p0
                o1[i] = base * p1
                o2[i] = base * p2
            else:
                base = dx * exp(-ar)
                _phi(-d, &p0, &p1, &p2)
                o0[i] = base * p0
                o1[i] = base * (p0 - p1)
                o2[i] = base * (p0 - 2.0 * p1 + p2)
    return w0, w1, w2


def pl_inverse_cdf(x, U, double alpha, double shift, cum, u):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[::1] uv = np.ascontiguousarray(U, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(cum, dtype=np.float64)
    cdef double[::1] qv = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = qv.shape[0]
    cdef Py_ssize_t nseg = xv.shape[0] - 1
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double total = cv[nseg]
    cdef Py_ssize_t k, lo, hi, mid, i
    cdef double target, dx, al, ar, d, D, base, q, qq, s, tau
    with nogil:
        for k in range(n):
            target = qv[k] * total
            # last i with cum[i] <= target
            lo = 0
            hi = nseg + 1
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if cv[mid] <= target:
                    lo = mid
                else:
                    hi = mid
            i = lo
            if i > nseg - 1:
                i = nseg - 1
            dx = xv[i + 1] - xv[i]
            al = alpha * (uv[i] - shift)
            ar = alpha * (uv[i + 1] - shift)
            d = ar - al
            q = target - cv[i]
            if d >= 0.0:
                base = exp(-al) * dx
                qq = q / base
            else:
                base = exp(-ar) * dx
                qq = (cv[i + 1] - cv[i] - q) / base
            if qq < 0.0:
                qq = 0.0
            D = fabs(d)
            if D > 1e-300:
                if qq * D >= 1.0:
                    s = 1.0
                else:
                    s = -log1p(-qq * D) / D
            else:
                s = qq
            if s < 0.0:
                s = 0.0
            elif s > 1.0:
                s = 1.0
            tau = s if d >= 0.0 else 1.0 - s
            o[k] = xv[i] + dx * tau
    return out
