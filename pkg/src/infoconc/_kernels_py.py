"""Numpy implementations of the hot kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when the
extension is not built or when ``INFOCONC_BACKEND=python``.

Piecewise-linear ("PL") kernels work on a potential tabulated at nodes ``x``
with values ``U``.  On segment ``i`` the local coordinate is
``tau = (x - x[i]) / (x[i+1] - x[i])`` and the kernels return

    w_j[i] = int_segment exp(-alpha * (U(x) - shift)) * tau**j dx,  j = 0, 1, 2

which is enough to integrate any quadratic polynomial in U or x exactly.
"""

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_M53 = 2.0 ** -53

_SERIES_CUTOFF = 1.0
_SERIES_TERMS = 20


def _series_coefficients():
    # phi_j(d) = sum_k (-d)^k / (k! (k + j + 1))
    c = np.empty((3, _SERIES_TERMS))
    fact = 1.0
    for k in range(_SERIES_TERMS):
        for j in range(3):
            c[j, k] = (-1.0) ** k / (fact * (k + j + 1))
        fact *= k + 1
    return c


SERIES_COEF = _series_coefficients()

BACKEND = "python"


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def uniforms(key, start, count):
    """Open-interval uniforms for counters ``start+1 .. start+count`` under ``key``."""
    ctr = np.arange(1, count + 1, dtype=np.uint64) + np.uint64(start)
    z = np.uint64(key) + ctr * GOLDEN_GAMMA
    z = _mix64(z)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_M53


def _phi(d):
    """phi_j(d) = int_0^1 exp(-d t) t**j dt for j = 0, 1, 2 and d >= 0."""
    d = np.asarray(d, dtype=np.float64)
    small = d < _SERIES_CUTOFF
    p0 = np.empty_like(d)
    p1 = np.empty_like(d)
    p2 = np.empty_like(d)

    ds = d[small]
    if ds.size:
        s0 = np.zeros_like(ds)
        s1 = np.zeros_like(ds)
        s2 = np.zeros_like(ds)
        for k in range(_SERIES_TERMS - 1, -1, -1):
            s0 = s0 * ds + SERIES_COEF[0, k]
            s1 = s1 * ds + SERIES_COEF[1, k]
            s2 = s2 * ds + SERIES_COEF[2, k]
        p0[small] = s0
        p1[small] = s1
        p2[small] = s2

    dl = d[~small]
    if dl.size:
        em = np.exp(-dl)
        p0[~small] = (1.0 - em) / dl
        p1[~small] = (1.0 - em * (1.0 + dl)) / dl**2
        p2[~small] = (2.0 - em * (2.0 + 2.0 * dl + dl * dl)) / dl**3
    return p0, p1, p2


def pl_weights(x, U, alpha, shift):
    x = np.asarray(x, dtype=np.float64)
    U = np.asarray(U, dtype=np.float64)
    dx = np.diff(x)
    al = alpha * (U[:-1] - shift)
    ar = alpha * (U[1:] - shift)
    d = ar - al
    up = d >= 0.0
    base = np.exp(-np.where(up, al, ar))
    p0, p1, p2 = _phi(np.abs(d))
    w0 = dx * base * p0
    w1 = dx * base * np.where(up, p1, p0 - p1)
    w2 = dx * base * np.where(up, p2, p0 - 2.0 * p1 + p2)
    return w0, w1, w2


def pl_inverse_cdf(x, U, alpha, shift, cum, u):
    """Invert the CDF of exp(-alpha U) on the PL grid at probabilities ``u``.

    ``cum`` is the cumulative sum of ``w0`` with a leading zero.
    """
    x = np.asarray(x, dtype=np.float64)
    U = np.asarray(U, dtype=np.float64)
    cum = np.asarray(cum, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    nseg = x.size - 1
    target = u * cum[-1]
    i = np.searchsorted(cum, target, side="right") - 1
    i = np.clip(i, 0, nseg - 1)

    dx = x[i + 1] - x[i]
    al = alpha * (U[i] - shift)
    ar = alpha * (U[i + 1] - shift)
    d = ar - al
    q = target - cum[i]
    seg_mass = cum[i + 1] - cum[i]

    up = d >= 0.0
    D = np.abs(d)
    base = np.exp(-np.where(up, al, ar)) * dx
    with np.errstate(divide="ignore", invalid="ignore"):
        # mass measured from the low-potential end of the segment
        qq = np.where(up, q, seg_mass - q) / base
        qq = np.maximum(qq, 0.0)
        s = np.where(D > 1e-300, -np.log1p(-np.minimum(qq * D, 1.0)) / D, qq)
    s = np.clip(s, 0.0, 1.0)
    tau = np.where(up, s, 1.0 - s)
    return x[i] + dx * tau
