"""Cumulant curve F(alpha) = log int f**alpha and the tilted family f_alpha.

All integrals are computed on the model's structure:

* smooth 1D families: adaptive Gauss-Kronrod on a window outside which the
  integrand is below exp(-745) of its peak (gamma factors are integrated in
  log-coordinates so the integrand is smooth at the boundary);
* tabulated potentials: exact per-segment integrals of exp(-linear);
* homogeneous gauges: the layer-cake identity reduces everything to a 1D
  integral against t**(n-1)/(n-1)! dt;
* tabulated 2D grids: exact along x, Gauss-Legendre along y.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from ._backend import kernels
from .density import (
    TAIL_DEPTH,
    Density1D,
    GaussianIso,
    HomogeneousModel,
    ProductModel,
    Tabulated2D,
    as_model,
    truncation_window,
)
from .quadrature import QuadratureError, gk_integrate

QUAD_RTOL = 1e-13
GL_ORDER = 12
DEFAULT_ALPHAS = np.logspace(-1.0, 1.0, 40)


class ConsistencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Moments:
    """log int f**alpha, and mean/variance of U = -log f under f_alpha."""

    log_mass: float
    mean_U: float
    var_U: float
    error: float = 0.0


# ---------------------------------------------------------------------------
# 1D smooth families


def _plan(d: Density1D, alpha: float):
    """(potential in s, log-jacobian, lo, hi, peak of the tilted log-integrand, scale)."""
    k, p = d.kind, d.params
    ln = d.log_norm
    if k == "gaussian":
        mu, sig = p
        return (lambda s: 0.5 * ((s - mu) / sig) ** 2 + ln, None,
                -math.inf, math.inf, mu, sig)
    if k == "exponential":
        lam, loc = p
        return (lambda s: lam * (s - loc) + ln, None, loc, math.inf, loc, 1.0 / lam)
    if k == "gamma":
        shape, _, _ = p
        # s = log((x - loc) / scale); the Jacobian carries the scale
        return (lambda s: np.exp(s) - (shape - 1.0) * s + ln,
                lambda s: s + math.log(p[1]),
                -math.inf, math.inf, math.log((alpha * (shape - 1.0) + 1.0) / alpha), 1.0)
    if k == "uniform":
        a, b = p
        return (lambda s: np.full_like(np.asarray(s, dtype=np.float64), ln), None,
                a, b, 0.5 * (a + b), b - a)
    raise ValueError(f"no quadrature plan for {k}")


def _log_concave_moments(Us, logjac, lo, hi, peak, scale, alpha, full: bool) -> Moments:
    def ell(s):
        s = np.asarray(s, dtype=np.float64)
        v = -alpha * Us(s)
        if logjac is not None:
            v = v + logjac(s)
        return v

    ell_peak = float(ell(np.array([peak]))[0])
    a, b = truncation_window(lambda s: -ell(s), lo, hi, peak, depth=TAIL_DEPTH, scale=scale)

    tail = 0.0
    for end, inner in ((a, lo), (b, hi)):
        if end != inner:
            drop = ell_peak - float(ell(np.array([end]))[0])
            tail += math.exp(-drop) * abs(end - peak) / drop

    u_peak = float(Us(np.array([peak]))[0])

    def first(s):
        w = np.exp(ell(s) - ell_peak)
        if not full:
            return w
        return np.vstack([w, w * (Us(s) - u_peak)])

    res = gk_integrate(first, a, b, rtol=QUAD_RTOL, breakpoints=(peak,))
    mass = float(res.value[0])
    log_mass = ell_peak + math.log(mass)
    err = float(res.error[0]) / mass + tail / mass
    if not full:
        return Moments(log_mass, math.nan, math.nan, err)
    mean_shift = float(res.value[1]) / mass

    def second(s):
        w = np.exp(ell(s) - ell_peak)
        dev = Us(s) - u_peak - mean_shift
        return w * dev * dev

    res2 = gk_integrate(second, a, b, rtol=QUAD_RTOL, breakpoints=(peak,))
    var = float(res2.value[0]) / mass
    return Moments(log_mass, u_peak + mean_shift, var, err)


def _tabulated_moments(d: Density1D, alpha: float, full: bool) -> Moments:
    xa, Ua = d._xa, d._Ua
    umin = float(Ua.min())
    w0, w1, w2 = kernels.pl_weights(xa, Ua, alpha, umin)
    mass = float(np.sum(w0))
    log_mass = -alpha * (umin + d.log_norm) + math.log(mass)
    if not full:
        return Moments(log_mass, math.nan, math.nan)
    dU = np.diff(Ua)
    mean_raw = float(np.sum(Ua[:-1] * w0 + dU * w1)) / mass
    c = Ua[:-1] - mean_raw
    var = float(np.sum(c * c * w0 + 2.0 * c * dU * w1 + dU * dU * w2)) / mass
    return Moments(log_mass, mean_raw + d.log_norm, max(var, 0.0))


@lru_cache(maxsize=65536)
def factor_moments(d: Density1D, alpha: float, full: bool = True) -> Moments:
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    if d.kind == "tabulated":
        return _tabulated_moments(d, alpha, full)
    Us, logjac, lo, hi, peak, scale = _plan(d, alpha)
    return _log_concave_moments(Us, logjac, lo, hi, peak, scale, alpha, full)


# ---------------------------------------------------------------------------
# homogeneous models (layer cake)


@lru_cache(maxsize=65536)
def radial_moments(n: int, rate: float, alpha: float, full: bool = True) -> Moments:
    """Moments for rate**n exp(-rate * psi) with psi a normalized degree-1 gauge.

    int g(psi(x)) dx = int_0^inf g(t) t**(n-1)/(n-1)! dt; integrate in s = log(rate t).
    """
    log_rate = math.log(rate)
    lg = float(gammaln(n))

    def Us(s):
        return np.exp(s) - n * log_rate

    def logjac(s):
        return n * (s - log_rate) - lg

    return _log_concave_moments(Us, logjac, -math.inf, math.inf, math.log(n / alpha), 1.0, alpha, full)


# ---------------------------------------------------------------------------
# tabulated 2D


@dataclass(frozen=True)
class Moments2D(Moments):
    mean_xy: tuple = (math.nan, math.nan)


_GL_T, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)
_GL_T = 0.5 * (_GL_T + 1.0)
_GL_W = 0.5 * _GL_W


def _rows(model: Tabulated2D):
    ya, Ua = model._ya, model._Ua
    dy = np.diff(ya)
    # rows indexed (y-cell, GL node)
    t = _GL_T[None, :]
    y_rows = (ya[:-1, None] + dy[:, None] * t).reshape(-1)
    rho = (dy[:, None] * _GL_W[None, :]).reshape(-1)
    R = (Ua[:, :-1, None] * (1.0 - t) + Ua[:, 1:, None] * t)   # (nx, ny-1, G)
    R = R.reshape(Ua.shape[0], -1).T                            # (rows, nx)
    return y_rows, rho, R


@lru_cache(maxsize=4096)
def tabulated2d_moments(model: Tabulated2D, alpha: float, raw: bool = False) -> Moments2D:
    xa = model._xa
    nx = xa.size
    y_rows, rho, R = _rows(model)
    nrows = R.shape[0]
    umin = float(model._Ua.min())
    flat_x = np.tile(xa, nrows)
    w0, w1, w2 = kernels.pl_weights(flat_x, R.reshape(-1), alpha, umin)
    pad = lambda w: np.append(w, 0.0).reshape(nrows, nx)[:, :-1]  # noqa: E731
    w0, w1, w2 = pad(w0), pad(w1), pad(w2)
    dx = np.diff(xa)
    dU = np.diff(R, axis=1)
    U0 = R[:, :-1]

    row_mass = np.sum(w0, axis=1)
    mass = float(rho @ row_mass)
    log_norm = 0.0 if raw else model.log_norm
    log_mass = -alpha * (umin + log_norm) + math.log(mass)

    mean_raw = float(rho @ np.sum(U0 * w0 + dU * w1, axis=1)) / mass
    c = U0 - mean_raw
    var = float(rho @ np.sum(c * c * w0 + 2 * c * dU * w1 + dU * dU * w2, axis=1)) / mass
    mx = float(rho @ np.sum(xa[None, :-1] * w0 + dx[None, :] * w1, axis=1)) / mass
    my = float(rho @ (y_rows * row_mass)) / mass
    return Moments2D(log_mass, mean_raw + log_norm, max(var, 0.0), 0.0, (mx, my))


def tabulated2d_cell_masses(model: Tabulated2D) -> np.ndarray:
    """Probability of each grid cell, shape (nx-1, ny-1)."""
    xa = model._xa
    nx = xa.size
    _, rho, R = _rows(model)
    nrows = R.shape[0]
    w0, _, _ = kernels.pl_weights(np.tile(xa, nrows), R.reshape(-1), 1.0, float(model._Ua.min()))
    w0 = np.append(w0, 0.0).reshape(nrows, nx)[:, :-1] * rho[:, None]   # (rows, nx-1)
    cells = w0.reshape(len(model.ys) - 1, GL_ORDER, nx - 1).sum(axis=1).T
    return cells / cells.sum()


# ---------------------------------------------------------------------------
# public operations


def tilt_moments(model, alpha: float, full: bool = True) -> Moments:
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    m = as_model(model)
    alpha = float(alpha)
    if isinstance(m, (ProductModel, GaussianIso)):
        parts = [factor_moments(f, alpha, full) for f in m.factors]
        return Moments(
            sum(p.log_mass for p in parts),
            sum(p.mean_U for p in parts),
            sum(p.var_U for p in parts),
            sum(p.error for p in parts),
        )
    if isinstance(m, HomogeneousModel):
        return radial_moments(m.dim, float(m.rate), alpha, full)
    if isinstance(m, Tabulated2D):
        return tabulated2d_moments(m, alpha)
    raise TypeError(f"unsupported model {type(m).__name__}")


def compute_F(model, alpha: float) -> float:
    """log int f**alpha."""
    return tilt_moments(model, alpha, full=False).log_mass


def tilted_density(model, alpha: float):
    return model.tilt(alpha)


def tilted_entropy(model, alpha: float) -> float:
    """h(X_alpha) = alpha * E_alpha[U] + F(alpha)."""
    mo = tilt_moments(model, alpha)
    return alpha * mo.mean_U + mo.log_mass


def tilted_varentropy(model, alpha: float) -> float:
    """V(X_alpha) = alpha**2 Var_alpha[U]."""
    mo = tilt_moments(model, alpha)
    v = alpha * alpha * mo.var_U
    if v < -1e-10:
        raise ConsistencyError(f"negative varentropy {v}")
    return max(v, 0.0)


def entropy_quad(model) -> float:
    return tilted_entropy(model, 1.0)


def varentropy_quad(model) -> float:
    return tilted_varentropy(model, 1.0)


def fd_step(alpha: float) -> float:
    return max(1e-5, 1e-4 * alpha)


@dataclass(frozen=True)
class DerivativeCheck:
    alpha: float
    Fp_fd: float
    Fp_identity: float
    Fpp_fd: float
    Fpp_identity: float
    consistent: bool

    @property
    def Fp(self) -> float:
        return self.Fp_identity

    @property
    def Fpp(self) -> float:
        return self.Fpp_identity


def _fd(model, alpha: float, step: float | None):
    h = fd_step(alpha) if step is None else step
    if alpha - 2 * h <= 0:
        raise ValueError("finite-difference stencil leaves (0, inf)")
    F = {k: compute_F(model, alpha + k * h) for k in (-2, -1, 0, 1, 2)}
    fp = (F[1] - F[-1]) / (2 * h)
    fpp = (-F[2] + 16 * F[1] - 30 * F[0] + 16 * F[-1] - F[-2]) / (12 * h * h)
    # rounding floor of the stencils given F is known to a few ulps
    scale = max(1.0, max(abs(v) for v in F.values()))
    floor_p = 8 * np.finfo(float).eps * scale / h
    floor_pp = 64 * np.finfo(float).eps * scale / (h * h)
    return F[0], fp, fpp, floor_p, floor_pp


def F_derivatives(model, alpha: float, step: float | None = None, rtol: float = 1e-5) -> DerivativeCheck:
    """F' and F'' by central differences and by the tilted entropy/varentropy identities."""
    F0, fp, fpp, floor_p, floor_pp = _fd(model, alpha, step)
    h_alpha = tilted_entropy(model, alpha)
    fp_id = (F0 - h_alpha) / alpha
    fpp_id = tilted_varentropy(model, alpha) / alpha**2
    ok_p = abs(fp - fp_id) <= rtol * max(abs(fp), abs(fp_id)) + floor_p
    ok_pp = abs(fpp - fpp_id) <= rtol * max(abs(fpp), abs(fpp_id)) + floor_pp
    return DerivativeCheck(alpha, fp, fp_id, fpp, fpp_id, bool(ok_p and ok_pp))


@dataclass
class TiltCurve:
    alpha: np.ndarray
    F: np.ndarray
    Fp: np.ndarray
    Fpp: np.ndarray
    V: np.ndarray
    logG: np.ndarray
    dim: int
    model: str = ""
    entropy: float = math.nan
    varentropy: float = math.nan

    @property
    def K_hat(self) -> float:
        return float(np.max(self.V))

    def K_within_dimension(self, tol: float = 1e-9) -> bool:
        return self.K_hat <= self.dim + tol

    def summary(self) -> dict:
        return {
            "model": self.model,
            "dim": self.dim,
            "entropy": self.entropy,
            "varentropy": self.varentropy,
            "K_hat": self.K_hat,
            "varentropy_bound_holds": bool(self.K_within_dimension()),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k, v in self.summary().items():
            buf.write(f"# {k}={v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "F", "Fp", "Fpp", "V", "logG"])
        for row in zip(self.alpha, self.F, self.Fp, self.Fpp, self.V, self.logG):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def to_dict(self) -> dict:
        out = self.summary()
        out["curve"] = {k: [float(v) for v in getattr(self, k)]
                        for k in ("alpha", "F", "Fp", "Fpp", "V", "logG")}
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def compute_tilt_curve(model, alphas=None, step: float | None = None) -> TiltCurve:
    m = as_model(model)
    alphas = DEFAULT_ALPHAS if alphas is None else np.asarray(alphas, dtype=np.float64)
    if alphas.size < 5 or np.any(alphas <= 0) or np.any(np.diff(alphas) <= 0):
        raise ValueError("alpha grid must be strictly increasing, positive, with >= 5 points")
    F, Fp, Fpp, V = [], [], [], []
    for a in alphas:
        F0, fp, fpp, _, _ = _fd(m, float(a), step)
        F.append(F0)
        Fp.append(fp)
        Fpp.append(fpp)
        V.append(tilted_varentropy(m, float(a)))
    F = np.array(F)
    return TiltCurve(
        alpha=alphas.copy(), F=F, Fp=np.array(Fp), Fpp=np.array(Fpp), V=np.array(V),
        logG=m.dim * np.log(alphas) + F, dim=m.dim, model=m.label,
        entropy=entropy_quad(m), varentropy=varentropy_quad(m),
    )


def log_G(model, alpha: float) -> float:
    return as_model(model).dim * math.log(alpha) + compute_F(model, alpha)


@dataclass(frozen=True)
class ConcavityResiduals:
    midpoint_min: float
    three_point_min: float
    pairs: int

    @property
    def min_residual(self) -> float:
        return min(self.midpoint_min, self.three_point_min)


def log_G_concavity(model, alphas=None) -> ConcavityResiduals:
    """Concavity residuals of log G on a grid.

    Midpoint residual logG((a+b)/2) - (logG(a) + logG(b))/2 over every grid pair,
    plus the three-point residual for consecutive grid triples.
    """
    alphas = DEFAULT_ALPHAS if alphas is None else np.asarray(alphas, dtype=np.float64)
    lg = np.array([log_G(model, float(a)) for a in alphas])
    mid_min = math.inf
    pairs = 0
    for i in range(alphas.size):
        for j in range(i + 1, alphas.size):
            am = 0.5 * (alphas[i] + alphas[j])
            r = log_G(model, float(am)) - 0.5 * (lg[i] + lg[j])
            mid_min = min(mid_min, r)
            pairs += 1
    a1, a2, a3 = alphas[:-2], alphas[1:-1], alphas[2:]
    lam = (a3 - a2) / (a3 - a1)
    three = lg[1:-1] - (lam * lg[:-2] + (1 - lam) * lg[2:])
    return ConcavityResiduals(float(mid_min), float(np.min(three)), pairs)


def mgf_quad(model, beta: float) -> float:
    """E exp(beta (h~(X) - h(X))) = exp(F(1 - beta) - beta h), for beta < 1."""
    if beta >= 1:
        raise ValueError("beta must be < 1")
    return math.exp(compute_F(model, 1.0 - beta) - beta * entropy_quad(model))


__all__ = [
    "ConsistencyError", "DerivativeCheck", "Moments", "QuadratureError", "TiltCurve",
    "compute_F", "compute_tilt_curve", "entropy_quad", "F_derivatives", "log_G",
    "log_G_concavity", "mgf_quad", "tilt_moments", "tilted_density", "tilted_entropy",
    "tilted_varentropy", "varentropy_quad",
]
