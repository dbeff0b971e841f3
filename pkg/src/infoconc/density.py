"""Log-concave densities on R^n.

Four model structures are supported: products of 1D factors, isotropic
Gaussians, homogeneous-gauge densities ``rate**n * exp(-rate * c * gauge(x))``
and bilinear potentials tabulated on a rectangle.  Every object is immutable;
``potential`` always means the *normalized* ``-log f``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from scipy.special import gammaln

from ._backend import kernels
from .quadrature import QuadratureError, gk_integrate

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# exp(-745) underflows to zero in double precision
TAIL_DEPTH = 745.0


class DimensionError(ValueError):
    pass


class UnsupportedError(ValueError):
    pass


def _convex_pl(x: np.ndarray, U: np.ndarray) -> bool:
    """Piecewise-linear interpolant through (x, U) is convex iff slopes never decrease."""
    if x.size < 3:
        return True
    s = np.diff(U) / np.diff(x)
    ds = np.diff(s)
    tol = 1e-12 + 1e-9 * np.maximum(np.abs(s[:-1]), np.abs(s[1:]))
    return bool(np.all(ds >= -tol))


@dataclass(frozen=True)
class Density1D:
    """One-dimensional log-concave density from the catalog families.

    Use the classmethod constructors; ``params`` layout depends on ``kind``:
    gaussian (mu, sigma), exponential (rate, loc), gamma (shape, scale, loc),
    uniform (a, b), tabulated () with nodes in ``x`` and potential in ``U``.
    """

    kind: str
    params: tuple = ()
    x: tuple = field(default=(), repr=False)
    U: tuple = field(default=(), repr=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def gaussian(cls, mu: float = 0.0, sigma: float = 1.0) -> "Density1D":
        if not sigma > 0:
            raise ValueError("gaussian sigma must be > 0")
        return cls("gaussian", (float(mu), float(sigma)))

    @classmethod
    def exponential(cls, rate: float = 1.0, loc: float = 0.0) -> "Density1D":
        if not rate > 0:
            raise ValueError("exponential rate must be > 0")
        return cls("exponential", (float(rate), float(loc)))

    @classmethod
    def gamma(cls, shape: float, scale: float = 1.0, loc: float = 0.0) -> "Density1D":
        if not shape >= 1:
            raise ValueError(f"gamma shape {shape} < 1 is not log-concave")
        if not scale > 0:
            raise ValueError("gamma scale must be > 0")
        return cls("gamma", (float(shape), float(scale), float(loc)))

    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> "Density1D":
        if not a < b:
            raise ValueError("uniform needs a < b")
        return cls("uniform", (float(a), float(b)))

    @classmethod
    def tabulated(cls, x: Sequence[float], U: Sequence[float]) -> "Density1D":
        xa = np.asarray(x, dtype=np.float64)
        Ua = np.asarray(U, dtype=np.float64)
        if xa.ndim != 1 or xa.shape != Ua.shape or xa.size < 2:
            raise ValueError("tabulated potential needs matching 1D arrays with >= 2 nodes")
        if not np.all(np.isfinite(xa)) or not np.all(np.isfinite(Ua)):
            raise ValueError("tabulated potential must be finite on its grid")
        if not np.all(np.diff(xa) > 0):
            raise ValueError("tabulated grid must be strictly increasing")
        if not _convex_pl(xa, Ua):
            raise ValueError("tabulated potential is not convex on its grid")
        return cls("tabulated", (), tuple(xa.tolist()), tuple(Ua.tolist()))

    # -- tabulated helpers -------------------------------------------------
    @cached_property
    def _xa(self) -> np.ndarray:
        return np.asarray(self.x, dtype=np.float64)

    @cached_property
    def _Ua(self) -> np.ndarray:
        return np.asarray(self.U, dtype=np.float64)

    @cached_property
    def log_norm(self) -> float:
        """log of the normalizing constant of the family's unnormalized form."""
        k, p = self.kind, self.params
        if k == "gaussian":
            return math.log(p[1]) + LOG_SQRT_2PI
        if k == "exponential":
            return -math.log(p[0])
        if k == "gamma":
            return float(gammaln(p[0])) + math.log(p[1])
        if k == "uniform":
            return math.log(p[1] - p[0])
        umin = float(self._Ua.min())
        w0, _, _ = kernels.pl_weights(self._xa, self._Ua, 1.0, umin)
        return math.log(float(np.sum(w0))) - umin

    # -- geometry ----------------------------------------------------------
    @property
    def support(self) -> tuple[float, float]:
        k, p = self.kind, self.params
        if k == "gaussian":
            return (-math.inf, math.inf)
        if k == "exponential":
            return (p[1], math.inf)
        if k == "gamma":
            return (p[2], math.inf)
        if k == "uniform":
            return (p[0], p[1])
        return (self.x[0], self.x[-1])

    def in_support(self, x) -> np.ndarray:
        lo, hi = self.support
        x = np.asarray(x, dtype=np.float64)
        return (x >= lo) & (x <= hi)

    def potential(self, x) -> np.ndarray:
        """Normalized -log f(x); +inf off the support."""
        x = np.asarray(x, dtype=np.float64)
        k, p = self.kind, self.params
        with np.errstate(divide="ignore", invalid="ignore"):
            if k == "gaussian":
                z = (x - p[0]) / p[1]
                out = 0.5 * z * z + self.log_norm
            elif k == "exponential":
                out = p[0] * (x - p[1]) + self.log_norm
            elif k == "gamma":
                z = (x - p[2]) / p[1]
                if p[0] == 1.0:
                    out = z + self.log_norm
                else:
                    out = z - (p[0] - 1.0) * np.log(z) + self.log_norm
            elif k == "uniform":
                out = np.full_like(x, self.log_norm)
            else:
                out = np.interp(x, self._xa, self._Ua) + self.log_norm
        inside = self.in_support(x)
        out = np.where(inside, out, np.inf)
        return out if out.ndim else float(out)

    def log_density(self, x):
        return -self.potential(x)

    @property
    def mode(self) -> float:
        k, p = self.kind, self.params
        if k == "gaussian":
            return p[0]
        if k == "exponential":
            return p[1]
        if k == "gamma":
            return p[2] + (p[0] - 1.0) * p[1]
        if k == "uniform":
            return 0.5 * (p[0] + p[1])
        return float(self._xa[np.argmin(self._Ua)])

    @property
    def log_sup(self) -> float:
        """log ||f||_inf."""
        return -float(self.potential(self.mode))

    @cached_property
    def mean(self) -> float:
        k, p = self.kind, self.params
        if k == "gaussian":
            return p[0]
        if k == "exponential":
            return p[1] + 1.0 / p[0]
        if k == "gamma":
            return p[2] + p[0] * p[1]
        if k == "uniform":
            return 0.5 * (p[0] + p[1])
        xa, Ua = self._xa, self._Ua
        w0, w1, _ = kernels.pl_weights(xa, Ua, 1.0, float(Ua.min()))
        return float(np.sum(xa[:-1] * w0 + np.diff(xa) * w1) / np.sum(w0))

    def probe_interval(self) -> tuple[float, float]:
        """A bounded interval inside the support that carries almost all the mass."""
        k, p = self.kind, self.params
        if k == "gaussian":
            return (p[0] - 8 * p[1], p[0] + 8 * p[1])
        if k == "exponential":
            return (p[1], p[1] + 30.0 / p[0])
        if k == "gamma":
            return (p[2], p[2] + p[1] * (p[0] + 12 * math.sqrt(p[0]) + 30))
        return self.support

    # -- transformations ---------------------------------------------------
    def tilt(self, alpha: float) -> "Density1D":
        """Density proportional to f**alpha."""
        if not alpha > 0:
            raise ValueError("alpha must be > 0")
        k, p = self.kind, self.params
        if alpha == 1.0:
            return self
        if k == "gaussian":
            return Density1D.gaussian(p[0], p[1] / math.sqrt(alpha))
        if k == "exponential":
            return Density1D.exponential(p[0] * alpha, p[1])
        if k == "gamma":
            return Density1D.gamma(alpha * (p[0] - 1.0) + 1.0, p[1] / alpha, p[2])
        if k == "uniform":
            return self
        return Density1D.tabulated(self.x, (alpha * self._Ua).tolist())

    def affine(self, scale: float, shift: float) -> "Density1D":
        """Law of scale * X + shift."""
        if scale == 0:
            raise ValueError("affine scale must be nonzero")
        k, p = self.kind, self.params
        if k == "gaussian":
            return Density1D.gaussian(scale * p[0] + shift, abs(scale) * p[1])
        if k == "uniform":
            a, b = sorted((scale * p[0] + shift, scale * p[1] + shift))
            return Density1D.uniform(a, b)
        if k == "tabulated":
            xn = scale * self._xa + shift
            Un = self._Ua
            if scale < 0:
                xn, Un = xn[::-1], Un[::-1]
            return Density1D.tabulated(xn, Un)
        if scale < 0:
            raise UnsupportedError(f"{k} family is not closed under reflection")
        if k == "exponential":
            return Density1D.exponential(p[0] / scale, scale * p[1] + shift)
        return Density1D.gamma(p[0], scale * p[1], scale * p[2] + shift)

    @property
    def label(self) -> str:
        k, p = self.kind, self.params
        if k == "tabulated":
            return f"tabulated[{len(self.x)} nodes on [{self.x[0]:g},{self.x[-1]:g}]]"
        return f"{k}({','.join(f'{v:g}' for v in p)})"

    def to_config(self) -> dict:
        k, p = self.kind, self.params
        if k == "gaussian":
            return {"kind": k, "mu": p[0], "sigma": p[1]}
        if k == "exponential":
            return {"kind": k, "rate": p[0], "loc": p[1]}
        if k == "gamma":
            return {"kind": k, "shape": p[0], "scale": p[1], "loc": p[2]}
        if k == "uniform":
            return {"kind": k, "a": p[0], "b": p[1]}
        return {"kind": k, "x": list(self.x), "U": list(self.U)}


# ---------------------------------------------------------------------------
# gauges


_GAUGE_KINDS = ("l1", "l2", "linf", "weighted-l1")


@dataclass(frozen=True)
class GaugeSpec:
    kind: str
    n: int
    weights: tuple = ()

    def __post_init__(self):
        if self.kind not in _GAUGE_KINDS:
            raise ValueError(f"unknown gauge {self.kind!r}; expected one of {_GAUGE_KINDS}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("gauge dimension must be a positive integer")
        if self.kind == "weighted-l1":
            if len(self.weights) != self.n or not all(w > 0 for w in self.weights):
                raise ValueError("weighted-l1 needs n positive weights")
        elif self.weights:
            raise ValueError(f"{self.kind} gauge takes no weights")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.n:
            raise DimensionError(f"gauge expects points of dimension {self.n}, got {x.shape[-1]}")
        if self.kind == "l1":
            return np.sum(np.abs(x), axis=-1)
        if self.kind == "l2":
            return np.sqrt(np.sum(x * x, axis=-1))
        if self.kind == "linf":
            return np.max(np.abs(x), axis=-1)
        return np.abs(x) @ np.asarray(self.weights)

    @property
    def log_unit_volume(self) -> float:
        """log Vol{gauge <= 1}."""
        n = self.n
        if self.kind == "l1":
            return n * math.log(2.0) - float(gammaln(n + 1))
        if self.kind == "l2":
            return 0.5 * n * math.log(math.pi) - float(gammaln(0.5 * n + 1))
        if self.kind == "linf":
            return n * math.log(2.0)
        return n * math.log(2.0) - float(gammaln(n + 1)) - float(np.sum(np.log(self.weights)))

    @property
    def log_integral(self) -> float:
        """log of int exp(-gauge), equal to log(n! Vol{gauge <= 1})."""
        return float(gammaln(self.n + 1)) + self.log_unit_volume

    @property
    def normalizer(self) -> float:
        """c such that int exp(-c * gauge) = 1."""
        return math.exp(self.log_integral / self.n)


# ---------------------------------------------------------------------------
# models


def _as_points(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if n == 1 and x.ndim == 0:
        return x.reshape(1, 1)
    if n == 1 and x.ndim == 1 and x.shape[0] != 1:
        return x.reshape(-1, 1)
    if x.shape[-1] != n:
        raise DimensionError(f"model has dimension {n}, point has dimension {x.shape[-1]}")
    return x.reshape(-1, n)


@dataclass(frozen=True)
class ProductModel:
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("product needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    structure = "product"

    @property
    def dim(self) -> int:
        return len(self.factors)

    @property
    def label(self) -> str:
        labels = [f.label for f in self.factors]
        if len(set(labels)) == 1 and len(labels) > 1:
            return f"{labels[0]}^{len(labels)}"
        return " x ".join(labels)

    def potential(self, x) -> np.ndarray:
        pts = _as_points(x, self.dim)
        out = np.zeros(pts.shape[0])
        for i, f in enumerate(self.factors):
            out = out + f.potential(pts[:, i])
        return out

    def in_support(self, x) -> np.ndarray:
        pts = _as_points(x, self.dim)
        ok = np.ones(pts.shape[0], dtype=bool)
        for i, f in enumerate(self.factors):
            ok &= f.in_support(pts[:, i])
        return ok

    @property
    def log_sup(self) -> float:
        return sum(f.log_sup for f in self.factors)

    @property
    def mean(self) -> np.ndarray:
        return np.array([f.mean for f in self.factors])

    def tilt(self, alpha: float) -> "ProductModel":
        return ProductModel(tuple(f.tilt(alpha) for f in self.factors))

    def affine(self, scales, shifts) -> "ProductModel":
        return ProductModel(tuple(f.affine(a, b) for f, a, b in zip(self.factors, scales, shifts)))

    def probe_box(self) -> np.ndarray:
        return np.array([f.probe_interval() for f in self.factors])

    def to_config(self) -> dict:
        return {"structure": "product", "factors": [f.to_config() for f in self.factors]}


@dataclass(frozen=True)
class GaussianIso:
    n: int
    sigma: float = 1.0

    structure = "gaussian_iso"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("dimension must be a positive integer")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")

    @property
    def dim(self) -> int:
        return self.n

    @property
    def label(self) -> str:
        return f"gaussian_iso({self.n})" if self.sigma == 1.0 else f"gaussian_iso({self.n},sigma={self.sigma:g})"

    @cached_property
    def factors(self) -> tuple:
        return (Density1D.gaussian(0.0, self.sigma),) * self.n

    def potential(self, x) -> np.ndarray:
        pts = _as_points(x, self.n)
        s2 = np.sum(pts * pts, axis=-1) / self.sigma**2
        return 0.5 * s2 + self.n * (LOG_SQRT_2PI + math.log(self.sigma))

    def in_support(self, x) -> np.ndarray:
        return np.ones(_as_points(x, self.n).shape[0], dtype=bool)

    @property
    def log_sup(self) -> float:
        return -self.n * (LOG_SQRT_2PI + math.log(self.sigma))

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(self.n)

    def tilt(self, alpha: float) -> "GaussianIso":
        if not alpha > 0:
            raise ValueError("alpha must be > 0")
        return GaussianIso(self.n, self.sigma / math.sqrt(alpha))

    def probe_box(self) -> np.ndarray:
        return np.array([[-8 * self.sigma, 8 * self.sigma]] * self.n)

    def to_config(self) -> dict:
        return {"structure": "gaussian_iso", "n": self.n, "sigma": self.sigma}


@dataclass(frozen=True)
class HomogeneousModel:
    """Density rate**n * exp(-rate * c * gauge(x)) with c normalizing exp(-c * gauge)."""

    gauge: GaugeSpec
    rate: float = 1.0

    structure = "homogeneous"

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be > 0")

    @property
    def dim(self) -> int:
        return self.gauge.n

    @property
    def label(self) -> str:
        base = f"homogeneous-{self.gauge.kind}({self.gauge.n})"
        return base if self.rate == 1.0 else f"{base}[rate={self.rate:g}]"

    @property
    def c(self) -> float:
        return self.gauge.normalizer

    def scaled_gauge(self, x) -> np.ndarray:
        """The normalized gauge c * gauge(x); Gamma(n, 1) distributed when rate = 1."""
        return self.c * self.gauge(_as_points(x, self.dim))

    def potential(self, x) -> np.ndarray:
        return self.rate * self.scaled_gauge(x) - self.dim * math.log(self.rate)

    def in_support(self, x) -> np.ndarray:
        return np.ones(_as_points(x, self.dim).shape[0], dtype=bool)

    @property
    def log_sup(self) -> float:
        return self.dim * math.log(self.rate)

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(self.dim)

    def tilt(self, alpha: float) -> "HomogeneousModel":
        if not alpha > 0:
            raise ValueError("alpha must be > 0")
        return HomogeneousModel(self.gauge, self.rate * alpha)

    def probe_box(self) -> np.ndarray:
        r = (self.dim + 12 * math.sqrt(self.dim) + 30) / (self.rate * self.c)
        if self.gauge.kind == "weighted-l1":
            return np.array([[-r / w, r / w] for w in self.gauge.weights])
        return np.array([[-r, r]] * self.dim)

    def to_config(self) -> dict:
        cfg = {"structure": "homogeneous", "gauge": self.gauge.kind, "n": self.gauge.n}
        if self.gauge.weights:
            cfg["weights"] = list(self.gauge.weights)
        if self.rate != 1.0:
            cfg["rate"] = self.rate
        return cfg


@dataclass(frozen=True)
class Tabulated2D:
    """Bilinear potential on the grid xs x ys (U[i, j] at (xs[i], ys[j])), +inf outside."""

    xs: tuple
    ys: tuple
    U: tuple = field(repr=False)

    structure = "tabulated2d"
    dim = 2

    @classmethod
    def from_arrays(cls, xs, ys, U) -> "Tabulated2D":
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        U = np.asarray(U, dtype=np.float64)
        if U.shape != (xs.size, ys.size):
            raise ValueError(f"potential grid shape {U.shape} != ({xs.size}, {ys.size})")
        if xs.size < 2 or ys.size < 2 or not (np.all(np.diff(xs) > 0) and np.all(np.diff(ys) > 0)):
            raise ValueError("grid axes must be strictly increasing with >= 2 nodes")
        if not np.all(np.isfinite(U)):
            raise ValueError("potential must be finite on the grid")
        model = cls(tuple(xs.tolist()), tuple(ys.tolist()), tuple(map(tuple, U.tolist())))
        model._validate_convex()
        return model

    @cached_property
    def _xa(self):
        return np.asarray(self.xs)

    @cached_property
    def _ya(self):
        return np.asarray(self.ys)

    @cached_property
    def _Ua(self):
        return np.asarray(self.U)

    def _validate_convex(self):
        for row in self._Ua:
            if not _convex_pl(self._ya, row):
                raise ValueError("tabulated 2D potential is not convex along y")
        for col in self._Ua.T:
            if not _convex_pl(self._xa, col):
                raise ValueError("tabulated 2D potential is not convex along x")
        from .rng import uniform_block

        u = uniform_block(0, 0, 4000, 5)
        lo = np.array([self.xs[0], self.ys[0]])
        hi = np.array([self.xs[-1], self.ys[-1]])
        p = lo + (hi - lo) * u[:, 0:2]
        q = lo + (hi - lo) * u[:, 2:4]
        t = u[:, 4:5]
        mid = t * p + (1 - t) * q
        res = (t[:, 0] * self._raw(p) + (1 - t[:, 0]) * self._raw(q)) - self._raw(mid)
        if np.min(res) < -1e-9:
            raise ValueError("tabulated 2D potential (bilinear) is not convex")

    def _raw(self, pts) -> np.ndarray:
        """Bilinear interpolant of the stored (unnormalized) potential; +inf off the grid."""
        pts = np.asarray(pts, dtype=np.float64).reshape(-1, 2)
        xa, ya, Ua = self._xa, self._ya, self._Ua
        px, py = pts[:, 0], pts[:, 1]
        inside = (px >= xa[0]) & (px <= xa[-1]) & (py >= ya[0]) & (py <= ya[-1])
        i = np.clip(np.searchsorted(xa, px, side="right") - 1, 0, xa.size - 2)
        j = np.clip(np.searchsorted(ya, py, side="right") - 1, 0, ya.size - 2)
        tx = (px - xa[i]) / (xa[i + 1] - xa[i])
        ty = (py - ya[j]) / (ya[j + 1] - ya[j])
        val = ((1 - tx) * (1 - ty) * Ua[i, j] + tx * (1 - ty) * Ua[i + 1, j]
               + (1 - tx) * ty * Ua[i, j + 1] + tx * ty * Ua[i + 1, j + 1])
        return np.where(inside, val, np.inf)

    @cached_property
    def log_norm(self) -> float:
        from .tilt import tabulated2d_moments

        return tabulated2d_moments(self, 1.0, raw=True).log_mass

    def potential(self, x) -> np.ndarray:
        return self._raw(_as_points(x, 2)) + self.log_norm

    def in_support(self, x) -> np.ndarray:
        pts = _as_points(x, 2)
        return ((pts[:, 0] >= self.xs[0]) & (pts[:, 0] <= self.xs[-1])
                & (pts[:, 1] >= self.ys[0]) & (pts[:, 1] <= self.ys[-1]))

    @property
    def log_sup(self) -> float:
        # bilinear cells attain their extremes at corners
        return -(float(self._Ua.min()) + self.log_norm)

    @cached_property
    def mean(self) -> np.ndarray:
        from .tilt import tabulated2d_moments

        return tabulated2d_moments(self, 1.0).mean_xy

    @property
    def label(self) -> str:
        return f"tabulated2d[{len(self.xs)}x{len(self.ys)}]"

    def tilt(self, alpha: float) -> "Tabulated2D":
        if not alpha > 0:
            raise ValueError("alpha must be > 0")
        if alpha == 1.0:
            return self
        return Tabulated2D(self.xs, self.ys, tuple(map(tuple, (alpha * self._Ua).tolist())))

    def probe_box(self) -> np.ndarray:
        return np.array([[self.xs[0], self.xs[-1]], [self.ys[0], self.ys[-1]]])

    def to_config(self) -> dict:
        return {"structure": "tabulated2d", "x": list(self.xs), "y": list(self.ys),
                "U": [list(r) for r in self.U]}


DensityModel = Union[ProductModel, GaussianIso, HomogeneousModel, Tabulated2D]


def as_model(model) -> DensityModel:
    if isinstance(model, Density1D):
        return ProductModel((model,))
    return model


# ---------------------------------------------------------------------------
# operations


def log_density(model, x):
    """log f(x) for one point (returns float) or a stack of points (returns array)."""
    m = as_model(model)
    arr = np.asarray(x, dtype=np.float64)
    single = arr.ndim == 0 or (arr.ndim == 1 and (m.dim > 1 or arr.shape[0] == 1))
    if arr.ndim >= 1 and m.dim > 1 and arr.shape[-1] != m.dim:
        raise DimensionError(f"model has dimension {m.dim}, point has dimension {arr.shape[-1]}")
    if m.dim == 1 and arr.ndim == 2 and arr.shape[-1] != 1:
        raise DimensionError(f"model has dimension 1, point has dimension {arr.shape[-1]}")
    out = -np.asarray(m.potential(arr), dtype=np.float64)
    return float(out.reshape(-1)[0]) if single else out


@dataclass(frozen=True)
class ConcavityReport:
    min_residual: float
    pairs_used: int
    passed: bool


def check_log_concavity(model, probes: int = 1000, seed: int = 0) -> ConcavityReport:
    """Probe tU(x) + (1-t)U(y) - U(tx + (1-t)y) >= 0 on random in-support pairs."""
    from .rng import uniform_block

    if probes < 1:
        raise ValueError("probes must be >= 1")
    m = as_model(model)
    n = m.dim
    box = m.probe_box()
    u = uniform_block(seed, 0, probes, 2 * n + 1)
    lo, hi = box[:, 0], box[:, 1]
    p = lo + (hi - lo) * u[:, :n]
    q = lo + (hi - lo) * u[:, n:2 * n]
    t = u[:, 2 * n]
    Up = m.potential(p)
    Uq = m.potential(q)
    ok = m.in_support(p) & m.in_support(q) & np.isfinite(Up) & np.isfinite(Uq)
    mid = t[:, None] * p + (1 - t[:, None]) * q
    Um = m.potential(mid)
    with np.errstate(invalid="ignore"):
        res = t * Up + (1 - t) * Uq - Um
    res = res[ok]
    min_res = float(np.min(res)) if res.size else math.inf
    return ConcavityReport(min_res, int(res.size), bool(min_res >= -1e-9))


def normalizing_constant(description, lo: float = -math.inf, hi: float = math.inf,
                         rtol: float = 1e-12) -> float:
    """int exp(-U) for an unnormalized potential.

    ``description`` is a 1D callable potential on [lo, hi], a :class:`GaugeSpec`
    (integral of exp(-gauge) over R^n), a raw :class:`Tabulated2D` grid, or a
    :class:`Density1D` (the mass of its unnormalized potential).
    """
    if isinstance(description, GaugeSpec):
        return math.exp(description.log_integral)
    if isinstance(description, Tabulated2D):
        return math.exp(description.log_norm)
    if isinstance(description, Density1D):
        return math.exp(description.log_norm)
    return math.exp(_log_integral_1d(description, lo, hi, rtol))


def _golden_min(fn, a: float, b: float, tol: float = 1e-12) -> float:
    g = (math.sqrt(5) - 1) / 2
    c = b - g * (b - a)
    d = a + g * (b - a)
    fc, fd = fn(c), fn(d)
    while abs(b - a) > tol * (1 + abs(a) + abs(b)):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def _scalar(fn):
    def wrapped(s):
        v = float(np.asarray(fn(np.asarray([s], dtype=np.float64))).reshape(-1)[0])
        return v if not math.isnan(v) else math.inf
    return wrapped


def truncation_window(U, lo: float, hi: float, peak: float, depth: float = TAIL_DEPTH,
                      scale: float = 1.0):
    """Interval around ``peak`` outside which U exceeds U(peak) + depth (convex U)."""
    Us = _scalar(U)
    u0 = Us(peak)
    bounds = []
    for direction, limit in ((-1.0, lo), (1.0, hi)):
        step = scale
        while True:
            s = peak + direction * step
            if (direction < 0 and s <= limit) or (direction > 0 and s >= limit):
                bounds.append(limit)
                break
            if Us(s) - u0 > depth:
                bounds.append(s)
                break
            step *= 2.0
            if step > 1e300:
                raise QuadratureError("potential does not grow; density not integrable", math.nan, math.inf)
    return bounds[0], bounds[1]


def find_peak(U, lo: float, hi: float, guess: float = 0.0, scale: float = 1.0) -> float:
    """Minimizer of a convex potential on [lo, hi]."""
    Us = _scalar(U)
    a = max(lo, guess - scale) if math.isfinite(lo) else guess - scale
    b = min(hi, guess + scale) if math.isfinite(hi) else guess + scale
    step = scale
    while not (math.isfinite(lo) and a <= lo) and Us(a) <= Us(a + 1e-9 * step + 1e-300):
        step *= 2
        a = max(lo, a - step) if math.isfinite(lo) else a - step
    step = scale
    while not (math.isfinite(hi) and b >= hi) and Us(b) <= Us(b - 1e-9 * step - 1e-300):
        step *= 2
        b = min(hi, b + step) if math.isfinite(hi) else b + step
    return _golden_min(Us, a, b)


def _log_integral_1d(U, lo, hi, rtol) -> float:
    peak = find_peak(U, lo, hi, guess=0.0 if not math.isfinite(lo) else lo + 1.0)
    u0 = _scalar(U)(peak)
    a, b = truncation_window(U, lo, hi, peak)

    def fn(s):
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.exp(-(np.asarray(U(s), dtype=np.float64) - u0))
        return np.nan_to_num(v, nan=0.0)

    res = gk_integrate(fn, a, b, rtol=rtol, breakpoints=(peak,))
    return u0 + math.log(float(res.value[0]))


def decreasing_rearrangement_1d(d: Density1D, grid_size: int = 2001, depth: float = 40.0) -> Density1D:
    """Symmetric decreasing rearrangement of ``d`` as a tabulated density.

    Nodes sit on level sets: for potential levels u_j = U_min + depth * (j/N)^2 the
    half-width of {U <= u_j} is found by bisection on each side of the mode, so the
    output shares every sublevel-set length with the input.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    lo, hi = d.support
    mode = d.mode
    umin = float(d.potential(mode))
    U = d.potential

    # bracket: points on each side where U exceeds umin + depth (or the support ends)
    a_end, b_end = truncation_window(U, lo, hi, mode, depth=depth + 1.0,
                                     scale=max(1e-3, d.probe_interval()[1] - d.probe_interval()[0]) / 64)
    levels = umin + depth * (np.arange(grid_size) / (grid_size - 1)) ** 2

    def boundary(inner, outer):
        # last point between inner and outer (inner side) with U <= level
        a = np.full(levels.shape, inner, dtype=np.float64)
        b = np.full(levels.shape, outer, dtype=np.float64)
        for _ in range(200):
            mid = 0.5 * (a + b)
            below = U(mid) <= levels
            a = np.where(below, mid, a)
            b = np.where(below, b, mid)
        return a

    right = boundary(mode, b_end)
    left = boundary(mode, a_end)
    r = 0.5 * (right - left)

    keep = np.concatenate([[True], np.diff(r) > 1e-12 * (1 + r[1:])])
    r, levels = r[keep], levels[keep]
    if r[0] <= 0.0:
        x = np.concatenate([-r[:0:-1], r])
        Uo = np.concatenate([levels[:0:-1], levels])
    else:
        x = np.concatenate([-r[::-1], r])
        Uo = np.concatenate([levels[::-1], levels])
    return Density1D.tabulated(x, Uo - umin)


# ---------------------------------------------------------------------------
# config I/O


def read_potential_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Two-column CSV (x, U); a non-numeric first row is treated as a header."""
    xs, us = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                xv, uv = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if not xs:
                    continue
                raise ValueError(f"bad row in {path}: {row!r}")
            xs.append(xv)
            us.append(uv)
    return np.array(xs), np.array(us)


def density1d_from_config(cfg: dict, base_dir=None) -> Density1D:
    kind = cfg.get("kind")
    if kind == "gaussian":
        return Density1D.gaussian(cfg.get("mu", 0.0), cfg.get("sigma", 1.0))
    if kind == "exponential":
        return Density1D.exponential(cfg.get("rate", 1.0), cfg.get("loc", 0.0))
    if kind == "gamma":
        return Density1D.gamma(cfg["shape"], cfg.get("scale", 1.0), cfg.get("loc", 0.0))
    if kind == "uniform":
        return Density1D.uniform(cfg.get("a", 0.0), cfg.get("b", 1.0))
    if kind == "tabulated":
        if "csv" in cfg:
            import os

            path = cfg["csv"]
            if base_dir is not None and not os.path.isabs(path):
                path = os.path.join(base_dir, path)
            x, U = read_potential_csv(path)
        else:
            x, U = cfg["x"], cfg["U"]
        return Density1D.tabulated(x, U)
    raise ValueError(f"unknown 1D density kind {kind!r}")


def model_from_config(cfg: dict, base_dir=None) -> DensityModel:
    """Build a model from its declarative description (see README for the schema)."""
    structure = cfg.get("structure")
    if structure == "product":
        factors = []
        for f in cfg["factors"]:
            d = density1d_from_config(f, base_dir)
            factors.extend([d] * int(f.get("repeat", 1)))
        return ProductModel(tuple(factors))
    if structure == "gaussian_iso":
        return GaussianIso(int(cfg["n"]), float(cfg.get("sigma", 1.0)))
    if structure == "homogeneous":
        gauge = GaugeSpec(cfg["gauge"], int(cfg["n"]), tuple(cfg.get("weights", ())))
        return HomogeneousModel(gauge, float(cfg.get("rate", 1.0)))
    if structure == "tabulated2d":
        return Tabulated2D.from_arrays(cfg["x"], cfg["y"], cfg["U"])
    raise ValueError(f"unknown model structure {structure!r}")


def load_model(path) -> DensityModel:
    import os

    with open(path) as fh:
        cfg = json.load(fh)
    return model_from_config(cfg, base_dir=os.path.dirname(os.path.abspath(path)))
