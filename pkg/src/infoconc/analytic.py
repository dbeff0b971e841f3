"""Closed-form entropies, varentropies and tilt integrals for the catalog.

These are oracles: functions return ``None`` when no closed form is known
instead of falling back to quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy import stats
from scipy.special import digamma, gammaln, polygamma

from .density import (
    Density1D,
    GaussianIso,
    HomogeneousModel,
    ProductModel,
    UnsupportedError,
    as_model,
)


def _rate_r(u: float) -> float:
    from .bounds import rate_r

    return rate_r(u)


# -- per-factor closed forms -------------------------------------------------

def _entropy_1d(d: Density1D) -> Optional[float]:
    k, p = d.kind, d.params
    if k == "gaussian":
        return 0.5 * math.log(2 * math.pi * math.e * p[1] ** 2)
    if k == "exponential":
        return 1.0 - math.log(p[0])
    if k == "gamma":
        a, s = p[0], p[1]
        return a + math.log(s) + float(gammaln(a)) + (1.0 - a) * float(digamma(a))
    if k == "uniform":
        return math.log(p[1] - p[0])
    return None


def _varentropy_1d(d: Density1D) -> Optional[float]:
    k, p = d.kind, d.params
    if k == "gaussian":
        return 0.5
    if k == "exponential":
        return 1.0
    if k == "gamma":
        # Var(Z - (a-1) log Z) for Z ~ Gamma(a): a - 2(a-1) + (a-1)^2 trigamma(a)
        a = p[0]
        return 2.0 - a + (a - 1.0) ** 2 * float(polygamma(1, a))
    if k == "uniform":
        return 0.0
    return None


def _F_1d(d: Density1D, alpha: float) -> Optional[float]:
    k, p = d.kind, d.params
    if k == "gaussian":
        return 0.5 * (1 - alpha) * math.log(2 * math.pi * p[1] ** 2) - 0.5 * math.log(alpha)
    if k == "exponential":
        return (alpha - 1) * math.log(p[0]) - math.log(alpha)
    if k == "gamma":
        a, s = p[0], p[1]
        b = alpha * (a - 1) + 1
        return float(gammaln(b)) - b * math.log(alpha) - alpha * float(gammaln(a)) + (1 - alpha) * math.log(s)
    if k == "uniform":
        return (1 - alpha) * math.log(p[1] - p[0])
    return None


# -- public oracles -------------------------------------------------------------

def entropy_closed(model) -> Optional[float]:
    m = as_model(model)
    if isinstance(m, GaussianIso):
        return 0.5 * m.n * math.log(2 * math.pi * math.e * m.sigma**2)
    if isinstance(m, HomogeneousModel):
        return m.dim - m.dim * math.log(m.rate)
    if isinstance(m, ProductModel):
        parts = [_entropy_1d(f) for f in m.factors]
        return None if any(v is None for v in parts) else sum(parts)
    return None


def varentropy_closed(model) -> Optional[float]:
    m = as_model(model)
    if isinstance(m, GaussianIso):
        return 0.5 * m.n
    if isinstance(m, HomogeneousModel):
        return float(m.dim)
    if isinstance(m, ProductModel):
        parts = [_varentropy_1d(f) for f in m.factors]
        return None if any(v is None for v in parts) else sum(parts)
    return None


def F_closed(model, alpha: float) -> Optional[float]:
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    m = as_model(model)
    if isinstance(m, GaussianIso):
        return m.n * _F_1d(Density1D.gaussian(0.0, m.sigma), alpha)
    if isinstance(m, HomogeneousModel):
        return F_homogeneous(alpha, m.dim)
    if isinstance(m, ProductModel):
        parts = [_F_1d(f, alpha) for f in m.factors]
        return None if any(v is None for v in parts) else sum(parts)
    return None


@dataclass(frozen=True)
class GammaLaw:
    """Gamma(shape, scale) law; the distribution of the normalized gauge of X."""

    shape: float
    scale: float = 1.0

    @property
    def dist(self):
        return stats.gamma(self.shape, scale=self.scale)

    def pdf(self, t):
        return self.dist.pdf(t)

    def cdf(self, t):
        return self.dist.cdf(t)

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def second_moment(self) -> float:
        return self.shape * (self.shape + 1) * self.scale**2

    @property
    def var(self) -> float:
        return self.shape * self.scale**2


def homogeneous_info_law(n) -> GammaLaw:
    """Law of Y = c * gauge(X) under exp(-c * gauge): Gamma(n, 1).

    Accepts a dimension or a model; non-homogeneous models are unsupported.
    """
    if isinstance(n, (ProductModel, GaussianIso, Density1D)):
        m = as_model(n)
        if not (isinstance(m, ProductModel) and all(
                f.kind == "exponential" and f.params == (1.0, 0.0) for f in m.factors)):
            raise UnsupportedError(f"{m.label} is not a homogeneous model")
        n = m.dim
    elif isinstance(n, HomogeneousModel):
        if n.rate != 1.0:
            return GammaLaw(n.dim, 1.0 / n.rate)
        n = n.dim
    elif not isinstance(n, int) or isinstance(n, bool):
        raise UnsupportedError(f"no gauge law for {type(n).__name__}")
    if n < 1:
        raise ValueError("n must be a positive integer")
    return GammaLaw(float(n), 1.0)


def F_homogeneous(alpha: float, n: int) -> float:
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    return -n * math.log(alpha)


def mgf_exponential_star(beta: float, n: int) -> float:
    """E exp(beta (h~ - h)) for the product-exponential density on the positive orthant."""
    if beta >= 1:
        return math.inf
    return math.exp(n * _rate_r(-beta))


@dataclass(frozen=True)
class ClosedForm:
    entropy: Optional[float]
    varentropy: Optional[float]
    F: Optional[Callable[[float], Optional[float]]]
    info_law: Optional[GammaLaw]


def closed_form(model) -> ClosedForm:
    m = as_model(model)
    F = (lambda a: F_closed(m, a)) if F_closed(m, 1.0) is not None else None
    try:
        law = homogeneous_info_law(m)
    except UnsupportedError:
        law = None
    return ClosedForm(entropy_closed(m), varentropy_closed(m), F, law)
