"""Rate function, Legendre conjugation and the tail / MGF bounds built on them.

Extended reals are plain floats with ``math.inf`` for +infinity; the rate
function is +inf on u <= -1 and bound values inherit that through exp(-inf) = 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .density import as_model
from .tilt import entropy_quad

_SERIES_CUT = 0.1


def _r_scalar(u: float) -> float:
    if not u > -1.0:
        return math.inf
    if abs(u) < _SERIES_CUT:
        # u - log(1+u) = sum_{k>=2} (-1)^k u^k / k
        s = 0.0
        p = u * u
        for k in range(2, 40):
            s += p / k if k % 2 == 0 else -p / k
            p *= u
        return s
    return u - math.log1p(u)


def rate_r(u):
    """r(u) = u - log(1 + u) on (-1, inf), +inf elsewhere; vectorized over arrays."""
    if np.ndim(u) == 0:
        return _r_scalar(float(u))
    arr = np.asarray(u, dtype=np.float64)
    return np.array([_r_scalar(v) for v in arr.ravel()]).reshape(arr.shape)


@dataclass(frozen=True)
class RateEval:
    u: float
    r: float
    conjugate_at: float | None = None
    conjugate: float | None = None


@dataclass(frozen=True)
class LegendreResult:
    value: float
    argmax: float
    unbounded: bool


_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def legendre_numeric(phi, t: float, bracket: tuple[float, float] = (-1.0 + 1e-12, 50.0),
                     xtol: float = 1e-10, limit: float = 1e15) -> LegendreResult:
    """sup_x (t x - phi(x)) for convex ``phi`` by bracketing plus golden-section search.

    ``phi`` may return +inf outside its domain.  The bracket is grown geometrically
    towards whichever end still increases the objective; if the growth runs past
    ``limit`` the supremum is reported as +inf.
    """
    def g(x: float) -> float:
        v = phi(x)
        if v == math.inf:
            return -math.inf
        return t * x - v

    lo, hi = bracket
    glo, ghi = g(lo), g(hi)

    # concavity: once g stops increasing past an end, the maximiser is inside
    # [lo - step_lo, hi + step_hi]
    step_hi = max(1.0, hi - lo)
    while True:
        gp = g(hi + step_hi)
        if not gp > ghi:
            break
        hi, ghi = hi + step_hi, gp
        step_hi *= 2.0
        if hi > limit:
            return LegendreResult(math.inf, math.inf, True)
    step_lo = max(1.0, hi - lo)
    while True:
        gp = g(lo - step_lo)
        if not gp > glo:
            break
        lo, glo = lo - step_lo, gp
        step_lo *= 2.0
        if lo < -limit:
            return LegendreResult(math.inf, -math.inf, True)
    a = lo - step_lo if g(lo - step_lo) > -math.inf else lo
    b = hi + step_hi if g(hi + step_hi) > -math.inf else hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    gc, gd = g(c), g(d)
    while b - a > xtol * max(1.0, abs(a), abs(b)):
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _GOLD * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _GOLD * (b - a)
            gd = g(d)
    x = 0.5 * (a + b)
    return LegendreResult(g(x), x, False)


def rate_conjugate(t: float) -> RateEval:
    res = legendre_numeric(rate_r, t)
    return RateEval(u=-t, r=rate_r(-t), conjugate_at=t, conjugate=res.value)


def mgf_bound(K: float, beta: float) -> float:
    """exp(K r(-beta)); +inf for beta >= 1."""
    if K < 0:
        raise ValueError("K must be >= 0")
    if beta >= 1:
        return math.inf
    return math.exp(K * rate_r(-beta))


@dataclass(frozen=True)
class BoundReport:
    K: float
    t_or_beta: float
    bound: float
    corollary: str

    def to_dict(self) -> dict:
        return asdict(self)


def tail_bounds(K: float, t: float) -> tuple[float, float]:
    """(upper, lower) bounds on P{h~ - h >= t} and P{h~ - h <= -t}."""
    if not K > 0:
        raise ValueError("K must be > 0")
    if not t > 0:
        raise ValueError("t must be > 0")
    upper = math.exp(-K * rate_r(t / K))
    lower = math.exp(-K * rate_r(-t / K))
    return upper, lower


def dimensional_tail_bounds(n: int, tau: float) -> tuple[float, float]:
    """Bounds on P{h~ - h >= n tau} and P{h~ - h <= -n tau} with K = n."""
    return math.exp(-n * rate_r(tau)), math.exp(-n * rate_r(-tau))


def gaussian_sqnorm_tail(n: int, t: float) -> float:
    """Bound on P{|Z|^2 / n - 1 > t} for standard Gaussian Z in R^n."""
    if not t > 0:
        raise ValueError("t must be > 0")
    return math.exp(-0.5 * n * rate_r(t))


def weak_tail_comparison(n: int, tau: float, c: float = 1.0 / 16.0) -> float:
    """The older 2 exp(-c tau sqrt(n)) two-sided bound, for comparison curves."""
    return 2.0 * math.exp(-c * tau * math.sqrt(n))


@dataclass(frozen=True)
class EntropyBoundCheck:
    h: float
    bound: float
    slack: float


def max_entropy_check(model) -> EntropyBoundCheck:
    """h(X) <= -log ||f||_inf + n."""
    m = as_model(model)
    h = entropy_quad(m)
    bound = -m.log_sup + m.dim
    return EntropyBoundCheck(h, bound, bound - h)


@dataclass(frozen=True)
class ModeMeanCheck:
    """||f||_inf <= e^n f(E X), compared on the log scale."""

    log_lhs: float
    log_rhs: float

    @property
    def lhs(self) -> float:
        return math.exp(self.log_lhs)

    @property
    def rhs(self) -> float:
        return math.exp(self.log_rhs)

    @property
    def slack(self) -> float:
        return self.log_rhs - self.log_lhs

    @property
    def passed(self) -> bool:
        # ||f|| <= e^n f(EX) (1 + 1e-9)
        return self.slack >= -math.log1p(1e-9)


def mode_mean_check(model) -> ModeMeanCheck:
    m = as_model(model)
    mean = np.atleast_1d(m.mean).reshape(1, -1)
    log_f_mean = -float(np.asarray(m.potential(mean)).reshape(-1)[0])
    if log_f_mean == -math.inf:
        raise ArithmeticError(f"f(E X) = 0 for {m.label}; model is not log-concave")
    return ModeMeanCheck(m.log_sup, m.dim + log_f_mean)


def small_ball_bound(n: int, c: float) -> float:
    """Lower bound 1 - (e c log(1/c))**n on P{f(X) >= c**n ||f||_inf}."""
    if not 0 < c < 1 / math.e:
        raise ValueError("c must lie in (0, 1/e)")
    return 1.0 - (math.e * c * math.log(1.0 / c)) ** n


def bound_sweep(K: float, ts=(), betas=(), compare_n: int | None = None) -> list[BoundReport]:
    out = []
    for t in ts:
        up, lo = tail_bounds(K, t)
        out.append(BoundReport(K, t, up, "upper_tail"))
        out.append(BoundReport(K, t, lo, "lower_tail"))
        if compare_n is not None:
            out.append(BoundReport(K, t, weak_tail_comparison(compare_n, t / compare_n), "weak_two_sided"))
    for b in betas:
        out.append(BoundReport(K, b, mgf_bound(K, b), "mgf"))
    return out


def sweep_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["K", "t_or_beta", "bound", "corollary"])
    for r in reports:
        w.writerow([repr(float(r.K)), repr(float(r.t_or_beta)), repr(float(r.bound)), r.corollary])
    return buf.getvalue()


def sweep_to_json(reports) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)
