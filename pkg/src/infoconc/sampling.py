"""Exact Monte Carlo draws from catalog densities and estimators for the
distribution of the information content -log f(X).

All draws are transforms of counter-based uniforms (see ``rng``): chunk ``j``
of a batch always consumes stream ``j``, so batches are bit-identical for any
worker count.
"""

from __future__ import annotations

import io
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import gammaincinv, ndtri

from ._backend import kernels
from .density import (
    Density1D,
    GaussianIso,
    HomogeneousModel,
    ProductModel,
    Tabulated2D,
    UnsupportedError,
    as_model,
)
from .rng import CHUNK_ROWS, DEFAULT_SEED, map_chunks, uniform_block

ICB_MAGIC = b"ICB1"
ICB_VERSION = 1
_ICB_HEADER = struct.Struct("<4sIQQ")

# extra rejection rounds for the 2D sampler live in their own stream range
_ROUND_STRIDE = 1 << 32
_REJECT_BUDGET = 8
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SampleBatch:
    model_id: str
    m: int
    seed: int
    values: np.ndarray = field(repr=False)
    points: Optional[np.ndarray] = field(default=None, repr=False)

    def to_csv(self) -> str:
        return "".join(f"{v!r}\n" for v in self.values.tolist())

    def to_bytes(self) -> bytes:
        head = _ICB_HEADER.pack(ICB_MAGIC, ICB_VERSION, self.m, self.seed)
        return head + np.ascontiguousarray(self.values, dtype="<f8").tobytes()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    def write_icb(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())


def read_icb(path_or_bytes, model_id: str = "unknown") -> SampleBatch:
    raw = path_or_bytes if isinstance(path_or_bytes, (bytes, bytearray)) else Path(path_or_bytes).read_bytes()
    if len(raw) < _ICB_HEADER.size:
        raise ValueError("truncated ICB1 header")
    magic, version, m, seed = _ICB_HEADER.unpack_from(raw)
    if magic != ICB_MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != ICB_VERSION:
        raise ValueError(f"unsupported ICB1 version {version}")
    body = raw[_ICB_HEADER.size:]
    if len(body) != 8 * m:
        raise ValueError(f"expected {m} values, found {len(body) / 8:g}")
    values = np.frombuffer(body, dtype="<f8").astype(np.float64)
    return SampleBatch(model_id, m, seed, values)


def read_csv(path, model_id: str = "unknown", seed: int = 0) -> SampleBatch:
    values = np.loadtxt(io.StringIO(Path(path).read_text()), dtype=np.float64, ndmin=1)
    return SampleBatch(model_id, values.size, seed, values)


@dataclass(frozen=True)
class EstimateCI:
    estimate: float
    se: float
    level: float = 0.95
    heavy_tail: bool = False

    @property
    def interval(self) -> tuple[float, float]:
        from scipy.stats import norm

        z = float(norm.ppf(0.5 + self.level / 2)) if self.level != 0.95 else _Z95
        return self.estimate - z * self.se, self.estimate + z * self.se


# ---------------------------------------------------------------------------
# per-family transforms


@lru_cache(maxsize=256)
def _inverse_table(d: Density1D, alpha: float = 1.0):
    """Segment masses for inverse-CDF sampling of the tabulated density d**alpha."""
    xa, Ua = d._xa, d._Ua
    shift = float(Ua.min())
    w0, _, _ = kernels.pl_weights(xa, Ua, alpha, shift)
    cum = np.concatenate([[0.0], np.cumsum(w0)])
    return xa, Ua, shift, cum


def _factor_draw(d: Density1D, u: np.ndarray) -> np.ndarray:
    k, p = d.kind, d.params
    if k == "gaussian":
        return p[0] + p[1] * ndtri(u)
    if k == "exponential":
        return p[1] - np.log(u) / p[0]
    if k == "gamma":
        return p[2] + p[1] * gammaincinv(p[0], u)
    if k == "uniform":
        return p[0] + (p[1] - p[0]) * u
    if k == "tabulated":
        xa, Ua, shift, cum = _inverse_table(d)
        return kernels.pl_inverse_cdf(xa, Ua, 1.0, shift, cum, np.ascontiguousarray(u))
    raise UnsupportedError(f"no sampler for factor kind {k!r}")


def _direction(gauge, u: np.ndarray) -> np.ndarray:
    """Points on {gauge = 1} distributed by cone measure, from rows of uniforms."""
    n = gauge.n
    if gauge.kind == "l2":
        z = ndtri(u)
        return z / np.linalg.norm(z, axis=1, keepdims=True)
    if gauge.kind in ("l1", "weighted-l1"):
        e = -np.log(u[:, :n])
        sign = np.where(u[:, n:] < 0.5, -1.0, 1.0)
        theta = sign * e / e.sum(axis=1, keepdims=True)
        if gauge.kind == "weighted-l1":
            theta = theta / np.asarray(gauge.weights)
        return theta
    if gauge.kind == "linf":
        rows = np.arange(u.shape[0])
        face = np.minimum((u[:, 0] * 2 * n).astype(np.int64), 2 * n - 1)
        axis, sign = face // 2, np.where(face % 2 == 0, 1.0, -1.0)
        if n == 1:
            return sign[:, None]
        # free coordinates are uniform on [-1, 1] and fill the slots other than the face axis
        rest = 2.0 * u[:, 1:] - 1.0
        cols = np.arange(n)[None, :]
        theta = rest[rows[:, None], np.clip(cols - (cols > axis[:, None]), 0, n - 2)]
        theta[rows, axis] = sign
        return theta
    raise UnsupportedError(f"no cone-measure sampler for gauge {gauge.kind!r}")


def _direction_width(gauge) -> int:
    return 2 * gauge.n if gauge.kind in ("l1", "weighted-l1") else gauge.n


def row_width(model) -> int:
    """Uniforms consumed per draw (2D rejection draws use extra rounds on top)."""
    m = as_model(model)
    if isinstance(m, (ProductModel, GaussianIso)):
        return m.dim
    if isinstance(m, HomogeneousModel):
        return 1 + _direction_width(m.gauge)
    if isinstance(m, Tabulated2D):
        return 1 + 3 * _REJECT_BUDGET
    raise UnsupportedError(f"no sampler for {type(m).__name__}")


def _transform(m, u: np.ndarray) -> np.ndarray:
    if isinstance(m, GaussianIso):
        return m.sigma * ndtri(u)
    if isinstance(m, ProductModel):
        out = np.empty_like(u)
        for j, f in enumerate(m.factors):
            out[:, j] = _factor_draw(f, u[:, j])
        return out
    if isinstance(m, HomogeneousModel):
        # Y = rate * c * gauge(X) ~ Gamma(n, 1); X = Y * theta / (rate * c)
        y = gammaincinv(float(m.dim), u[:, 0])
        theta = _direction(m.gauge, u[:, 1:])
        return theta * (y / (m.rate * m.c))[:, None]
    raise UnsupportedError(f"no sampler for {type(m).__name__}")


@lru_cache(maxsize=32)
def _cell_table(model: Tabulated2D):
    from .tilt import tabulated2d_cell_masses

    masses = tabulated2d_cell_masses(model)
    cum = np.concatenate([[0.0], np.cumsum(masses.reshape(-1))])
    cum /= cum[-1]
    Ua = model._Ua
    corners = np.stack([Ua[:-1, :-1], Ua[1:, :-1], Ua[:-1, 1:], Ua[1:, 1:]])
    return cum, corners.min(axis=0).reshape(-1), masses.shape


def _tab2d_chunk(model: Tabulated2D, seed: int, stream: int, rows: int) -> np.ndarray:
    """Cell by exact mass, then uniform-in-cell proposals accepted w.p. exp(-(U - U_cell_min))."""
    cum, cell_min, (ncx, ncy) = _cell_table(model)
    xa, ya = model._xa, model._ya
    u = uniform_block(seed, stream, rows, row_width(model))
    cell = np.clip(np.searchsorted(cum, u[:, 0], side="right") - 1, 0, ncx * ncy - 1)
    out = np.full((rows, 2), np.nan)
    pending = np.arange(rows)
    block = u[:, 1:]            # aligned with ``pending``
    rnd = 0
    while True:
        for b in range(_REJECT_BUDGET):
            trio = block[:, 3 * b:3 * b + 3]
            c = cell[pending]
            i, j = c // ncy, c % ncy
            px = xa[i] + (xa[i + 1] - xa[i]) * trio[:, 0]
            py = ya[j] + (ya[j + 1] - ya[j]) * trio[:, 1]
            U = model._raw(np.column_stack([px, py]))
            ok = trio[:, 2] <= np.exp(-(U - cell_min[c]))
            out[pending[ok]] = np.column_stack([px[ok], py[ok]])
            pending, block = pending[~ok], block[~ok]
            if not pending.size:
                return out
        rnd += 1
        # leftovers draw fresh blocks, in row order, from a dedicated stream
        block = uniform_block(seed, stream + rnd * _ROUND_STRIDE, pending.size, 3 * _REJECT_BUDGET)


def _point_chunks(mdl, seed: int):
    width = row_width(mdl)

    def chunk(stream, start, rows):
        if isinstance(mdl, Tabulated2D):
            return _tab2d_chunk(mdl, seed, stream, rows)
        return _transform(mdl, uniform_block(seed, stream, rows, width))

    return chunk


def _check_args(m: int, seed: int) -> None:
    if m < 1:
        raise ValueError("m must be >= 1")
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")


def draw_points(model, m: int, seed: int = DEFAULT_SEED, workers: int | None = None,
                chunk_rows: int = CHUNK_ROWS) -> np.ndarray:
    """m exact draws from ``model`` as an (m, n) array."""
    mdl = as_model(model)
    _check_args(m, seed)
    return np.concatenate(map_chunks(_point_chunks(mdl, seed), m, chunk_rows, workers), axis=0)


def sample(model, m: int, seed: int = DEFAULT_SEED, keep_points: bool = False,
           workers: int | None = None, chunk_rows: int = CHUNK_ROWS) -> SampleBatch:
    """Draw m points and record their information content -log f(X_i)."""
    mdl = as_model(model)
    _check_args(m, seed)
    draw = _point_chunks(mdl, seed)

    def chunk(stream, start, rows):
        pts = draw(stream, start, rows)
        return pts, np.asarray(mdl.potential(pts), dtype=np.float64).reshape(-1)

    parts = map_chunks(chunk, m, chunk_rows, workers)
    values = np.concatenate([p[1] for p in parts])
    if not np.all(np.isfinite(values)):
        raise ArithmeticError(f"{mdl.label}: sampler produced points off the support")
    points = np.concatenate([p[0] for p in parts], axis=0) if keep_points else None
    return SampleBatch(mdl.label, m, seed, values, points)


# ---------------------------------------------------------------------------
# estimators


def _mean(values: np.ndarray) -> float:
    if values.size and values.min() == values.max():
        return float(values[0])
    return math.fsum(values.tolist()) / values.size


def estimate_entropy_varentropy(batch: SampleBatch) -> dict:
    v = batch.values
    m = v.size
    if m < 30:
        raise ValueError("need at least 30 samples")
    mu = _mean(v)
    c = v - mu
    c2 = c * c
    s2 = float(c2.sum()) / (m - 1)
    mu4 = float(np.mean(c2 * c2))
    sigma2 = float(c2.mean())
    h = EstimateCI(mu, math.sqrt(s2 / m))
    # Var(s^2) ~ (mu4 - (m-3)/(m-1) sigma^4) / m
    var_s2 = max(mu4 - (m - 3) / (m - 1) * sigma2 * sigma2, 0.0) / m
    return {"h": h, "V": EstimateCI(s2, math.sqrt(var_s2))}


def _heavy(z: np.ndarray) -> bool:
    total = float(z.sum())
    if total <= 0:
        return False
    k = max(1, math.ceil(z.size / 1000))
    top = np.partition(z, z.size - k)[z.size - k:]
    return float(top.sum()) > 0.1 * total


def empirical_mgf(batch: SampleBatch, h_ref: float, beta: float) -> EstimateCI:
    """Mean of exp(beta (h~_i - h_ref)); beta >= 1 is outside the domain."""
    if not beta < 1:
        raise ValueError("beta must be < 1")
    z = np.exp(beta * (batch.values - h_ref))
    m = z.size
    est = _mean(z)
    se = float(np.std(z, ddof=1)) / math.sqrt(m) if m > 1 else 0.0
    return EstimateCI(est, se, heavy_tail=_heavy(z))


def _frequency(hits: np.ndarray) -> EstimateCI:
    m = hits.size
    p = float(np.count_nonzero(hits)) / m
    return EstimateCI(p, math.sqrt(p * (1 - p) / m))


def empirical_tail(batch: SampleBatch, h_ref: float, t: float, side: str = "upper") -> EstimateCI:
    """Frequency of {h~ - h_ref >= t} (upper) or {h~ - h_ref <= -t} (lower)."""
    if not t > 0:
        raise ValueError("t must be > 0")
    d = batch.values - h_ref
    if side == "upper":
        return _frequency(d >= t)
    if side == "lower":
        return _frequency(d <= -t)
    raise ValueError("side must be 'upper' or 'lower'")


def empirical_small_ball(batch: SampleBatch, log_sup: float, n: int, c: float) -> EstimateCI:
    """Frequency of {f(X) >= c**n ||f||_inf}."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    return _frequency(-batch.values >= n * math.log(c) + log_sup)


def gauge_values(model, points: np.ndarray) -> np.ndarray:
    """phi(X): the normalized degree-1 potential of a homogeneous model.

    For products of unit exponentials this is the coordinate sum.
    """
    mdl = as_model(model)
    if isinstance(mdl, HomogeneousModel):
        return mdl.rate * mdl.scaled_gauge(points)
    if isinstance(mdl, ProductModel) and all(
            f.kind == "exponential" and f.params == (1.0, 0.0) for f in mdl.factors):
        return np.asarray(points).sum(axis=1)
    raise UnsupportedError(f"{mdl.label} has no degree-1 homogeneous potential")
