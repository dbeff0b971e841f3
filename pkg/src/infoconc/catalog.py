"""Named reference models used by the verification suite, the CLI and tests."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .density import (
    Density1D,
    GaugeSpec,
    GaussianIso,
    HomogeneousModel,
    ProductModel,
    Tabulated2D,
    UnsupportedError,
)

# families available in every dimension
SCALABLE = ("gaussian-iso", "exp-product", "uniform-box", "l1", "l2", "linf", "weighted-l1")
# families whose information content is an exact Gamma(n, 1) variable
HOMOGENEOUS = ("exp-product", "l1", "l2", "linf", "weighted-l1")


def _weights(n: int) -> tuple:
    return tuple(float(w) for w in np.linspace(0.5, 2.0, n)) if n > 1 else (1.5,)


def abs_tabulated(half_width: float = 40.0) -> Density1D:
    """exp(-|x|) on a 3-node grid; exact for the piecewise-linear engine."""
    return Density1D.tabulated([-half_width, 0.0, half_width], [half_width, 0.0, half_width])


def asymmetric_tabulated(half_width: float = 40.0) -> Density1D:
    """U(x) = x for x >= 0 and -3x for x < 0 (normalized by the engine)."""
    lo = half_width / 3.0
    return Density1D.tabulated([-lo, 0.0, half_width], [3.0 * lo, 0.0, half_width])


@lru_cache(maxsize=4)
def tabulated_2d(nodes: int = 41, half_width: float = 10.0) -> Tabulated2D:
    """Bilinear interpolation of |x| + y^2 / 2 on a square grid."""
    g = np.linspace(-half_width, half_width, nodes)
    return Tabulated2D.from_arrays(g, g, np.abs(g)[:, None] + 0.5 * g[None, :] ** 2)


def make(name: str, n: int = 1):
    """Build a catalog model by family name and dimension."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    if name == "gaussian-iso":
        return GaussianIso(n, 1.0)
    if name == "exp-product":
        return ProductModel((Density1D.exponential(1.0),) * n)
    if name == "uniform-box":
        return ProductModel((Density1D.uniform(0.0, 1.0),) * n)
    if name in ("l1", "l2", "linf"):
        return HomogeneousModel(GaugeSpec(name, n))
    if name == "weighted-l1":
        return HomogeneousModel(GaugeSpec("weighted-l1", n, _weights(n)))
    fixed = {
        "gamma2": (1, lambda: ProductModel((Density1D.gamma(2.0),))),
        "gamma3.5": (1, lambda: ProductModel((Density1D.gamma(3.5),))),
        "gaussian-shifted": (1, lambda: ProductModel((Density1D.gaussian(3.0, 0.5),))),
        "exponential7": (1, lambda: ProductModel((Density1D.exponential(7.0),))),
        "tabulated-abs": (1, lambda: ProductModel((abs_tabulated(),))),
        "tabulated-asym": (1, lambda: ProductModel((asymmetric_tabulated(),))),
        "tabulated2d": (2, tabulated_2d),
        "mixed-product": (2, lambda: ProductModel((Density1D.gamma(2.0), Density1D.gaussian(0.0, 2.0)))),
    }
    if name in fixed:
        dim, build = fixed[name]
        if n != dim:
            raise UnsupportedError(f"catalog model {name!r} exists only in dimension {dim}")
        return build()
    raise UnsupportedError(f"unknown catalog model {name!r}")


FIXED_DIM = {
    1: ("gamma2", "gamma3.5", "gaussian-shifted", "exponential7", "tabulated-abs", "tabulated-asym"),
    2: ("tabulated2d", "mixed-product"),
}


def names_for_dim(n: int) -> tuple:
    return SCALABLE + FIXED_DIM.get(n, ())


def catalog(dims=range(1, 11)) -> list[tuple[str, int, object]]:
    """(name, n, model) for every catalog entry over the requested dimensions."""
    return [(name, n, make(name, n)) for n in dims for name in names_for_dim(n)]
