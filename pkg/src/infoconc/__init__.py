"""Concentration of the information content -log f(X) for log-concave densities.

Quadrature engine for tilt curves, entropies and varentropies; closed-form
oracles; sharp MGF and tail bounds; exact samplers; verification suites.
"""

__version__ = "0.1.0"

from ._backend import BACKEND  # noqa: E402
from .density import (  # noqa: E402
    Density1D,
    DimensionError,
    GaugeSpec,
    GaussianIso,
    HomogeneousModel,
    ProductModel,
    Tabulated2D,
    UnsupportedError,
    check_log_concavity,
    decreasing_rearrangement_1d,
    load_model,
    log_density,
    model_from_config,
    normalizing_constant,
)
from .tilt import (  # noqa: E402
    F_derivatives,
    compute_F,
    compute_tilt_curve,
    entropy_quad,
    log_G_concavity,
    tilted_density,
    varentropy_quad,
)

__all__ = [
    "BACKEND", "Density1D", "DimensionError", "GaugeSpec", "GaussianIso", "HomogeneousModel",
    "ProductModel", "Tabulated2D", "UnsupportedError", "check_log_concavity",
    "decreasing_rearrangement_1d", "load_model", "log_density", "model_from_config",
    "normalizing_constant", "F_derivatives", "compute_F", "compute_tilt_curve", "entropy_quad",
    "log_G_concavity", "tilted_density", "varentropy_quad", "__version__",
]
