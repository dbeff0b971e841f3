"""Pick the kernel implementation at import time.

The compiled extension is preferred; ``INFOCONC_BACKEND=python`` forces the
numpy fallback (useful for benchmarks and cross-checks).
"""

import os

from . import _kernels_py

python_kernels = _kernels_py

try:
    from . import _kernels as compiled_kernels
except ImportError:  # extension not built
    compiled_kernels = None

if os.environ.get("INFOCONC_BACKEND", "").lower() == "python" or compiled_kernels is None:
    kernels = _kernels_py
else:
    kernels = compiled_kernels

BACKEND = kernels.BACKEND
