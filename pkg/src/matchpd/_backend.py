"""Select the compiled kernels when available, else the pure-Python ones."""

import os

if os.environ.get("MATCHPD_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "compiled"
    except ImportError:  # extension not built
        from . import _pykernels as kernels
        BACKEND = "python"

L_MATCHED = kernels.L_MATCHED
NEXT_ITERATION = kernels.NEXT_ITERATION
DUAL_UNBOUNDED = kernels.DUAL_UNBOUNDED
