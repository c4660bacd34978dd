"""Backend selection for the hot Monte-Carlo kernels.

At import time, prefer the compiled Cython module; fall back to the pure
Python twin when the extension is unavailable.  Set FORESTCOLOR_PURE=1 to
force the fallback (used by the equivalence tests and the benchmark).
"""

import os

if os.environ.get("FORESTCOLOR_PURE") == "1":
    from . import _dm_fallback as backend

    COMPILED = False
else:
    try:
        from . import _dm_kernel as backend  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _dm_fallback as backend

        COMPILED = False

KernelForest = backend.KernelForest
KernelRng = backend.KernelRng


def backend_name() -> str:
    return "cython" if COMPILED else "pure-python"
