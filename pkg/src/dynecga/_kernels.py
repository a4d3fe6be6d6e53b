"""Kernel backend selection.

The compiled extension is preferred; set ``DYNECGA_PURE=1`` to force the
numpy fallback.
"""

import os

BACKEND = "python"

if not os.environ.get("DYNECGA_PURE"):
    try:
        from ._mdl_kernel import pair_clogc

        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._mdl_py import pair_clogc  # noqa: F811

from . import _mdl_py as python_backend

__all__ = ["BACKEND", "pair_clogc", "python_backend"]
