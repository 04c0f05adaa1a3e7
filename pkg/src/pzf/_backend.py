"""Select compiled kernels or the numpy fallback at import time.

``PZF_BACKEND=python`` forces the fallback; ``PZF_BACKEND=compiled`` makes a
missing extension an error.
"""
from __future__ import annotations

import os

from . import _fallback as fallback

_choice = os.environ.get("PZF_BACKEND", "auto").lower()

compiled = None
if _choice != "python":
    try:
        from . import _kernels as compiled  # type: ignore[no-redef]
    except ImportError:
        if _choice == "compiled":
            raise

kernels = compiled if compiled is not None else fallback
BACKEND = "compiled" if compiled is not None else "python"
