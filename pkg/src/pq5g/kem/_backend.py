"""Selects the ring-kernel implementation at import time.

The compiled extension is used when it was built; set ``PQ5G_PURE_PYTHON=1``
to force the pure-Python kernels.
"""

from __future__ import annotations

import os

from . import _pure

if os.environ.get("PQ5G_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pure
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]
    except ImportError:
        kernels = _pure

BACKEND = "python" if kernels is _pure else "compiled"


def available_backends() -> dict:
    found = {"python": _pure}
    try:
        from . import _kernels

        found["compiled"] = _kernels
    except ImportError:
        pass
    return found
