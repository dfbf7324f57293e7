"""Select the capacity kernel implementation at import time.

Prefers the compiled extension; falls back to the vectorized numpy kernel.
Set HIERCAP_BACKEND=numpy (or =cython) to force a choice, e.g. for
benchmarking or debugging.
"""

from __future__ import annotations

import os

_requested = os.environ.get("HIERCAP_BACKEND", "").lower()

if _requested not in ("", "numpy", "cython"):
    raise ImportError(f"unknown HIERCAP_BACKEND value: {_requested!r}")

if _requested == "numpy":
    from ._fallback import integrand_nats

    BACKEND = "numpy"
else:
    try:
        from ._core import integrand_nats  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from ._fallback import integrand_nats  # type: ignore[no-redef]

        BACKEND = "numpy"

__all__ = ["integrand_nats", "BACKEND"]
