"""Hot-loop dispatch: the compiled extension when importable, numpy otherwise.

Set ``TEMPGROWTH_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
if os.environ.get("TEMPGROWTH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _kernels_py

re_laurent = _impl.re_laurent
polyline_min_dist = _impl.polyline_min_dist
eta_invert = _impl.eta_invert

__all__ = ["BACKEND", "re_laurent", "polyline_min_dist", "eta_invert"]
