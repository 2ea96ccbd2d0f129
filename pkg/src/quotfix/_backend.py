"""Select the compiled kernels when available, else the pure fallback.

Set QUOTFIX_PURE=1 to force the fallback (used by tests and benchmarks).
"""

from __future__ import annotations

import os

if os.environ.get("QUOTFIX_PURE"):
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _pure as _impl

        BACKEND = "pure"

gfp_rref = _impl.gfp_rref
label_components = _impl.label_components
grouped_min = _impl.grouped_min
merge_indices = _impl.merge_indices
merge_min = _impl.merge_min
supercover = _impl.supercover
