"""Backend selection: compiled kernel if available, NumPy fallback otherwise.

Set ``HGKIT_FORCE_NUMPY=1`` to skip the compiled extension (used by the
benchmark and by the backend-equivalence tests).
"""

import os

if os.environ.get("HGKIT_FORCE_NUMPY"):
    from . import _kernels_np as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_np as _impl

BACKEND = _impl.BACKEND
COMPILED = BACKEND == "cython"
COMPONENTS = _impl.COMPONENTS
penalty_components = _impl.penalty_components
