"""Kernel selection for the sketch builder's inner loops.

Two interchangeable implementations of the member-reassignment scans exist:
a compiled Cython extension (``_ckernels``) and a NumPy-vectorized fallback
(``_pykernels``).  Both use identical floating-point expressions, so results
are bit-for-bit equal; only speed differs.  Selection happens here, at import
time by default, overridable per call via the ``kernels=`` argument of
``build_sketch`` or the ``PDSKETCH_KERNELS`` environment variable.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _ckernels

    HAVE_COMPILED = True
except ImportError:
    _ckernels = None
    HAVE_COMPILED = False


def get_kernels(impl: str | None = None):
    """Resolve an implementation name to a kernel module.

    ``impl``: "auto" (compiled if available), "c", "py", or None to consult
    the PDSKETCH_KERNELS environment variable.
    """
    if impl is None:
        impl = os.environ.get("PDSKETCH_KERNELS", "auto")
    impl = impl.lower()
    if impl == "auto":
        return _ckernels if HAVE_COMPILED else _pykernels
    if impl in ("c", "compiled"):
        if not HAVE_COMPILED:
            raise ImportError("compiled kernels requested but the extension is not built")
        return _ckernels
    if impl in ("py", "python"):
        return _pykernels
    raise ValueError(f"unknown kernel implementation {impl!r}")


def active_name(module) -> str:
    return "c" if module is _ckernels else "py"
