"""Hot kernels with a compiled (Cython) core and a numpy fallback.

The compiled module is used when it was built and importable; setting
``EVENPREC_PURE_PYTHON=1`` forces the fallback. ``BACKEND`` names the
active implementation.
"""
import os

from . import _pykernels

if os.environ.get("EVENPREC_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "python" if _impl is _pykernels else "cython"

classical_scores = _impl.classical_scores
wigner_laguerre = _impl.wigner_laguerre


def available_backends():
    """Map of backend name to kernel module for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        out["cython"] = _ckernels
    return out
