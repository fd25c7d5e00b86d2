"""Backend selector for the modular row-reduction kernel.

The compiled extension is preferred when it built; CRQUADRICS_PURE=1 forces
the numpy fallback (used by the benchmark and by tests comparing the two).
Exact results never depend on the backend: it only reduces rows mod p, and
the reconstruction layer verifies everything over Q afterwards.
"""

import os

from . import modred_py

if os.environ.get("CRQUADRICS_PURE"):
    _impl = modred_py
else:
    try:
        from . import _modred as _impl
    except ImportError:
        _impl = modred_py

BACKEND = _impl.NAME
DTYPE = _impl.DTYPE
max_prime = _impl.max_prime
reduce_row = _impl.reduce_row
outer_update = _impl.outer_update


def get_backend(name=None):
    """Return (module, label); name in {None, 'auto', 'numpy', 'cython'}."""
    if name in (None, "auto"):
        return _impl, BACKEND
    if name == "numpy":
        return modred_py, "numpy"
    if name == "cython":
        from . import _modred  # raises ImportError when not built

        return _modred, "cython"
    raise ValueError(f"unknown backend {name!r}")
