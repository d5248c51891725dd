"""Backend dispatch for the hot sign-refinement kernel.

The compiled extension is preferred when it imported cleanly; the pure-numpy
fallback is arithmetically identical.  Set ``ONEBITPREC_PURE_PY=1`` in the
environment (before import) to force the fallback.
"""

import os

from . import _greedy_py

_FORCE_PY = os.environ.get("ONEBITPREC_PURE_PY", "").lower() in ("1", "true", "yes")

BACKEND = "python"
_impl = _greedy_py
if not _FORCE_PY:
    try:
        from . import _greedy_cy as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

greedy_coordinate_pass = _impl.greedy_coordinate_pass


def get_backend(name: str):
    """Return a specific kernel implementation: 'python' or 'cython'."""
    if name == "python":
        return _greedy_py
    if name == "cython":
        from . import _greedy_cy

        return _greedy_cy
    raise ValueError(f"unknown kernel backend {name!r}")
