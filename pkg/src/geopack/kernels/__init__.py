"""Hot constraint kernels.

The compiled extension ``_fast`` is used when it imports; otherwise the numpy
implementation in ``_pure`` is used. Setting ``GEOPACK_PURE_PYTHON=1`` forces
the fallback.
"""

from __future__ import annotations

import os

from . import _pure

BACKEND = "python"
_impl = _pure

if os.environ.get("GEOPACK_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _fast
    except ImportError:  # extension not built
        pass
    else:
        _impl = _fast
        BACKEND = "cython"

minmax_eval = _impl.minmax_eval
circles_eval = _impl.circles_eval
hex_eval = _impl.hex_eval
al_merit = _impl.al_merit

__all__ = ["BACKEND", "al_merit", "circles_eval", "hex_eval", "minmax_eval"]
