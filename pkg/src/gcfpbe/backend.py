"""Select the pair-scatter implementation at import time.

The compiled extension is preferred; the numpy fallback is used when the
extension was not built.  GCFPBE_BACKEND=numpy or =compiled forces a
choice (the latter raises if the extension is unavailable).  Both
implementations accumulate in the same fixed order, so a solver run is
bitwise independent of the backend.
"""

import os

from . import _pair_numpy

try:
    from . import _pair_scatter as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("GCFPBE_BACKEND", "").strip().lower()
if _forced == "numpy":
    _impl = _pair_numpy
    BACKEND = "numpy"
elif _forced == "compiled":
    if _compiled is None:
        raise ImportError("GCFPBE_BACKEND=compiled but the extension is not built")
    _impl = _compiled
    BACKEND = "compiled"
elif _compiled is not None:
    _impl = _compiled
    BACKEND = "compiled"
else:
    _impl = _pair_numpy
    BACKEND = "numpy"


def coag_pair_scatter(kp, pair_dd, wlo_dk, whi_dk, klo, khi, mass_w, ii, jj, xi, n_cells):
    return _impl.coag_pair_scatter(kp, pair_dd, wlo_dk, whi_dk, klo, khi,
                                   mass_w, ii, jj, xi, n_cells)


def available_backends():
    names = ["numpy"]
    if _compiled is not None:
        names.insert(0, "compiled")
    return names


def get_impl(name):
    if name == "numpy":
        return _pair_numpy
    if name == "compiled":
        if _compiled is None:
            raise ValueError("compiled backend not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
