"""Hot-kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementations when
it is missing or when GPVORTEX_PURE_PYTHON is set to a non-empty value.
"""

import os

from . import _fallback

wrap_angle = _fallback.wrap_angle

if os.environ.get("GPVORTEX_PURE_PYTHON"):
    BACKEND = "python"
    solve_tridiag_many = _fallback.solve_tridiag_many
    plaquette_winding = _fallback.plaquette_winding
else:
    try:
        from . import _native
        BACKEND = "native"
        solve_tridiag_many = _native.solve_tridiag_many
        plaquette_winding = _native.plaquette_winding
    except ImportError:
        BACKEND = "python"
        solve_tridiag_many = _fallback.solve_tridiag_many
        plaquette_winding = _fallback.plaquette_winding

__all__ = ["BACKEND", "solve_tridiag_many", "plaquette_winding", "wrap_angle"]
