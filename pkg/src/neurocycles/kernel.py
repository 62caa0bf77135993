"""Integration-kernel selector.

Imports the compiled extension when it is available and falls back to the
pure-Python twin otherwise.  Both expose the same functions and constants;
``IMPLEMENTATION`` says which one is active.
"""

from __future__ import annotations

try:
    from . import _kernel as _impl  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on the build environment
    from . import _kernel_py as _impl

IMPLEMENTATION: str = _impl.IMPLEMENTATION

FIELD_MODEL: int = _impl.FIELD_MODEL
FIELD_LIENARD: int = _impl.FIELD_LIENARD
FIELD_LINEAR_CENTER: int = _impl.FIELD_LINEAR_CENTER

STATUS_OK: int = _impl.STATUS_OK
STATUS_CONVERGED: int = _impl.STATUS_CONVERGED
STATUS_TMAX: int = _impl.STATUS_TMAX
STATUS_UNDERFLOW: int = _impl.STATUS_UNDERFLOW

rhs_eval = _impl.rhs_eval
integrate_path = _impl.integrate_path
ray_return = _impl.ray_return
