"""Hot-loop kernels with a compiled core and a pure NumPy fallback.

The compiled extension is built from ``_ckernels.pyx`` at install time.  If
it is unavailable (source checkout without a build step, unsupported
platform), the NumPy implementations take over with identical semantics; the
two backends agree to floating-point roundoff and are compared by
``benchmarks/bench_kernels.py``.

``BACKEND`` reports which implementation is active: ``"c"`` or ``"numpy"``.
"""

try:
    from . import _ckernels as _impl

    BACKEND = "c"
except ImportError:  # pragma: no cover - depends on the build environment
    from . import _numpy as _impl

    BACKEND = "numpy"

rho_sq_table = _impl.rho_sq_table
rho_sq_scan = _impl.rho_sq_scan
corr_argmax = _impl.corr_argmax

__all__ = ["BACKEND", "rho_sq_table", "rho_sq_scan", "corr_argmax"]
