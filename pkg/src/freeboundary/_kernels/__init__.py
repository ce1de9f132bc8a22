"""Hot-loop kernels: the compiled ``_core`` extension when it is importable,
otherwise the numpy ``_fallback``. Set ``FREEBOUNDARY_PURE=1`` to force the
fallback; the compiled module stays reachable through ``BACKENDS``.
"""
import os

from . import _fallback

BACKENDS = {"python": _fallback}
try:
    from . import _core

    BACKENDS["cython"] = _core
except ImportError:
    pass

BACKEND = "cython" if "cython" in BACKENDS and not os.environ.get("FREEBOUNDARY_PURE") else "python"
_impl = BACKENDS[BACKEND]

pair_exponent_buckets = _impl.pair_exponent_buckets
quad_mismatch = _impl.quad_mismatch
quad_log_deviation = _impl.quad_log_deviation
triangle_candidates = _impl.triangle_candidates
