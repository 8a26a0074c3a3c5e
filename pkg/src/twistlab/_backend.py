"""Kernel backend selection.

``TWISTLAB_BACKEND`` picks the implementation of the hot loops: ``numba``
(default, JIT-compiled) or ``numpy`` (vectorised fallback, no compiler).
``TWISTLAB_THREADS`` caps the number of numba worker threads.
"""
import os
import warnings

# numba's default TBB layer warns when the tbb package is too old; the OpenMP
# layer is always available in manylinux wheels.
os.environ.setdefault("NUMBA_THREADING_LAYER", "omp")

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

_requested = os.environ.get("TWISTLAB_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    warnings.warn(f"unknown TWISTLAB_BACKEND={_requested!r}, using numpy")
    _requested = "numpy"
if _requested == "numba" and numba is None:  # pragma: no cover
    warnings.warn("numba is not installed - falling back to numpy kernels")
    _requested = "numpy"

BACKEND = _requested
HAS_NUMBA = numba is not None


def thread_cap():
    """Worker cap from ``TWISTLAB_THREADS`` (None when unset)."""
    raw = os.environ.get("TWISTLAB_THREADS")
    if raw is None or raw.strip() == "":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"TWISTLAB_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"TWISTLAB_THREADS must be a positive integer, got {raw!r}")
    return value


def apply_thread_cap():
    """Apply ``TWISTLAB_THREADS`` to numba's thread pool; returns threads in use."""
    cap = thread_cap()
    if numba is None:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    n = limit if cap is None else min(cap, limit)
    numba.set_num_threads(n)
    return n
