"""Hot numeric kernels with a numba and a pure-numpy implementation.

The active implementation follows ``TWISTLAB_BACKEND``; ``implementation``
returns either one explicitly (tests and the benchmark compare the two).
"""
from .._backend import BACKEND
from . import numpy_impl


def implementation(name=None):
    name = BACKEND if name is None else name
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        from . import numba_impl
        return numba_impl
    raise ValueError(f"unknown kernel backend {name!r}")


_active = implementation()

bessel_j_array = _active.bessel_j_array
bessel_ive_array = _active.bessel_ive_array
angular_spectrum = _active.angular_spectrum
heralded_amplitude = _active.heralded_amplitude

__all__ = [
    "BACKEND",
    "implementation",
    "bessel_j_array",
    "bessel_ive_array",
    "angular_spectrum",
    "heralded_amplitude",
]
