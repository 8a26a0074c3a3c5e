"""Centred square sampling grid shared by the field and hologram code."""
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class GridSpec:
    """n x n samples with pitch ``dx``; index (n/2, n/2) is the origin.

    ``dx`` is a length for real-space grids and a wavenumber [rad/m] for
    k-space grids.
    """

    n: int
    dx: float

    def __post_init__(self):
        n = self.n
        if isinstance(n, bool) or int(n) != n or n < 64 or (int(n) & (int(n) - 1)):
            raise GeometryError(f"grid n must be a power of two >= 64, got {n!r}")
        object.__setattr__(self, "n", int(n))
        if not (np.isfinite(self.dx) and self.dx > 0):
            raise GeometryError(f"grid pitch must be positive, got {self.dx!r}")
        object.__setattr__(self, "dx", float(self.dx))

    @property
    def half_width(self):
        """Distance from the origin to the first row/column."""
        return self.n // 2 * self.dx

    def coords(self):
        return (np.arange(self.n) - self.n // 2) * self.dx

    def mesh(self):
        """(X, Y) with X varying along axis 1 and Y along axis 0."""
        c = self.coords()
        return np.meshgrid(c, c)

    def polar(self):
        x, y = self.mesh()
        return np.hypot(x, y), np.arctan2(y, x)
