"""Sampled complex fields on centred square grids and the Fourier-optics
operations used to build the pump beams (spiral phase plate, axicon,
Fourier lens), plus radial intensity analysis.

Grid convention: sample (n/2, n/2) is the origin, so centred transforms are
``fftshift(fft(ifftshift(.)))``. For even n, fftshift and ifftshift are the
same permutation and the round trip is exact index reordering.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._grid import GridSpec
from .errors import AliasingError, GeometryError, PlaneError, ShapeError
from .modes import mode_extent, radial_amplitude

PLANES = ("real", "k")
RING_BINS = 512

__all__ = [
    "GridSpec", "SampledField", "IntensityMap", "sample", "to_kspace",
    "lens_fourier", "apply_spiral_phase", "apply_axicon", "radial_profile",
    "ring_radius", "profile_fwhm", "winding_number", "support_radius",
]


def _check_plane(plane):
    if plane not in PLANES:
        raise PlaneError(f"plane must be one of {PLANES}, got {plane!r}")


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex amplitude on ``grid``; power is sum |E|^2 * pitch^2.

    ``plane`` is "real" (pitch in m) or "k" (pitch in rad/m). The values
    array is stored read-only.
    """

    values: np.ndarray
    grid: GridSpec
    plane: str = "real"
    wavelength: Optional[float] = None

    def __post_init__(self):
        _check_plane(self.plane)
        vals = np.array(self.values, dtype=complex)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ShapeError(f"values must be {self.grid.n}x{self.grid.n}, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def pitch_k(self):
        return self.grid.dx if self.plane == "k" else None

    @property
    def power(self):
        v = self.values
        return float(np.sum(v.real ** 2 + v.imag ** 2)) * self.grid.dx ** 2

    def intensity(self):
        v = self.values
        return IntensityMap(v.real ** 2 + v.imag ** 2, self.grid, self.plane, self.wavelength)

    def replace_values(self, values):
        return SampledField(values, self.grid, self.plane, self.wavelength)


@dataclass(frozen=True, eq=False)
class IntensityMap:
    """Real non-negative intensity on ``grid`` (e.g. an angular spectrum)."""

    values: np.ndarray
    grid: GridSpec
    plane: str = "real"
    wavelength: Optional[float] = None

    def __post_init__(self):
        _check_plane(self.plane)
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n, self.grid.n):
            raise ShapeError(f"values must be {self.grid.n}x{self.grid.n}, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def intensity(self):
        return self


def sample(spec, grid, wavelength=None):
    """Render a mode on a real-space grid.

    The mode extent (ring radius, or waist for centre-bright modes) must fit
    inside a quarter of the grid width to keep wraparound negligible.
    """
    extent = mode_extent(spec)
    limit = grid.n * grid.dx / 4.0
    if extent > limit:
        raise GeometryError(
            f"mode extent {extent:.4g} m exceeds n*dx/4 = {limit:.4g} m; "
            f"use dx >= {4.0 * extent / grid.n:.4g} m or n >= {4.0 * extent / grid.dx:.0f}")
    x, y = grid.mesh()
    r2 = x * x + y * y
    uniq, inverse = np.unique(r2, return_inverse=True)
    radial = radial_amplitude(spec, np.sqrt(uniq))[inverse.reshape(r2.shape)]
    if spec.ell == 0:
        values = radial
    else:
        values = radial * np.exp(1j * spec.ell * np.arctan2(y, x))
    return SampledField(values, grid, "real", wavelength)


def _require_real(field):
    if field.plane != "real":
        raise PlaneError("operation needs a real-space field")


def to_kspace(field):
    """Unitary transverse Fourier transform, kernel exp(-i k.x)/(2 pi).

    Output pitch is 2 pi / (n dx) rad/m and power is preserved.
    """
    _require_real(field)
    g = field.grid
    spec = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(field.values)))
    spec *= g.dx * g.dx / (2.0 * math.pi)
    return SampledField(spec, GridSpec(g.n, 2.0 * math.pi / (g.n * g.dx)), "k",
                        field.wavelength)


def lens_fourier(field, f, wavelength):
    """Field in the back focal plane of a thin lens of focal length f.

    U(X) = 1/(i lambda f) sum E(x) exp(+i 2 pi x.X / (lambda f)) dx^2 on a
    grid of pitch lambda f / (n dx). This sign convention reproduces the
    i^(ell-1) prefactor of the analytic POV; applying it twice gives
    -E(-x, -y).
    """
    _require_real(field)
    if not (f > 0 and wavelength > 0):
        raise ValueError("focal length and wavelength must be positive")
    g = field.grid
    n = g.n
    out = np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(field.values)))
    out *= (n * n * g.dx * g.dx) / (1j * wavelength * f)
    return SampledField(out, GridSpec(n, wavelength * f / (n * g.dx)), "real", wavelength)


def apply_spiral_phase(field, ell):
    """Multiply by exp(i ell theta) (ideal spiral phase plate)."""
    _require_real(field)
    if int(ell) != ell:
        raise ValueError(f"ell must be an integer, got {ell!r}")
    if ell == 0:
        return field
    _, theta = field.grid.polar()
    return field.replace_values(field.values * np.exp(1j * int(ell) * theta))


def apply_axicon(field, k_r):
    """Multiply by exp(-i k_r r) (ideal thin axicon)."""
    _require_real(field)
    if k_r < 0:
        raise ValueError("k_r must be non-negative")
    if k_r * field.grid.dx >= math.pi:
        raise AliasingError(
            f"axicon phase undersampled: k_r*dx = {k_r * field.grid.dx:.3g} >= pi")
    if k_r == 0:
        return field
    r, _ = field.grid.polar()
    return field.replace_values(field.values * np.exp(-1j * k_r * r))


def radial_profile(field, n_bins=RING_BINS):
    """Azimuthally averaged intensity in ``n_bins`` equal bins over [0, n dx/2).

    Bins that contain no pixel centre (only possible near the axis) are
    filled by linear interpolation between their neighbours.
    """
    if n_bins < 64:
        raise ValueError("radial_profile needs n_bins >= 64")
    inten = field.intensity().values
    g = field.grid
    r, _ = g.polar()
    width = g.half_width / n_bins
    idx = np.floor(r / width).astype(np.int64).ravel()
    keep = idx < n_bins
    sums = np.bincount(idx[keep], weights=inten.ravel()[keep], minlength=n_bins)
    counts = np.bincount(idx[keep], minlength=n_bins)
    centers = (np.arange(n_bins) + 0.5) * width
    filled = counts > 0
    prof = np.zeros(n_bins)
    prof[filled] = sums[filled] / counts[filled]
    if not filled.all():
        prof[~filled] = np.interp(centers[~filled], centers[filled], prof[filled])
    return centers, prof


def ring_radius(field, n_bins=RING_BINS):
    """Radius of the brightest ring, refined by a 3-point parabola."""
    centers, prof = radial_profile(field, n_bins)
    i = int(np.argmax(prof))
    if i == 0:
        raise ShapeError("intensity peaks on the axis; the field has no ring")
    width = centers[1] - centers[0]
    if i == n_bins - 1:
        return float(centers[i])
    a, b, c = prof[i - 1], prof[i], prof[i + 1]
    denom = a - 2.0 * b + c
    shift = 0.0 if denom == 0 else 0.5 * (a - c) / denom
    return float(centers[i] + shift * width)


def profile_fwhm(radii, profile):
    """Full width at half maximum of a single-peaked radial profile.

    Crossings are linearly interpolated; a peak touching r = 0 counts its
    inner edge as r = 0.
    """
    radii = np.asarray(radii, dtype=float)
    profile = np.asarray(profile, dtype=float)
    i = int(np.argmax(profile))
    half = 0.5 * profile[i]
    lo = i
    while lo > 0 and profile[lo - 1] >= half:
        lo -= 1
    if lo == 0:
        left = radii[0]
    else:
        p0, p1 = profile[lo - 1], profile[lo]
        left = radii[lo - 1] + (half - p0) / (p1 - p0) * (radii[lo] - radii[lo - 1])
    hi = i
    while hi < len(profile) - 1 and profile[hi + 1] >= half:
        hi += 1
    if hi == len(profile) - 1:
        raise ShapeError("profile does not fall to half maximum inside the grid")
    p0, p1 = profile[hi], profile[hi + 1]
    right = radii[hi] + (p0 - half) / (p0 - p1) * (radii[hi + 1] - radii[hi])
    return float(right - left)


def winding_number(field, radius, samples=720):
    """Net phase winding (in units of 2 pi) along a circle about the origin.

    The field is bilinearly interpolated at ``samples`` points.
    """
    g = field.grid
    t = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    fx = radius * np.cos(t) / g.dx + g.n // 2
    fy = radius * np.sin(t) / g.dx + g.n // 2
    if fx.min() < 0 or fy.min() < 0 or fx.max() > g.n - 1 or fy.max() > g.n - 1:
        raise GeometryError("probe circle leaves the grid")
    i0 = np.minimum(fx.astype(int), g.n - 2)
    j0 = np.minimum(fy.astype(int), g.n - 2)
    tx = fx - i0
    ty = fy - j0
    v = field.values
    z = ((1 - tx) * (1 - ty) * v[j0, i0] + tx * (1 - ty) * v[j0, i0 + 1]
         + (1 - tx) * ty * v[j0 + 1, i0] + tx * ty * v[j0 + 1, i0 + 1])
    steps = np.angle(np.roll(z, -1) / z)
    return int(round(float(np.sum(steps)) / (2.0 * math.pi)))


def support_radius(field, rel=1e-12):
    """Largest |x| (or |k|) at which intensity exceeds ``rel`` times the peak."""
    inten = field.intensity().values
    r, _ = field.grid.polar()
    mask = inten > rel * inten.max()
    return float(r[mask].max()) if mask.any() else 0.0
