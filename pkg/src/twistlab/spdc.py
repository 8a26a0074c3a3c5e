"""Biphoton mode function of a thin chi(2) crystal and the signal angular
spectrum.

Phi(ks, ki) = E_p(ks + ki) * L * sinc(dk L / 2) * exp(i dk L / 2), where
E_p is the pump's transverse k-spectrum and dk the longitudinal mismatch.
All transverse wavevectors are 2-vectors in rad/m (last axis of size 2).
"""
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from ._grid import GridSpec
from .errors import DomainError, ExtentError, PlaneError, ResolutionError, SpecError
from .fieldgrid import IntensityMap, SampledField
from .specialfn import sinc

# sinc argument may change by at most this much between idler nodes
MAX_SINC_STEP = math.pi / 4.0
RING_MARGIN = 1.25
# pump nodes below this fraction of the peak |E_p|^2 are skipped
PUMP_WEIGHT_FLOOR = 1e-15


class MismatchModel(str, enum.Enum):
    EXACT = "exact"
    PARAXIAL = "paraxial"


@dataclass(frozen=True)
class CrystalSpec:
    """Crystal length [m], refractive indices and optional poling period [m]."""

    length: float
    n_p: float
    n_s: float
    n_i: float
    poling_period: Optional[float] = None
    mismatch: MismatchModel = MismatchModel.EXACT

    def __post_init__(self):
        if not (np.isfinite(self.length) and self.length > 0):
            raise SpecError(f"crystal length must be positive, got {self.length!r}")
        for name in ("n_p", "n_s", "n_i"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 1.0):
                raise SpecError(f"{name} must be >= 1, got {v!r}")
        if self.poling_period is not None and not (
                np.isfinite(self.poling_period) and self.poling_period > 0):
            raise SpecError(f"poling period must be positive, got {self.poling_period!r}")
        try:
            object.__setattr__(self, "mismatch", MismatchModel(self.mismatch))
        except ValueError:
            raise SpecError(f"unknown mismatch model {self.mismatch!r}") from None

    @property
    def grating(self):
        """Grating wavenumber 2 pi / Lambda (0 for an unpoled crystal)."""
        return 0.0 if self.poling_period is None else 2.0 * math.pi / self.poling_period


@dataclass(frozen=True)
class WavelengthTriple:
    """Vacuum wavelengths [m]; the idler defaults to energy conservation."""

    lambda_p: float
    lambda_s: float
    lambda_i: Optional[float] = None

    def __post_init__(self):
        if not (self.lambda_p > 0 and self.lambda_s > self.lambda_p):
            raise SpecError("need 0 < lambda_p < lambda_s")
        if self.lambda_i is None:
            object.__setattr__(self, "lambda_i", 1.0 / (1.0 / self.lambda_p - 1.0 / self.lambda_s))
        lhs = 1.0 / self.lambda_p
        rhs = 1.0 / self.lambda_s + 1.0 / self.lambda_i
        if abs(lhs - rhs) > 1e-9 * lhs:
            raise SpecError("wavelengths violate 1/lambda_p = 1/lambda_s + 1/lambda_i")

    @classmethod
    def degenerate(cls, lambda_p):
        return cls(lambda_p, 2.0 * lambda_p, 2.0 * lambda_p)

    @property
    def is_degenerate(self):
        return abs(self.lambda_s - self.lambda_i) <= 1e-12 * self.lambda_s


def kz(k, k_perp):
    """Longitudinal wavenumber sqrt(k^2 - |k_perp|^2) of a propagating wave."""
    kp = np.asarray(k_perp, dtype=float)
    q2 = kp[..., 0] ** 2 + kp[..., 1] ** 2
    if np.any(q2 >= k * k):
        raise DomainError("evanescent wave: |k_perp| >= k")
    out = np.sqrt(k * k - q2)
    return out if out.ndim else float(out)


class PhaseMatching:
    """Wavenumbers and longitudinal mismatch for a crystal and wavelengths."""

    def __init__(self, crystal, wavelengths):
        self.crystal = crystal
        self.wavelengths = wavelengths
        self.k_p = 2.0 * math.pi * crystal.n_p / wavelengths.lambda_p
        self.k_s = 2.0 * math.pi * crystal.n_s / wavelengths.lambda_s
        self.k_i = 2.0 * math.pi * crystal.n_i / wavelengths.lambda_i
        self.grating = crystal.grating
        self.paraxial = crystal.mismatch is MismatchModel.PARAXIAL

    def delta_k(self, ks_perp, ki_perp):
        """Longitudinal phase mismatch dk [rad/m].

        Exact: kz_p(ks+ki) - kz_s(ks) - kz_i(ki) - 2 pi/Lambda.
        Paraxial: (k_p - k_s - k_i) + |ks - ki|^2 / (2 k_p) - 2 pi/Lambda,
        i.e. the textbook paraxial form plus the collinear mismatch it
        assumes to vanish.
        """
        ks = np.asarray(ks_perp, dtype=float)
        ki = np.asarray(ki_perp, dtype=float)
        if self.paraxial:
            d = ks - ki
            out = ((self.k_p - self.k_s - self.k_i - self.grating)
                   + (d[..., 0] ** 2 + d[..., 1] ** 2) / (2.0 * self.k_p))
        else:
            out = (np.asarray(kz(self.k_p, ks + ki)) - kz(self.k_s, ks) - kz(self.k_i, ki)
                   - self.grating)
        return out if np.ndim(out) else float(out)

    def ring_radius(self):
        """|ks| of the phase-matching ring for a plane-wave pump (None if no ring).

        Solves dk(q, -q k_i/k_s) = 0: signal and idler leave at equal and
        opposite angles, which for degenerate photons means zero net
        transverse momentum.
        """
        ratio = self.k_i / self.k_s
        qmax = self.k_s * (1.0 - 1e-9)

        def f(q):
            return self.delta_k(np.array([q, 0.0]), np.array([-q * ratio, 0.0]))

        f0 = f(0.0)
        if f0 >= 0.0:
            return None
        # dk grows monotonically with q from its negative collinear value
        qs = np.linspace(0.0, qmax, 2049)[1:]
        vals = np.array([f(q) for q in qs])
        hit = np.nonzero(vals > 0)[0]
        if hit.size == 0:
            return None
        j = hit[0]
        lo = 0.0 if j == 0 else qs[j - 1]
        return brentq(f, lo, qs[j], xtol=1e-12 * qs[j], rtol=1e-15)


def collinear_poling_period(crystal, wavelengths):
    """Lambda that cancels the collinear mismatch: 2 pi / (k_p - k_s - k_i)."""
    m = PhaseMatching(crystal, wavelengths)
    diff = m.k_p - m.k_s - m.k_i
    if diff <= 0:
        raise DomainError("k_p <= k_s + k_i: quasi-phase-matching needs k_p > k_s + k_i")
    return 2.0 * math.pi / diff


def bbo_like(length=5e-3, lambda_p=405e-9, half_angle_deg=3.0, mismatch="exact"):
    """Unpoled, degenerate, non-collinear preset with a ring at ``half_angle_deg``.

    n_s = n_i = 1.66 and n_p = n_s cos(half angle) so that
    k_p = 2 k_s cos(angle) is matched by opposite signal/idler emission.
    """
    n = 1.66
    crystal = CrystalSpec(length, n * math.cos(math.radians(half_angle_deg)), n, n,
                          None, mismatch)
    return crystal, WavelengthTriple.degenerate(lambda_p)


def ppktp_like(length=30e-3, lambda_p=405e-9, mismatch="exact"):
    """Type-0 quasi-phase-matched, degenerate, collinear preset.

    Indices are representative of KTP (z-polarised) at 405/810 nm; the
    poling period is solved for collinear phase matching.
    """
    wl = WavelengthTriple.degenerate(lambda_p)
    base = CrystalSpec(length, 1.9573, 1.8405, 1.8405, None, mismatch)
    period = collinear_poling_period(base, wl)
    return CrystalSpec(length, base.n_p, base.n_s, base.n_i, period, mismatch), wl


PRESETS = {"bbo-like": bbo_like, "ppktp-like": ppktp_like}


class BiphotonKernel:
    """Evaluator of Phi(ks, ki) for a sampled pump k-spectrum.

    Pump values between grid nodes are bilinearly interpolated. Lookups
    outside the sampled square raise ExtentError unless ``zero_extend``.
    """

    def __init__(self, pump_k_spectrum, crystal, wavelengths,
                 include_global_phase=True, zero_extend=False):
        if not isinstance(pump_k_spectrum, SampledField):
            raise TypeError("pump_k_spectrum must be a SampledField")
        if pump_k_spectrum.plane != "k":
            raise PlaneError("the pump spectrum must be a k-space field (use to_kspace)")
        self.pump = pump_k_spectrum
        self.crystal = crystal
        self.wavelengths = wavelengths
        self.matching = PhaseMatching(crystal, wavelengths)
        self.include_global_phase = bool(include_global_phase)
        self.zero_extend = bool(zero_extend)
        g = pump_k_spectrum.grid
        self.pump_k0 = -(g.n // 2) * g.dx
        self.pump_k1 = self.pump_k0 + (g.n - 1) * g.dx

    k_p = property(lambda self: self.matching.k_p)
    k_s = property(lambda self: self.matching.k_s)
    k_i = property(lambda self: self.matching.k_i)

    def delta_k(self, ks_perp, ki_perp):
        return self.matching.delta_k(ks_perp, ki_perp)

    def check_pump_lookup(self, lo, hi):
        """Raise ExtentError if pump lookups over [lo, hi]^2 leave the grid."""
        if self.zero_extend:
            return
        if lo < self.pump_k0 - 1e-9 * abs(self.pump_k0) or hi > self.pump_k1 * (1 + 1e-9):
            raise ExtentError(
                f"pump lookup range [{lo:.4g}, {hi:.4g}] rad/m exceeds the sampled pump "
                f"spectrum [{self.pump_k0:.4g}, {self.pump_k1:.4g}] rad/m; enlarge the pump "
                "k-grid (smaller real-space pitch) or set zero_extend")

    def pump_at(self, k_perp):
        """Bilinear interpolation of the pump spectrum at transverse wavevectors."""
        k = np.asarray(k_perp, dtype=float)
        g = self.pump.grid
        fx = (k[..., 0] - self.pump_k0) / g.dx
        fy = (k[..., 1] - self.pump_k0) / g.dx
        inside = (fx >= 0) & (fy >= 0) & (fx <= g.n - 1) & (fy <= g.n - 1)
        if not self.zero_extend and not np.all(inside):
            raise ExtentError("pump lookup outside the sampled k-spectrum")
        fxc = np.where(inside, fx, 0.0)
        fyc = np.where(inside, fy, 0.0)
        i0 = np.minimum(fxc.astype(np.int64), g.n - 2)
        j0 = np.minimum(fyc.astype(np.int64), g.n - 2)
        tx = fxc - i0
        ty = fyc - j0
        v = self.pump.values
        out = ((1 - tx) * (1 - ty) * v[j0, i0] + tx * (1 - ty) * v[j0, i0 + 1]
               + (1 - tx) * ty * v[j0 + 1, i0] + tx * ty * v[j0 + 1, i0 + 1])
        return np.where(inside, out, 0.0)


def phase_mismatch(ks_perp, ki_perp, kernel):
    """Longitudinal mismatch dk for a BiphotonKernel or PhaseMatching."""
    return kernel.delta_k(ks_perp, ki_perp)


def biphoton_amplitude(ks_perp, ki_perp, kernel):
    """Phi(ks, ki) = E_p(ks+ki) L sinc(dk L/2) exp(i dk L/2)."""
    ks = np.asarray(ks_perp, dtype=float)
    ki = np.asarray(ki_perp, dtype=float)
    ep = kernel.pump_at(ks + ki)
    length = kernel.crystal.length
    arg = 0.5 * length * np.asarray(kernel.delta_k(ks, ki))
    out = ep * (length * np.asarray(sinc(arg)))
    if kernel.include_global_phase:
        out = out * np.exp(1j * arg)
    return out if np.ndim(out) else complex(out)


def _max_sinc_slope(matching, q_max, ks_max):
    """Upper bound on |d(dk)/dq| over the idler integration domain."""
    if matching.paraxial:
        return (2.0 * ks_max + q_max) / matching.k_p
    ki_max = q_max + ks_max
    if q_max >= matching.k_p or ki_max >= matching.k_i or ks_max >= matching.k_s:
        raise DomainError("integration domain reaches evanescent wavevectors")
    return (q_max / math.sqrt(matching.k_p ** 2 - q_max ** 2)
            + ki_max / math.sqrt(matching.k_i ** 2 - ki_max ** 2))


def _pump_nodes(kernel):
    g = kernel.pump.grid
    c = g.coords()
    qx, qy = np.meshgrid(c, c)
    v = kernel.pump.values
    wgt = (v.real ** 2 + v.imag ** 2) * g.dx * g.dx
    keep = wgt > PUMP_WEIGHT_FLOOR * wgt.max()
    return qx[keep], qy[keep], wgt[keep]


def signal_angular_spectrum(kernel, grid, labels="signal"):
    """R_s(ks) = sum over idler nodes of |Phi(ks, ki)|^2 dki^2 on a k-grid.

    The idler runs over ki = q - ks with q the pump grid nodes, so the
    idler step equals the pump k-pitch. ``labels="idler"`` exchanges the
    roles of signal and idler (returns R_i on the same grid).
    """
    if not isinstance(grid, GridSpec):
        raise TypeError("grid must be a GridSpec (pitch in rad/m)")
    m = kernel.matching
    k_a, k_b = (m.k_s, m.k_i) if labels == "signal" else (m.k_i, m.k_s)
    qx, qy, wq = _pump_nodes(kernel)
    q_max = float(np.sqrt(qx * qx + qy * qy).max())
    ks_max = grid.half_width * math.sqrt(2.0)
    slope = _max_sinc_slope(m, q_max, ks_max)
    step = slope * kernel.pump.grid.dx * 0.5 * kernel.crystal.length
    if step >= MAX_SINC_STEP:
        dq = MAX_SINC_STEP / (slope * 0.5 * kernel.crystal.length)
        raise ResolutionError(
            f"idler quadrature step {kernel.pump.grid.dx:.4g} rad/m changes dk*L/2 by "
            f"{step:.3g} rad (limit pi/4); use a pump k-pitch below {dq:.4g} rad/m, "
            f"i.e. a real-space pump grid wider than {2 * math.pi / dq:.4g} m")
    ring = m.ring_radius()
    if ring is not None and grid.half_width < RING_MARGIN * ring:
        raise ExtentError(
            f"signal grid half-width {grid.half_width:.4g} rad/m does not cover the "
            f"phase-matching ring {ring:.4g} rad/m with 25% margin; use pitch >= "
            f"{RING_MARGIN * ring / (grid.n // 2):.4g} rad/m")
    c = grid.coords()
    r = _kernels.angular_spectrum(
        c, c, np.ascontiguousarray(qx), np.ascontiguousarray(qy), np.ascontiguousarray(wq),
        m.k_p, k_a, k_b, kernel.crystal.length, m.grating, m.paraxial)
    return IntensityMap(r, grid, "k",
                        kernel.wavelengths.lambda_s if labels == "signal"
                        else kernel.wavelengths.lambda_i)


def signal_intensity_at(kernel, ks_points):
    """R_s at arbitrary signal wavevectors (shape (..., 2)), same quadrature
    as ``signal_angular_spectrum`` but without its grid checks."""
    pts = np.asarray(ks_points, dtype=float)
    flat = pts.reshape(-1, 2)
    m = kernel.matching
    qx, qy, wq = _pump_nodes(kernel)
    qx, qy, wq = (np.ascontiguousarray(v) for v in (qx, qy, wq))
    out = np.empty(flat.shape[0])
    for j, (x, y) in enumerate(flat):
        out[j] = _kernels.angular_spectrum(
            np.array([x]), np.array([y]), qx, qy, wq, m.k_p, m.k_s, m.k_i,
            kernel.crystal.length, m.grating, m.paraxial)[0, 0]
    return out.reshape(pts.shape[:-1])
