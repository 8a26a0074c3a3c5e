"""Detection-side quantities: fiber-coupled coincidence and singles rates,
heralding efficiency, OAM overlap amplitudes and spectra, Schmidt numbers
and two-photon Bell-subspace density matrices.

Rates are in arbitrary units. A fiber is modelled by its Gaussian mode in
crystal k-space, xi(k) = sqrt(a^2/2pi) exp(-a^2 |k|^2 / 4).
"""
import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np

from . import _kernels
from ._grid import GridSpec
from ._quadrature import gauss_legendre
from .errors import (DegenerateStateError, DomainError, ExtentError,
                     PreconditionError, ShapeError, SpecError, TruncationError)
from .fieldgrid import sample, support_radius
from .modes import (Family, ModeSpec, mode_extent, mode_power, normalized,
                    radial_amplitude)

NORM_TOL = 1e-4
# pump k-spectrum support threshold (fraction of peak intensity)
SUPPORT_REL = 1e-12


# -- fiber-coupled rates -------------------------------------------------

@dataclass(frozen=True)
class FiberSpec:
    """Gaussian fiber mode with radius ``a`` [m] as seen from the crystal."""

    a: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise SpecError(f"fiber mode radius must be positive, got {self.a!r}")

    @classmethod
    def from_coupler(cls, mfd, focal_length, wavelength, magnification=1.0):
        """Mode radius at the crystal for a fiber behind a coupling lens.

        The fiber mode (waist mfd/2) is imaged through a lens of focal length
        ``focal_length`` to a Gaussian of waist lambda f / (pi mfd/2), then
        scaled by the relay ``magnification`` between crystal and coupler.
        """
        if not (mfd > 0 and focal_length > 0 and wavelength > 0 and magnification > 0):
            raise SpecError("coupler parameters must be positive")
        return cls(magnification * wavelength * focal_length / (math.pi * 0.5 * mfd))


def fiber_mode(spec, k_perp):
    """xi(k) = sqrt(a^2 / 2 pi) exp(-a^2 |k|^2 / 4)."""
    k = np.asarray(k_perp, dtype=float)
    q2 = k[..., 0] ** 2 + k[..., 1] ** 2
    out = math.sqrt(spec.a ** 2 / (2.0 * math.pi)) * np.exp(-0.25 * spec.a ** 2 * q2)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class QuadratureSpec:
    """n x n midpoint nodes per transverse k-plane, spanning +-span/a."""

    n: int = 64
    span: float = 4.0

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 8:
            raise SpecError(f"quadrature needs an integer n >= 8, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.span < 4.0:
            raise ExtentError(
                f"quadrature span {self.span:g}/a is below the 4/a coverage the fiber "
                "functions need")


def _nodes(center, half, n):
    d = 2.0 * half / n
    c = (np.arange(n) - 0.5 * (n - 1)) * d
    x, y = np.meshgrid(center[0] + c, center[1] + c)
    return x.ravel(), y.ravel(), d


@dataclass(frozen=True)
class FiberRates:
    coincidence: float
    singles: float

    @property
    def efficiency(self):
        if not self.singles > 0:
            raise DomainError("singles rate is zero; heralding efficiency undefined")
        eta = self.coincidence / self.singles
        if not -1e-12 <= eta <= 1.0 + 1e-9:
            raise AssertionError(f"heralding efficiency {eta} outside [0, 1]")
        return min(max(eta, 0.0), 1.0)


def fiber_rates(kernel, xi_s, xi_i, centers, quad=QuadratureSpec(), signal="mmf"):
    """Coincidence and idler-singles rates from one heralded signal amplitude.

    psi(ks) = sum_ki Phi(ks, ki) xi_i(ki - c_i) dki^2 is evaluated on a
    signal grid covering the pump support plus the idler acceptance. Then

    * singles = sum |psi|^2 dks^2 (signal traced over all directions),
    * coincidence (signal="smf") = |sum psi xi_s(ks - c_s) dks^2|^2, the
      modulus squared of the full double overlap with both fiber modes,
    * coincidence (signal="mmf") = sum |psi|^2 (xi_s(ks-c_s)/xi_s(0))^2 dks^2,
      a Gaussian bucket of radius a_s on the signal side.
    """
    if signal not in ("mmf", "smf"):
        raise SpecError(f"signal collection must be 'mmf' or 'smf', got {signal!r}")
    c_s = np.asarray(centers[0], dtype=float)
    c_i = np.asarray(centers[1], dtype=float)
    n = quad.n
    kix, kiy, dki = _nodes(c_i, quad.span / xi_i.a, n)
    xiw = fiber_mode(xi_i, np.stack([kix - c_i[0], kiy - c_i[1]], -1)) * dki * dki
    s0 = -c_i
    half = max(support_radius(kernel.pump, SUPPORT_REL) + quad.span / xi_i.a,
               float(np.max(np.abs(c_s - s0))) + quad.span / xi_s.a)
    sx, sy, dks = _nodes(s0, half, n)
    lo = min(sx.min() + kix.min(), sy.min() + kiy.min())
    hi = max(sx.max() + kix.max(), sy.max() + kiy.max())
    kernel.check_pump_lookup(lo, hi)
    m = kernel.matching
    for name, k, kmax in (("signal", m.k_s, math.hypot(np.abs(sx).max(), np.abs(sy).max())),
                          ("idler", m.k_i, math.hypot(np.abs(kix).max(), np.abs(kiy).max()))):
        if kmax >= k:
            raise DomainError(f"{name} quadrature reaches evanescent wavevectors")
    g = kernel.pump.grid
    psi = _kernels.heralded_amplitude(
        sx, sy, kix, kiy, np.ascontiguousarray(xiw), np.ascontiguousarray(kernel.pump.values),
        kernel.pump_k0, g.dx, m.k_p, m.k_s, m.k_i, kernel.crystal.length, m.grating,
        m.paraxial, kernel.include_global_phase)
    p2 = psi.real ** 2 + psi.imag ** 2
    singles = float(np.sum(p2)) * dks * dks
    rel = np.stack([sx - c_s[0], sy - c_s[1]], -1)
    if signal == "smf":
        amp = np.sum(psi * fiber_mode(xi_s, rel)) * dks * dks
        coinc = float(amp.real ** 2 + amp.imag ** 2)
    else:
        bucket = np.exp(-0.5 * xi_s.a ** 2 * (rel[:, 0] ** 2 + rel[:, 1] ** 2))
        coinc = float(np.sum(bucket * p2)) * dks * dks
    return FiberRates(coinc, singles)


def coincidence_rate(kernel, xi_s, xi_i, centers, quad=QuadratureSpec(), signal="mmf"):
    """Signal-idler coincidence rate [arb] for fibers centred at ``centers``."""
    return fiber_rates(kernel, xi_s, xi_i, centers, quad, signal).coincidence


def singles_rate(kernel, xi_i, center_i, quad=QuadratureSpec()):
    """Idler single-mode-fiber rate with the signal traced out [arb]."""
    dummy = FiberSpec(xi_i.a)
    return fiber_rates(kernel, dummy, xi_i, ((0.0, 0.0), center_i), quad).singles


def heralding_efficiency(kernel, xi_s, xi_i, centers, quad=QuadratureSpec(), signal="mmf"):
    """Coincidences per idler single, in [0, 1]."""
    return fiber_rates(kernel, xi_s, xi_i, centers, quad, signal).efficiency


# -- OAM projections -----------------------------------------------------

class ProjectionFamily(str, enum.Enum):
    LG = "lg"
    BG = "bg"


@dataclass(frozen=True)
class ProjectionSpec:
    """Projection mode: LG (the normal-vortex profile) or BG."""

    family: ProjectionFamily
    ell: int
    w: float
    k_r: float = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", ProjectionFamily(self.family))
        except ValueError:
            raise SpecError(f"unknown projection family {self.family!r}") from None
        self.to_mode()

    def to_mode(self):
        if self.family is ProjectionFamily.LG:
            if self.k_r is not None:
                raise SpecError("k_r is not a parameter of LG projections")
            return ModeSpec(Family.NOV, self.ell, w=self.w)
        return ModeSpec(Family.BG, self.ell, w=self.w, k_r=self.k_r)


@lru_cache(maxsize=4096)
def _normalized_projection(proj):
    return normalized(proj.to_mode())


@dataclass(frozen=True)
class RadialQuadrature:
    nodes: int = 2048
    extent_factor: float = 5.0

    def __post_init__(self):
        if self.nodes < 2048:
            raise SpecError("radial overlaps use at least 2048 Gauss-Legendre nodes")
        if self.extent_factor < 5.0:
            raise SpecError("radial truncation must reach 5x the mode extent")


def _as_mode(spec):
    if isinstance(spec, ProjectionSpec):
        return _normalized_projection(spec)
    if isinstance(spec, ModeSpec):
        p = mode_power(spec)
        if abs(p - 1.0) > NORM_TOL:
            raise PreconditionError(
                f"mode {spec.family.value} ell={spec.ell} has power {p:.6g}; apply "
                "modes.normalized first")
        return spec
    raise TypeError("expected a ModeSpec or ProjectionSpec")


def oam_overlap_amplitude(pump, sig, idl, quad=RadialQuadrature()):
    """C = int dtheta int r E_p conj(E_s) conj(E_i) dr.

    The angular integral is 2 pi when ell_p = ell_s + ell_i and exactly 0
    otherwise; the radial one is Gauss-Legendre on [0, 5 x largest extent].
    """
    modes = [_as_mode(m) for m in (pump, sig, idl)]
    mp, ms, mi = modes
    if mp.ell != ms.ell + mi.ell:
        return 0j
    r_max = quad.extent_factor * max(mode_extent(m) for m in modes)
    r, w = gauss_legendre(quad.nodes, 0.0, r_max)
    # the conjugate pair is multiplied first so C(s, i) == C(i, s) exactly
    prod = radial_amplitude(mp, r) * (np.conj(radial_amplitude(ms, r))
                                      * np.conj(radial_amplitude(mi, r)))
    return complex(2.0 * math.pi * np.sum(w * r * prod))


def oam_overlap_bruteforce(pump, sig, idl, grid):
    """Same overlap as a plain Cartesian sum over ``grid`` (no angular shortcut)."""
    fields = [sample(_as_mode(m), grid) for m in (pump, sig, idl)]
    prod = fields[0].values * np.conj(fields[1].values) * np.conj(fields[2].values)
    return complex(np.sum(prod) * grid.dx * grid.dx)


@dataclass(frozen=True)
class OamSpectrum:
    """Idler OAM values and their probabilities (sum to 1)."""

    ells: Tuple[int, ...]
    probs: Tuple[float, ...]

    def __post_init__(self):
        if len(self.ells) != len(self.probs) or not self.ells:
            raise ShapeError("ells and probs must be non-empty and of equal length")
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
            raise PreconditionError("OAM probabilities must be >= 0 and sum to 1")
        object.__setattr__(self, "ells", tuple(int(e) for e in self.ells))
        object.__setattr__(self, "probs", tuple(float(x) for x in p))


def oam_spectrum(pump, family, ell_max, w, k_r=None, quad=RadialQuadrature(),
                 w_signal=None, k_r_signal=None):
    """Probabilities p(ell_i) = |C(ell_p - ell_i, ell_i)|^2 for |ell_i| <= ell_max.

    The pump is normalised here. Both arms use (w, k_r) unless signal-arm
    values are given. The edges of the window must carry < 1e-3 of the peak.
    """
    if ell_max < 10:
        raise SpecError("oam_spectrum needs ell_max >= 10")
    pump = normalized(pump)
    w_s = w if w_signal is None else w_signal
    kr_s = k_r if k_r_signal is None else k_r_signal
    ells = list(range(-int(ell_max), int(ell_max) + 1))
    amps = []
    for li in ells:
        sig = ProjectionSpec(family, pump.ell - li, w_s, kr_s)
        idl = ProjectionSpec(family, li, w, k_r)
        amps.append(oam_overlap_amplitude(pump, sig, idl, quad))
    p = np.abs(np.array(amps)) ** 2
    if not p.max() > 0:
        raise DegenerateStateError("all overlap amplitudes vanish")
    edge = max(p[0], p[-1]) / p.max()
    if edge >= 1e-3:
        raise TruncationError(
            f"window |ell| <= {ell_max} truncates the spectrum (edge/peak = {edge:.2e}); "
            "increase ell_max")
    p = p / p.sum()
    return OamSpectrum(tuple(ells), tuple(p))


def schmidt_number(spectrum):
    """K = 1 / sum p^2."""
    p = np.asarray(spectrum.probs)
    return float(1.0 / np.sum(p * p))


# -- Bell-subspace states ------------------------------------------------

@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix (checked)."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ShapeError(f"density matrix must be square, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise PreconditionError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise PreconditionError("density matrix trace is not 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise PreconditionError("density matrix has negative eigenvalues")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self):
        return self.entries.shape[0]


# Two-qubit embedding: qubit value 0 stands for ell_s, 1 for ell_i, so the
# basis is |ls ls>, |ls li>, |li ls>, |li li>.
BELL_BASIS = ("ls,ls", "ls,li", "li,ls", "li,li")


def bell_target():
    """(|ls,li> + |li,ls>) / sqrt(2) in the two-qubit embedding."""
    v = np.zeros(4, dtype=complex)
    v[1] = v[2] = 1.0 / math.sqrt(2.0)
    return v


def bell_density_matrix(c1, c2, noise=0.0):
    """(1-p)|psi><psi| + p I/4 with psi = (c1|ls,li> + c2|li,ls>)/norm."""
    if not 0.0 <= noise <= 1.0:
        raise SpecError(f"noise must be in [0, 1], got {noise!r}")
    norm = math.sqrt(abs(c1) ** 2 + abs(c2) ** 2)
    if norm == 0:
        raise DegenerateStateError("both amplitudes vanish; no state to normalise")
    psi = np.zeros(4, dtype=complex)
    psi[1] = c1 / norm
    psi[2] = c2 / norm
    rho = (1.0 - noise) * np.outer(psi, psi.conj()) + noise * np.eye(4) / 4.0
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def fidelity(rho, target):
    """<t| rho |t> / <t|t> for a normalised pure target, clamped to [0, 1].

    Dividing by <t|t> removes the rounding of 1/sqrt(2) amplitudes, so the
    maximally mixed state gives exactly 1/dim.
    """
    t = np.asarray(target, dtype=complex)
    if t.shape != (rho.dim,):
        raise ShapeError(f"target has shape {t.shape}, density matrix dim is {rho.dim}")
    norm = np.vdot(t, t).real
    if abs(norm - 1.0) > 1e-9:
        raise PreconditionError("target state is not normalised")
    f = np.vdot(t, rho.entries @ t) / norm
    if abs(f.imag) > 1e-12:
        raise AssertionError(f"fidelity has imaginary part {f.imag:g}")
    return float(min(max(f.real, 0.0), 1.0))


def bell_amplitudes(pump, ell_s, ell_i, family, w, k_r=None, arm_asymmetry=1.0,
                    quad=RadialQuadrature()):
    """(C(ell_s, ell_i), C(ell_i, ell_s)) with the signal waist scaled by
    ``arm_asymmetry`` (1 means identical arms)."""
    if ell_s + ell_i != pump.ell:
        raise SpecError(f"ell_s + ell_i = {ell_s + ell_i} must equal the pump ell {pump.ell}")
    if not arm_asymmetry > 0:
        raise SpecError("arm_asymmetry must be positive")
    pump = normalized(pump)
    w_s = w * arm_asymmetry

    def amp(a, b):
        return oam_overlap_amplitude(pump, ProjectionSpec(family, a, w_s, k_r),
                                     ProjectionSpec(family, b, w, k_r), quad)

    return amp(ell_s, ell_i), amp(ell_i, ell_s)
