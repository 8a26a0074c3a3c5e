"""Invariant suite run by ``twistlab validate``.

Each check exercises one documented property of a module on a small but
representative configuration and reports the measured value against its
tolerance.
"""
import math
import os
import tempfile
from dataclasses import dataclass

import numpy as np

from ._grid import GridSpec
from .fieldgrid import (SampledField, apply_axicon, apply_spiral_phase, lens_fourier,
                        ring_radius, sample, to_kspace)
from .modes import (Family, ModeSpec, PovOptics, eval_mode, mode_power, normalized,
                    pov_params_from_optics)
from .projection import (DensityMatrix, FiberSpec, ProjectionSpec, QuadratureSpec,
                         bell_density_matrix, fiber_rates, oam_overlap_amplitude,
                         oam_overlap_bruteforce, oam_spectrum, schmidt_number)
from .spdc import (BiphotonKernel, PhaseMatching, bbo_like, ppktp_like,
                   signal_angular_spectrum, signal_intensity_at)
from .specialfn import bessel_ive, bessel_j, sinc


@dataclass(frozen=True)
class CheckResult:
    name: str
    module: str
    passed: bool
    value: float
    tolerance: float


def _le(name, module, value, tol):
    value = float(value)
    return CheckResult(name, module, bool(value <= tol), value, tol)


# -- specialfn ---------------------------------------------------------------

def check_j_recurrence():
    x = np.linspace(0.1, 100.0, 500)
    err = 0.0
    for ell in range(1, 41):
        lhs = bessel_j(ell - 1, x) + bessel_j(ell + 1, x)
        err = max(err, float(np.max(np.abs(lhs - 2.0 * ell / x * bessel_j(ell, x)))))
    return _le("J recurrence", "specialfn", err, 1e-9)


def check_i_recurrence():
    x = np.linspace(0.1, 100.0, 500)
    err = 0.0
    for ell in range(1, 41):
        a = bessel_ive(ell - 1, x)
        lhs = a - bessel_ive(ell + 1, x)
        rel = np.abs(lhs - 2.0 * ell / x * bessel_ive(ell, x)) / a
        err = max(err, float(np.max(rel)))
    return _le("I recurrence (scaled)", "specialfn", err, 1e-9)


def check_j_integral():
    # trapezoid on [0, pi] is spectrally accurate: the integrand is smooth
    # and its odd derivatives vanish at both ends
    tau = np.linspace(0.0, math.pi, 10001)
    wts = np.full(tau.size, tau[1] - tau[0])
    wts[0] = wts[-1] = 0.5 * wts[0]
    x = np.linspace(0.0, 50.0, 101)
    err = 0.0
    for ell in range(0, 21):
        integ = np.cos(ell * tau[None, :] - x[:, None] * np.sin(tau)[None, :]) @ wts / math.pi
        err = max(err, float(np.max(np.abs(integ - bessel_j(ell, x)))))
    return _le("J integral representation", "specialfn", err, 1e-8)


def check_sinc_shape():
    x = np.random.default_rng(0).uniform(-200.0, 200.0, 10001)
    x = x[x != 0]
    s = sinc(x)
    bad = int(np.sum(s != sinc(-x)) + np.sum(np.abs(s) > 1.0) + np.sum(s >= 1.0))
    bad += int(sinc(0.0) != 1.0)
    return _le("sinc even, |sinc| <= 1, max only at 0", "specialfn", bad, 0)


# -- modes ---------------------------------------------------------------

def _sample_specs(ell):
    return [ModeSpec.nov(ell, 1e-3), ModeSpec.bg(ell, 1e4, 1e-3),
            ModeSpec.pov(ell, 5e-4, 5e-5, 1e-3)]


def check_separability():
    r = np.linspace(0.0, 2e-3, 41)[:, None]
    th = np.linspace(-math.pi, math.pi, 37)[None, :]
    err = 0.0
    for ell in (-3, 0, 2, 7):
        for spec in _sample_specs(ell):
            e = eval_mode(spec, r, th)
            ref = eval_mode(spec, r, 0.0 * th) * np.exp(1j * ell * th)
            err = max(err, float(np.max(np.abs(e - ref)) / np.max(np.abs(e))))
    return _le("OAM phase separability", "modes", err, 1e-12)


def check_norm():
    err = 0.0
    for ell in range(0, 26):
        for spec in _sample_specs(ell):
            spec = normalized(spec)
            # independent uniform-grid trapezoid out to 8x the extent
            r_max = 8.0 * max(spec.w or 0.0, (spec.r_r or 0.0) + 10 * (spec.w_o or 0.0),
                              (spec.w or 0.0) * math.sqrt(abs(ell) / 2.0))
            r = np.linspace(0.0, r_max, 200001)
            p = 2 * math.pi * np.trapezoid(np.abs(eval_mode(spec, r, 0.0)) ** 2 * r, r)
            err = max(err, abs(p - 1.0))
    return _le("unit norm after normalize_numeric, ell 0..25", "modes", err, 1e-4)


_RING_ELLS = (1, 2, 3, 5, 8, 12, 16, 20, 25)


def _nov_rings():
    grid = GridSpec(1024, 14e-6)
    return {ell: ring_radius(sample(ModeSpec.nov(ell, 1e-3), grid)) for ell in _RING_ELLS}


def check_nov_scaling(rings):
    err = max(abs(rings[ell] / (1e-3 * math.sqrt(ell / 2.0)) - 1.0) for ell in _RING_ELLS)
    return _le("NOV ring radius = w sqrt(ell/2)", "modes", err, 0.01)


def check_pov_invariance():
    grid = GridSpec(1024, 5e-6)
    radii = [ring_radius(sample(ModeSpec.pov(ell, 5e-4, 5e-5), grid)) for ell in range(1, 11)]
    spread = (max(radii) - min(radii)) / min(radii)
    return _le("POV ring radius spread, ell 1..10", "modes", spread, 0.05)


def check_conjugation():
    r = np.linspace(0.0, 2e-3, 41)[:, None]
    th = np.linspace(-math.pi, math.pi, 37)[None, :]
    err = 0.0
    for ell in (1, 2, 5):
        for spec in _sample_specs(ell):
            neg = eval_mode(spec.with_ell(-ell), r, th)
            pos = eval_mode(spec, r, -th)
            big = np.abs(pos) > 1e-6 * np.abs(pos).max()
            ratio = neg[big] / pos[big]
            err = max(err, float(np.max(np.abs(ratio - ratio[0]))),
                      abs(abs(ratio[0]) - 1.0))
    return _le("conjugation E(-ell, theta) ~ E(ell, -theta)", "modes", err, 1e-10)


# -- fieldgrid -----------------------------------------------------------

def check_parseval():
    rng = np.random.default_rng(1)
    grid = GridSpec(128, 1e-5)
    err = 0.0
    for _ in range(20):
        vals = rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128))
        f = SampledField(vals, grid)
        err = max(err, abs(lens_fourier(f, 0.5, 8.1e-7).power / f.power - 1.0))
    return _le("Parseval through lens_fourier", "fieldgrid", err, 1e-10)


def check_linearity():
    rng = np.random.default_rng(2)
    grid = GridSpec(128, 1e-5)
    f = SampledField(rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128)), grid)
    g = SampledField(rng.normal(size=(128, 128)) + 1j * rng.normal(size=(128, 128)), grid)
    a, b = 0.3 - 1.2j, 2.5 + 0.1j
    lhs = lens_fourier(SampledField(a * f.values + b * g.values, grid), 0.5, 8.1e-7).values
    rhs = (a * lens_fourier(f, 0.5, 8.1e-7).values + b * lens_fourier(g, 0.5, 8.1e-7).values)
    err = np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs))
    return _le("lens_fourier linearity", "fieldgrid", err, 1e-12)


def check_chain():
    # a vortex Gaussian behind an axicon approximates a BG beam only when
    # k_r w_g >> ell; here k_r w_g = 100
    lam, f, w_g, k_r = 405e-9, 0.75, 1e-3, 1e5
    grid = GridSpec(1024, 1e-5)
    gauss = sample(ModeSpec.gaussian(w_g), grid)
    w_o, r_r = pov_params_from_optics(PovOptics.from_wavelength(f, lam, w_g, k_r))
    err = 0.0
    for ell in range(1, 11):
        out = lens_fourier(apply_axicon(apply_spiral_phase(gauss, ell), k_r), f, lam)
        ref = ring_radius(sample(ModeSpec.pov(ell, r_r, w_o), out.grid))
        err = max(err, abs(ring_radius(out) / ref - 1.0))
    return _le("Gaussian->SPP->axicon->lens ring = POV ring", "fieldgrid", err, 0.02)


def check_ring_law(rings):
    err = max(abs(rings[ell] / rings[1] / math.sqrt(ell) - 1.0) for ell in _RING_ELLS)
    return _le("NOV ring ratio = sqrt(ell), ell 1..25", "fieldgrid", err, 0.02)


def check_pov_ring_law():
    grid = GridSpec(1024, 5e-6)
    r1 = ring_radius(sample(ModeSpec.pov(1, 5e-4, 5e-5), grid))
    worst = max(ring_radius(sample(ModeSpec.pov(ell, 5e-4, 5e-5), grid)) / r1
                for ell in (5, 10, 15, 20, 25))
    return _le("POV ring ratio, ell 1..25", "fieldgrid", worst, 1.1)


# -- spdc ----------------------------------------------------------------

def _small_kernel(spec, include_phase=True):
    crystal, wl = bbo_like()
    pump = to_kspace(sample(normalized(spec), GridSpec(128, 30e-6)))
    return BiphotonKernel(pump, crystal, wl, include_global_phase=include_phase)


def _small_signal_grid():
    crystal, wl = bbo_like()
    ring = PhaseMatching(crystal, wl).ring_radius()
    return GridSpec(64, 1.3 * ring / 32)


def check_degenerate_symmetry():
    kern = _small_kernel(ModeSpec.nov(1, 50e-6))
    grid = _small_signal_grid()
    rs = signal_angular_spectrum(kern, grid).values
    ri = signal_angular_spectrum(kern, grid, labels="idler").values
    neg = float(-min(rs.min(), 0.0))
    err = abs(rs.sum() / ri.sum() - 1.0) + neg
    return _le("R_s >= 0 and signal/idler totals equal (degenerate)", "spdc", err, 1e-6)


def check_rotation():
    kern = _small_kernel(ModeSpec.nov(2, 50e-6))
    ring = kern.matching.ring_radius()
    phi = np.linspace(0.0, 2.0 * math.pi, 72, endpoint=False)
    worst = 0.0
    for rho in (0.97 * ring, ring, 1.03 * ring):
        pts = np.stack([rho * np.cos(phi), rho * np.sin(phi)], -1)
        vals = signal_intensity_at(kern, pts)
        worst = max(worst, float(np.sqrt(np.mean((vals - vals.mean()) ** 2)) / vals.mean()))
    return _le("R_s rotation invariance (RMS)", "spdc", worst, 0.01)


def check_paraxial():
    crystal, wl = ppktp_like()
    ex = PhaseMatching(crystal, wl)
    par = PhaseMatching(crystal.__class__(crystal.length, crystal.n_p, crystal.n_s,
                                          crystal.n_i, crystal.poling_period, "paraxial"), wl)
    rng = np.random.default_rng(3)
    k = min(ex.k_s, ex.k_i)
    ang = rng.uniform(0, 2 * math.pi, (2, 2000))
    mag = rng.uniform(0, 0.01 * k, (2, 2000))
    ks = np.stack([mag[0] * np.cos(ang[0]), mag[0] * np.sin(ang[0])], -1)
    ki = np.stack([mag[1] * np.cos(ang[1]), mag[1] * np.sin(ang[1])], -1)
    err = np.max(np.abs(par.delta_k(ks, ki) - ex.delta_k(ks, ki))) / ex.k_p
    return _le("paraxial vs exact mismatch, |k|/k <= 0.01 (relative to k_p)", "spdc", err, 1e-3)


def check_global_phase():
    grid = _small_signal_grid()
    spec = ModeSpec.pov(1, 5e-4, 5e-5)
    a = signal_angular_spectrum(_small_kernel(spec, True), grid).values
    b = signal_angular_spectrum(_small_kernel(spec, False), grid).values
    return _le("global phase leaves R_s bit-identical", "spdc", int(not np.array_equal(a, b)), 0)


# -- projection ----------------------------------------------------------

_W_PROJ = 206e-6
_POV = ModeSpec.pov(1, 90e-6, 40e-6)


def _window_amplitudes():
    pump = normalized(_POV)
    ells = range(-3, 5)
    fast = {}
    for ls in ells:
        for li in ells:
            fast[ls, li] = oam_overlap_amplitude(pump, ProjectionSpec("lg", ls, _W_PROJ),
                                                 ProjectionSpec("lg", li, _W_PROJ))
    grid = GridSpec(512, 4e-6)
    slow = {}
    for key in fast:
        slow[key] = oam_overlap_bruteforce(pump, ProjectionSpec("lg", key[0], _W_PROJ),
                                           ProjectionSpec("lg", key[1], _W_PROJ), grid)
    return fast, slow


def check_selection(fast, slow):
    off = [k for k in fast if k[0] + k[1] != _POV.ell]
    exact_zero = all(fast[k] == 0 for k in off)
    peak = max(abs(v) for v in slow.values())
    resid = max(abs(slow[k]) for k in off) / peak
    value = resid if exact_zero else math.inf
    return _le("selection rule (analytic zeros, brute-force residual)", "projection",
               value, 1e-4)


def check_bruteforce_spectrum(fast, slow):
    on = sorted(k for k in fast if k[0] + k[1] == _POV.ell)
    pf = np.array([abs(fast[k]) ** 2 for k in on])
    ps = np.array([abs(slow[k]) ** 2 for k in on])
    err = np.max(np.abs(pf / pf.sum() - ps / ps.sum()))
    return _le("radial vs 2-D Cartesian spectrum, window [-3, 4]", "projection", err, 1e-3)


def check_exchange(fast):
    peak = max(abs(v) for v in fast.values())
    err = max(abs(fast[a, b] - fast[b, a]) for a, b in fast) / peak
    return _le("exchange symmetry C(a,b) = C(b,a)", "projection", err, 1e-10)


def check_spectrum_normalisation():
    worst = 0.0
    for pump_ell in (0, 1):
        for fam, k_r in (("lg", None), ("bg", 2e4)):
            spec = oam_spectrum(ModeSpec.pov(pump_ell, 90e-6, 40e-6), fam, 40, _W_PROJ, k_r)
            p = np.asarray(spec.probs)
            k = schmidt_number(spec)
            scaled = 13.7 * p / np.sum(13.7 * p)
            k2 = 1.0 / np.sum(scaled ** 2)
            worst = max(worst, abs(p.sum() - 1.0), abs(k2 - k) / k, max(0.0, 1.0 - k))
    return _le("spectrum sums to 1, K >= 1, K scale-invariant", "projection", worst, 1e-9)


def check_density_matrices():
    bad = 0
    rng = np.random.default_rng(4)
    for _ in range(50):
        c1, c2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        rho = bell_density_matrix(c1, c2, float(rng.uniform()))
        e = rho.entries
        ok = (np.max(np.abs(e - e.conj().T)) <= 1e-12 and abs(np.trace(e) - 1) <= 1e-12
              and np.linalg.eigvalsh(e).min() >= -1e-10)
        bad += int(not ok)
        DensityMatrix(e)
    return _le("density matrix Hermitian, unit trace, PSD", "projection", bad, 0)


def check_heralding_range():
    crystal, wl = ppktp_like()
    w_o = pov_params_from_optics(PovOptics.from_wavelength(0.75, 405e-9, 1e-3))[0]
    xi_i = FiberSpec.from_coupler(5e-6, 2e-3, wl.lambda_i, 2.0)
    xi_s = FiberSpec(50e-6)
    grid = GridSpec(512, 20e-6)
    worst = 0.0
    for ell in (1, 5, 10, 15):
        for spec in (ModeSpec.nov(ell, w_o), ModeSpec.pov(ell, 300e-6, w_o, 1e-3)):
            kern = BiphotonKernel(to_kspace(sample(normalized(spec), grid)), crystal, wl)
            for mode in ("mmf", "smf"):
                r = fiber_rates(kern, xi_s, xi_i, ((0, 0), (0, 0)), QuadratureSpec(), mode)
                eta = r.coincidence / r.singles
                worst = max(worst, max(0.0, -eta), max(0.0, eta - 1.0))
    return _le("heralding efficiency in [0, 1]", "projection", worst, 1e-9)


# -- cli -----------------------------------------------------------------

def check_cli_determinism():
    from .config import parse_config
    from .scenarios import run_modes_render
    cfg = parse_config("modes-render", overrides={
        "family": "nov,pov", "ell": "1,3", "grid_n": "128", "grid_dx": "60e-6",
        "w": "1e-3", "r_r": "1e-3", "w_o": "1e-4"})
    blobs = []
    for _ in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            run_modes_render(cfg, tmp)
            with open(os.path.join(tmp, "ring_radii.csv"), "rb") as fh:
                blobs.append(fh.read())
    return _le("repeated scenario run gives identical CSV", "cli", int(blobs[0] != blobs[1]), 0)


def run_all():
    results = [check_j_recurrence(), check_i_recurrence(), check_j_integral(),
               check_sinc_shape(), check_separability(), check_norm()]
    rings = _nov_rings()
    results += [check_nov_scaling(rings), check_pov_invariance(), check_conjugation(),
                check_parseval(), check_linearity(), check_chain(), check_ring_law(rings),
                check_pov_ring_law(), check_degenerate_symmetry(), check_rotation(),
                check_paraxial(), check_global_phase()]
    fast, slow = _window_amplitudes()
    results += [check_selection(fast, slow), check_bruteforce_spectrum(fast, slow),
                check_exchange(fast), check_spectrum_normalisation(),
                check_density_matrices(), check_heralding_range(), check_cli_determinism()]
    return results
