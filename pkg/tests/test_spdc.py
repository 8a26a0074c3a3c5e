import math

import numpy as np
import pytest

from twistlab._grid import GridSpec
from twistlab.errors import ExtentError, PlaneError, ResolutionError, SpecError
from twistlab.fieldgrid import ring_radius, sample, to_kspace
from twistlab.modes import ModeSpec, normalized
from twistlab.spdc import (BiphotonKernel, CrystalSpec, PhaseMatching, WavelengthTriple,
                           bbo_like, biphoton_amplitude, collinear_poling_period,
                           phase_mismatch, ppktp_like, signal_angular_spectrum,
                           signal_intensity_at)

# closed form for the degenerate BBO-like preset: k_s sin(3 deg)
BBO_RING = 673911.8626700782


def small_kernel(spec=None, **kw):
    crystal, wl = bbo_like()
    spec = spec or ModeSpec.nov(1, 50e-6)
    pump = to_kspace(sample(normalized(spec), GridSpec(128, 30e-6)))
    return BiphotonKernel(pump, crystal, wl, **kw)


def signal_grid(n=64):
    return GridSpec(n, 1.3 * BBO_RING / (n // 2))


def test_wavelength_energy_conservation():
    wl = WavelengthTriple(405e-9, 780e-9)
    assert 1 / wl.lambda_i == pytest.approx(1 / 405e-9 - 1 / 780e-9)
    assert WavelengthTriple.degenerate(405e-9).is_degenerate
    with pytest.raises(SpecError):
        WavelengthTriple(405e-9, 300e-9)


def test_crystal_validation():
    with pytest.raises(SpecError):
        CrystalSpec(-1e-3, 1.6, 1.6, 1.6)
    with pytest.raises(SpecError):
        CrystalSpec(1e-3, 1.6, 1.6, 1.6, mismatch="approx")


def test_bbo_ring_matches_closed_form():
    crystal, wl = bbo_like()
    m = PhaseMatching(crystal, wl)
    k_s = 2 * math.pi * 1.66 / 810e-9
    assert BBO_RING == pytest.approx(k_s * math.sin(math.radians(3.0)), rel=1e-12)
    assert m.ring_radius() == pytest.approx(BBO_RING, rel=1e-9)


def test_collinear_poling_cancels_mismatch():
    crystal, wl = ppktp_like()
    m = PhaseMatching(crystal, wl)
    assert abs(phase_mismatch(np.zeros(2), np.zeros(2), m)) < 1e-6
    assert crystal.poling_period == pytest.approx(collinear_poling_period(crystal, wl))
    assert m.ring_radius() is None


def test_paraxial_agrees_near_axis():
    crystal, wl = ppktp_like()
    par = CrystalSpec(crystal.length, crystal.n_p, crystal.n_s, crystal.n_i,
                      crystal.poling_period, "paraxial")
    ex, px = PhaseMatching(crystal, wl), PhaseMatching(par, wl)
    ks = np.array([[1e4, -2e4], [5e4, 3e4]])
    ki = np.array([[-3e4, 1e4], [2e4, 0.0]])
    assert np.max(np.abs(ex.delta_k(ks, ki) - px.delta_k(ks, ki))) < 1e-6 * ex.k_p


def test_kernel_requires_kspace_pump():
    crystal, wl = bbo_like()
    real = sample(ModeSpec.gaussian(50e-6), GridSpec(64, 30e-6))
    with pytest.raises(PlaneError):
        BiphotonKernel(real, crystal, wl)


def test_pump_lookup_extent():
    kern = small_kernel()
    with pytest.raises(ExtentError):
        kern.pump_at(np.array([1e9, 0.0]))
    ext = small_kernel(zero_extend=True)
    assert ext.pump_at(np.array([1e9, 0.0])) == 0


def test_biphoton_amplitude_formula():
    kern = small_kernel()
    ks = np.array([BBO_RING, 1e3])
    ki = np.array([-BBO_RING, 2e3])
    arg = 0.5 * kern.crystal.length * kern.delta_k(ks, ki)
    expected = (kern.pump_at(ks + ki) * kern.crystal.length * math.sin(arg) / arg
                * np.exp(1j * arg))
    assert biphoton_amplitude(ks, ki, kern) == pytest.approx(expected, rel=1e-12)
    no_phase = small_kernel(include_global_phase=False)
    assert abs(biphoton_amplitude(ks, ki, no_phase)) == pytest.approx(abs(expected))


def test_angular_spectrum_is_annular():
    rs = signal_angular_spectrum(small_kernel(ModeSpec.gaussian(50e-6)), signal_grid())
    assert rs.plane == "k"
    assert np.all(rs.values >= 0)
    assert ring_radius(rs, 64) == pytest.approx(BBO_RING, rel=0.03)


def test_degenerate_signal_idler_symmetry():
    kern = small_kernel()
    rs = signal_angular_spectrum(kern, signal_grid()).values
    ri = signal_angular_spectrum(kern, signal_grid(), labels="idler").values
    assert rs.sum() == pytest.approx(ri.sum(), rel=1e-10)


def test_global_phase_leaves_spectrum_unchanged():
    a = signal_angular_spectrum(small_kernel(include_global_phase=True), signal_grid())
    b = signal_angular_spectrum(small_kernel(include_global_phase=False), signal_grid())
    assert np.array_equal(a.values, b.values)


def test_point_evaluation_matches_grid():
    kern = small_kernel()
    grid = signal_grid()
    rs = signal_angular_spectrum(kern, grid).values
    c = grid.coords()
    pts = np.array([[c[40], c[20]], [c[5], c[33]]])
    vals = signal_intensity_at(kern, pts)
    assert vals == pytest.approx([rs[20, 40], rs[33, 5]], rel=1e-12)


def test_rotation_invariance_on_ring():
    kern = small_kernel(ModeSpec.nov(2, 50e-6))
    phi = np.linspace(0, 2 * math.pi, 36, endpoint=False)
    pts = np.stack([BBO_RING * np.cos(phi), BBO_RING * np.sin(phi)], -1)
    vals = signal_intensity_at(kern, pts)
    assert np.std(vals) / np.mean(vals) < 0.01


def test_grid_checks():
    kern = small_kernel()
    with pytest.raises(ExtentError):
        signal_angular_spectrum(kern, GridSpec(64, BBO_RING / 32))
    coarse = BiphotonKernel(to_kspace(sample(normalized(ModeSpec.gaussian(50e-6)),
                                             GridSpec(64, 30e-6))), *bbo_like())
    with pytest.raises(ResolutionError):
        signal_angular_spectrum(coarse, signal_grid())
