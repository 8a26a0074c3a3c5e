import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistlab._grid import GridSpec
from twistlab.errors import (DegenerateStateError, ExtentError, PreconditionError,
                             ShapeError, SpecError, TruncationError)
from twistlab.fieldgrid import sample, to_kspace
from twistlab.modes import ModeSpec, normalized
from twistlab.projection import (BELL_BASIS, DensityMatrix, FiberSpec, ProjectionSpec,
                                 QuadratureSpec, RadialQuadrature, bell_amplitudes,
                                 bell_density_matrix, bell_target, coincidence_rate,
                                 fiber_mode, fiber_rates, fidelity, heralding_efficiency,
                                 oam_overlap_amplitude, oam_overlap_bruteforce,
                                 oam_spectrum, schmidt_number, singles_rate)
from twistlab.spdc import BiphotonKernel, ppktp_like

W = 206e-6
POV = ModeSpec.pov(1, 90e-6, 40e-6)


def test_fiber_from_coupler():
    fib = FiberSpec.from_coupler(5e-6, 2e-3, 810e-9, 2.0)
    assert fib.a == pytest.approx(2.0 * 810e-9 * 2e-3 / (math.pi * 2.5e-6))
    with pytest.raises(SpecError):
        FiberSpec(0.0)


def test_fiber_mode_normalised():
    fib = FiberSpec(1e-4)
    k = np.linspace(-8 / fib.a, 8 / fib.a, 801)
    kx, ky = np.meshgrid(k, k)
    xi = fiber_mode(fib, np.stack([kx, ky], -1))
    assert np.sum(np.abs(xi) ** 2) * (k[1] - k[0]) ** 2 == pytest.approx(1.0, rel=1e-8)


def test_quadrature_span_limit():
    with pytest.raises(ExtentError):
        QuadratureSpec(64, 3.0)


def _fiber_setup(spec):
    crystal, wl = ppktp_like()
    pump = to_kspace(sample(normalized(spec), GridSpec(256, 20e-6)))
    kern = BiphotonKernel(pump, crystal, wl)
    return kern, FiberSpec(50e-6), FiberSpec.from_coupler(5e-6, 2e-3, wl.lambda_i, 2.0)


def test_fiber_rates_consistency():
    kern, xs, xi = _fiber_setup(ModeSpec.nov(2, 97e-6))
    centers = ((0.0, 0.0), (0.0, 0.0))
    quad = QuadratureSpec(32)
    rates = fiber_rates(kern, xs, xi, centers, quad)
    assert 0 < rates.coincidence <= rates.singles
    assert rates.efficiency == pytest.approx(rates.coincidence / rates.singles)
    assert coincidence_rate(kern, xs, xi, centers, quad) == rates.coincidence
    assert singles_rate(kern, xi, centers[1], quad) == pytest.approx(rates.singles, rel=1e-12)
    assert heralding_efficiency(kern, xs, xi, centers, quad) == rates.efficiency
    smf = fiber_rates(kern, xs, xi, centers, quad, signal="smf")
    assert 0 <= smf.efficiency <= 1
    with pytest.raises(SpecError):
        fiber_rates(kern, xs, xi, centers, quad, signal="bucket")


def test_selection_rule_exact_zero():
    pump = normalized(POV)
    for ls in range(-3, 5):
        for li in range(-3, 5):
            c = oam_overlap_amplitude(pump, ProjectionSpec("lg", ls, W),
                                      ProjectionSpec("lg", li, W))
            if ls + li != 1:
                assert c == 0j
            else:
                assert abs(c) > 0


def test_bruteforce_agrees_with_radial_route():
    pump = normalized(POV)
    sig, idl = ProjectionSpec("lg", 0, W), ProjectionSpec("lg", 1, W)
    fast = oam_overlap_amplitude(pump, sig, idl)
    slow = oam_overlap_bruteforce(pump, sig, idl, GridSpec(512, 4e-6))
    assert abs(fast - slow) < 1e-6 * abs(fast)


@settings(max_examples=15, deadline=None)
@given(a=st.integers(-6, 7))
def test_exchange_symmetry(a):
    pump = normalized(POV)
    b = POV.ell - a
    c_ab = oam_overlap_amplitude(pump, ProjectionSpec("bg", a, W, 2e4),
                                 ProjectionSpec("bg", b, W, 2e4))
    c_ba = oam_overlap_amplitude(pump, ProjectionSpec("bg", b, W, 2e4),
                                 ProjectionSpec("bg", a, W, 2e4))
    assert c_ab == c_ba


def test_overlap_requires_normalised_pump():
    with pytest.raises(PreconditionError):
        oam_overlap_amplitude(POV, ProjectionSpec("lg", 0, W), ProjectionSpec("lg", 1, W))


def test_radial_quadrature_limits():
    with pytest.raises(SpecError):
        RadialQuadrature(nodes=1024)
    with pytest.raises(SpecError):
        RadialQuadrature(extent_factor=3.0)


def test_spectrum_properties():
    spec = oam_spectrum(POV, "lg", 20, W)
    p = np.asarray(spec.probs)
    assert p.sum() == pytest.approx(1.0, abs=1e-12)
    assert spec.ells == tuple(range(-20, 21))
    k = schmidt_number(spec)
    assert 1.0 <= k <= len(p)
    # mirror symmetry of the l_p = 1 spectrum about l_i = 1/2
    assert p[spec.ells.index(0)] == pytest.approx(p[spec.ells.index(1)], rel=1e-10)


def test_spectrum_window_checks():
    with pytest.raises(SpecError):
        oam_spectrum(POV, "lg", 5, W)
    with pytest.raises(TruncationError):
        oam_spectrum(POV, "bg", 10, W, 1e5)


def test_schmidt_ordering_small():
    k = {(lp, fam): schmidt_number(oam_spectrum(ModeSpec.pov(lp, 90e-6, 40e-6), fam, 40, W,
                                                2e4 if fam == "bg" else None))
         for lp in (0, 1) for fam in ("lg", "bg")}
    assert k[0, "bg"] > k[0, "lg"] and k[1, "bg"] > k[1, "lg"]
    assert k[1, "lg"] > k[0, "lg"] and k[1, "bg"] > k[0, "bg"]


def test_density_matrix_invariants():
    with pytest.raises(ShapeError):
        DensityMatrix(np.eye(3)[:2])
    with pytest.raises(PreconditionError):
        DensityMatrix(np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(PreconditionError):
        DensityMatrix(np.eye(2))
    with pytest.raises(PreconditionError):
        DensityMatrix(np.diag([1.5, -0.5]))
    rho = DensityMatrix(np.eye(2) / 2)
    with pytest.raises(ValueError):
        rho.entries[0, 0] = 1.0


@settings(max_examples=50, deadline=None)
@given(re1=st.floats(-3, 3), im1=st.floats(-3, 3), re2=st.floats(-3, 3),
       im2=st.floats(-3, 3), p=st.floats(0, 1))
def test_bell_density_matrix_valid(re1, im1, re2, im2, p):
    c1, c2 = complex(re1, im1), complex(re2, im2)
    if abs(c1) ** 2 + abs(c2) ** 2 == 0:
        with pytest.raises(DegenerateStateError):
            bell_density_matrix(c1, c2, p)
        return
    rho = bell_density_matrix(c1, c2, p)
    e = rho.entries
    assert rho.dim == 4
    assert np.allclose(e, e.conj().T, atol=1e-15)
    assert abs(np.trace(e) - 1) < 1e-12
    assert np.linalg.eigvalsh(e).min() > -1e-12
    f = fidelity(rho, bell_target())
    assert 0.0 <= f <= 1.0


def test_bell_fidelity_values():
    assert fidelity(bell_density_matrix(1.0, 1.0), bell_target()) == pytest.approx(1.0, abs=1e-12)
    assert fidelity(bell_density_matrix(1.0, 1.0, 1.0), bell_target()) == 0.25
    assert fidelity(bell_density_matrix(1.0, 0.0), bell_target()) == pytest.approx(0.5)
    assert len(BELL_BASIS) == 4
    with pytest.raises(ShapeError):
        fidelity(bell_density_matrix(1, 1), np.ones(2) / math.sqrt(2))
    with pytest.raises(SpecError):
        bell_density_matrix(1, 1, 1.5)


def test_bell_amplitudes_symmetric_arms():
    c1, c2 = bell_amplitudes(POV, 0, 1, "lg", W)
    assert c1 == c2
    a1, a2 = bell_amplitudes(POV, 0, 1, "lg", W, arm_asymmetry=1.5)
    assert abs(a1) != pytest.approx(abs(a2))
    with pytest.raises(SpecError):
        bell_amplitudes(POV, 0, 0, "lg", W)
