"""The invariant suite behind ``twistlab validate`` (fast checks only; the
full run is exercised through the command line by the acceptance tests)."""
import pytest

from twistlab import validation as v


@pytest.mark.parametrize("check", [
    v.check_j_recurrence, v.check_i_recurrence, v.check_j_integral, v.check_sinc_shape,
    v.check_separability, v.check_conjugation, v.check_parseval, v.check_linearity,
    v.check_pov_ring_law, v.check_paraxial, v.check_density_matrices,
    v.check_cli_determinism,
])
def test_fast_checks_pass(check):
    result = check()
    assert result.passed, result


def test_ring_checks_share_samples():
    rings = v._nov_rings()
    assert v.check_nov_scaling(rings).passed
    assert v.check_ring_law(rings).passed


def test_check_result_comparison():
    assert v._le("a", "m", 0.5, 1.0).passed
    assert not v._le("a", "m", 2.0, 1.0).passed
    assert not v._le("a", "m", float("inf"), 1.0).passed
