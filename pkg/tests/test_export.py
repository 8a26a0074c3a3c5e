import math

import numpy as np

from twistlab._grid import GridSpec
from twistlab.export import (fmt, read_pgm, write_csv, write_density_matrix,
                             write_intensity_pgm, write_phase_pgm)
from twistlab.fieldgrid import IntensityMap, sample
from twistlab.modes import ModeSpec
from twistlab.projection import bell_density_matrix


def test_fmt():
    assert fmt(3) == "3"
    assert fmt(0.1) == "0.1"
    assert fmt(float("nan")) == "nan"
    assert fmt(1 / 3) == "0.333333333333"


def test_intensity_pgm_roundtrip(tmp_path):
    field = sample(ModeSpec.nov(2, 1e-3), GridSpec(128, 4e-5))
    path = tmp_path / "mode.pgm"
    write_intensity_pgm(path, field)
    data, maxval = read_pgm(path)
    assert maxval == 65535 and data.shape == (128, 128)
    inten = np.abs(field.values) ** 2
    assert data.max() == 65535
    assert np.max(np.abs(data / 65535.0 - inten / inten.max())) <= 0.5 / 65535 + 1e-12
    side = (tmp_path / "mode.pgm.txt").read_text().splitlines()
    assert side == ["n = 128", "dx = 4e-05", "plane_tag = real"]


def test_kspace_sidecar_has_wavelength(tmp_path):
    m = IntensityMap(np.ones((64, 64)), GridSpec(64, 100.0), "k", 810e-9)
    write_intensity_pgm(tmp_path / "k.pgm", m)
    assert "wavelength = 8.1e-07" in (tmp_path / "k.pgm.txt").read_text()


def test_phase_pgm_levels(tmp_path):
    phase = ((np.arange(64) + 0.125) * 2 * math.pi / 64)[None, :].repeat(64, 0)
    write_phase_pgm(tmp_path / "p.pgm", phase)
    data, maxval = read_pgm(tmp_path / "p.pgm")
    assert maxval == 255
    assert np.array_equal(data[0], (4 * np.arange(64)).astype(np.uint8))


def test_csv_and_density_matrix(tmp_path):
    write_csv(tmp_path / "t.csv", ("a", "b"), [(1, 0.5), ("x", 2.0)])
    assert (tmp_path / "t.csv").read_text() == "a,b\n1,0.5\nx,2\n"
    rho = bell_density_matrix(1, 1)
    write_density_matrix(tmp_path / "rho.txt", rho, 1.0, "bell")
    text = (tmp_path / "rho.txt").read_text()
    assert text.startswith("dim = 4\nreal =\n0 0 0 0\n0 0.5 0.5 0\n")
    assert "fidelity = 1\n" in text and text.endswith("target = bell\n")
