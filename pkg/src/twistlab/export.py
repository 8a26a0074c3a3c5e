"""File writers: graymaps with metadata sidecars, CSV tables and the
density-matrix text format. All writers produce byte-identical output for
identical inputs."""
import math

import numpy as np


def fmt(x):
    """Stable text form of a number for CSV output."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def write_csv(path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def sidecar_path(path):
    return str(path) + ".txt"


def write_sidecar(path, items):
    with open(sidecar_path(path), "w", newline="\n") as fh:
        for key, value in items:
            fh.write(f"{key} = {value if isinstance(value, str) else fmt(value)}\n")


def write_intensity_pgm(path, field):
    """16-bit binary graymap (P5, maxval 65535) of |E|^2 or an intensity map.

    Intensity is mapped linearly from [0, max] to [0, 65535]; a sidecar
    records n, dx, plane and wavelength (k-space only).
    """
    inten = field.intensity()
    vals = np.asarray(inten.values, dtype=float)
    peak = vals.max()
    scaled = np.zeros(vals.shape) if peak <= 0 else vals / peak * 65535.0
    data = np.clip(np.rint(scaled), 0, 65535).astype(">u2")
    n = inten.grid.n
    with open(path, "wb") as fh:
        fh.write(f"P5\n{n} {n}\n65535\n".encode("ascii"))
        fh.write(data.tobytes())
    items = [("n", n), ("dx", inten.grid.dx), ("plane_tag", inten.plane)]
    if inten.plane == "k" and inten.wavelength is not None:
        items.append(("wavelength", inten.wavelength))
    write_sidecar(path, items)


def write_phase_pgm(path, phase):
    """8-bit binary graymap of a phase in [0, 2 pi) mapped linearly to [0, 255]."""
    phase = np.asarray(phase, dtype=float)
    levels = np.floor(phase / (2.0 * math.pi) * 256.0)
    data = np.clip(levels, 0, 255).astype(np.uint8)
    ny, nx = data.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{nx} {ny}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path):
    """Read a binary P5 graymap written by this module (8 or 16 bit)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary graymap")
    nx, ny = (int(v) for v in parts[1].split())
    maxval = int(parts[2])
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    return np.frombuffer(parts[3], dtype=dtype).reshape(ny, nx), maxval


def write_density_matrix(path, rho, fid, target_label, extra=()):
    """Structured text: dim, row-major real and imaginary parts, fidelity, target."""
    e = rho.entries
    with open(path, "w", newline="\n") as fh:
        for key, value in extra:
            fh.write(f"{key} = {value if isinstance(value, str) else fmt(value)}\n")
        fh.write(f"dim = {rho.dim}\n")
        fh.write("real =\n")
        for row in e.real:
            fh.write(" ".join(fmt(v + 0.0) for v in row) + "\n")
        fh.write("imag =\n")
        for row in e.imag:
            fh.write(" ".join(fmt(v + 0.0) for v in row) + "\n")
        fh.write(f"fidelity = {fmt(fid)}\n")
        fh.write(f"target = {target_label}\n")
