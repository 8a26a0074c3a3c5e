"""Scenario runners behind the command line. Each ``prepare_*`` builds every
model object from a RunConfig (so all precondition failures surface before
any heavy computation) and each ``run_*`` writes artifacts into ``out`` and
returns their file names."""
import logging
import math
import os

import numpy as np

from . import export, validation
from ._grid import GridSpec
from .errors import ConfigError, ShapeError, TwistlabError
from .fieldgrid import profile_fwhm, radial_profile, ring_radius, sample, to_kspace
from .modes import (Family, ModeSpec, PovOptics, mode_extent, normalized,
                    pov_params_from_optics, synthesize_hologram)
from .projection import (FiberSpec, ProjectionSpec, QuadratureSpec, bell_amplitudes,
                         bell_density_matrix, bell_target, fiber_rates, fidelity,
                         oam_spectrum, schmidt_number)
from .spdc import (PRESETS, BiphotonKernel, CrystalSpec, PhaseMatching,
                   WavelengthTriple, signal_angular_spectrum)

log = logging.getLogger("twistlab")


class _Collector:
    """Gathers precondition failures so they are reported together."""

    def __init__(self):
        self.errors = []

    def __call__(self, label, fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except TwistlabError as exc:
            self.errors.append(f"{label}: {exc}")
            return None

    def raise_if_any(self):
        if self.errors:
            raise ConfigError("; ".join(self.errors))


def _grid_check(col, label, spec, grid):
    if spec is None or grid is None:
        return
    limit = grid.n * grid.dx / 4.0
    extent = mode_extent(spec)
    if extent > limit:
        col.errors.append(
            f"{label}: mode extent {extent:.4g} m exceeds grid_n*grid_dx/4 = {limit:.4g} m")


def _crystal(cfg, col):
    name = cfg["crystal"]
    lp = cfg["lambda_p"]
    ls = cfg["lambda_s"]
    if name == "custom":
        period = cfg["poling_period"] or None
        crystal = col("crystal", CrystalSpec, cfg["crystal_length"], cfg["n_p"], cfg["n_s"],
                      cfg["n_i"], period, cfg["mismatch_model"])
        wl = col("lambda_s", WavelengthTriple, lp, ls or 2.0 * lp)
        return crystal, wl
    if ls and abs(ls - 2.0 * lp) > 1e-12 * ls:
        col.errors.append(f"lambda_s: the {name} preset is degenerate (lambda_s = 2 lambda_p)")
    for key in ("n_p", "n_s", "n_i", "poling_period"):
        if cfg[key]:
            col.errors.append(f"{key}: only used with crystal = custom")
    kwargs = {"lambda_p": lp, "mismatch": cfg["mismatch_model"]}
    if cfg["crystal_length"]:
        kwargs["length"] = cfg["crystal_length"]
    result = col("crystal", PRESETS[name], **kwargs)
    return result if result is not None else (None, None)


def _pump_grid(cfg, col):
    return col("pump_grid", GridSpec, cfg["pump_grid_n"], cfg["pump_grid_dx"])


# -- modes-render ----------------------------------------------------------

def prepare_modes_render(cfg):
    col = _Collector()
    grid = col("grid", GridSpec, cfg["grid_n"], cfg["grid_dx"])
    jobs = []
    for fam in cfg["family"]:
        ells = (0,) if fam == "gaussian" else cfg["ell"]
        for ell in ells:
            label = f"{fam} ell={ell}"
            if fam == "gaussian":
                spec = col(label, ModeSpec.gaussian, cfg["w"])
            elif fam == "nov":
                spec = col(label, ModeSpec.nov, ell, cfg["w"])
            elif fam == "bg":
                spec = col(label, ModeSpec.bg, ell, cfg["k_r"], cfg["w"])
            else:
                spec = col(label, ModeSpec.pov, ell, cfg["r_r"], cfg["w_o"])
            _grid_check(col, label, spec, grid)
            jobs.append((fam, ell, spec))
    col.raise_if_any()
    return grid, jobs


def run_modes_render(cfg, out):
    grid, jobs = prepare_modes_render(cfg)
    artifacts = []
    rows = []
    first = {}
    for fam, ell, spec in jobs:
        field = sample(normalized(spec), grid)
        name = f"{fam}_l{ell}.pgm"
        export.write_intensity_pgm(os.path.join(out, name), field)
        artifacts += [name, name + ".txt"]
        try:
            radius = ring_radius(field, cfg["n_bins"])
        except ShapeError:
            radius = math.nan
        first.setdefault(fam, radius)
        rows.append((fam, ell, radius, radius / first[fam]))
        log.info("%s ell=%d ring radius %.6g m", fam, ell, radius)
    export.write_csv(os.path.join(out, "ring_radii.csv"),
                     ("family", "ell", "ring_radius_m", "ratio_to_first"), rows)
    return artifacts + ["ring_radii.csv"]


# -- hologram --------------------------------------------------------------

def prepare_hologram(cfg):
    col = _Collector()
    grid = col("grid", GridSpec, cfg["grid_n"], cfg["grid_dx"])
    if grid is not None:
        for ell in cfg["ell"]:
            col(f"ell={ell}", synthesize_hologram, ell, cfg["grating_period"], cfg["k_r"],
                GridSpec(64, grid.dx))
    col.raise_if_any()
    return grid


def run_hologram(cfg, out):
    grid = prepare_hologram(cfg)
    artifacts = []
    for ell in cfg["ell"]:
        phase = synthesize_hologram(ell, cfg["grating_period"], cfg["k_r"], grid)
        name = f"hologram_l{ell}.pgm"
        path = os.path.join(out, name)
        export.write_phase_pgm(path, phase)
        export.write_sidecar(path, [("n", grid.n), ("dx", grid.dx), ("ell", ell),
                                    ("grating_period", cfg["grating_period"]),
                                    ("k_r", cfg["k_r"])])
        artifacts += [name, name + ".txt"]
    return artifacts


# -- spdc-spectrum ---------------------------------------------------------

def prepare_spdc_spectrum(cfg):
    col = _Collector()
    crystal, wl = _crystal(cfg, col)
    pgrid = _pump_grid(cfg, col)
    jobs = []
    for fam in cfg["pump_family"]:
        ells = (0,) if fam == "gaussian" else cfg["ell"]
        for ell in ells:
            label = f"{fam} ell={ell}"
            if fam == "gaussian":
                spec = col(label, ModeSpec.gaussian, cfg["pump_w"])
            elif fam == "nov":
                spec = col(label, ModeSpec.nov, ell, cfg["pump_w"])
            else:
                spec = col(label, ModeSpec.pov, ell, cfg["pov_r_r"], cfg["pov_w_o"])
            _grid_check(col, label, spec, pgrid)
            jobs.append((fam, ell, spec))
    sgrid = None
    ring = None
    if crystal is not None and wl is not None:
        ring = PhaseMatching(crystal, wl).ring_radius()
        half = cfg["signal_half_width"]
        if not half:
            if ring is None:
                col.errors.append("signal_half_width: no phase-matching ring; set it explicitly")
            else:
                half = cfg["signal_margin"] * ring
        if half:
            n = cfg["signal_grid_n"]
            sgrid = col("signal_grid", GridSpec, n, half / (n // 2))
    col.raise_if_any()
    return crystal, wl, pgrid, sgrid, ring, jobs


def run_spdc_spectrum(cfg, out):
    crystal, wl, pgrid, sgrid, ring, jobs = prepare_spdc_spectrum(cfg)
    artifacts = []
    rows = []
    for fam, ell, spec in jobs:
        pump = to_kspace(sample(normalized(spec), pgrid, wl.lambda_p))
        rs = signal_angular_spectrum(BiphotonKernel(pump, crystal, wl), sgrid)
        stem = f"spectrum_{fam}_l{ell}"
        export.write_intensity_pgm(os.path.join(out, stem + ".pgm"), rs)
        radii, prof = radial_profile(rs, cfg["n_bins"])
        export.write_csv(os.path.join(out, stem + ".csv"), ("r_k[rad/m]", "intensity[arb]"),
                         zip(radii, prof))
        try:
            radius = ring_radius(rs, cfg["n_bins"])
            width = profile_fwhm(radii, prof)
        except ShapeError:
            radius = width = math.nan
        rows.append((fam, ell, radius, width, math.nan if ring is None else ring))
        artifacts += [stem + ".pgm", stem + ".pgm.txt", stem + ".csv"]
        log.info("%s ell=%d ring %.6g rad/m fwhm %.6g rad/m", fam, ell, radius, width)
    export.write_csv(os.path.join(out, "spectrum_summary.csv"),
                     ("pump_family", "ell", "ring_radius_k", "annulus_fwhm_k",
                      "phase_matching_ring_k"), rows)
    return artifacts + ["spectrum_summary.csv"]


# -- coincidence-sweep -----------------------------------------------------

def prepare_coincidence_sweep(cfg):
    col = _Collector()
    crystal, wl = _crystal(cfg, col)
    pgrid = _pump_grid(cfg, col)
    optics = col("optics", PovOptics.from_wavelength, cfg["fourier_focal_length"],
                 cfg["lambda_p"], cfg["slm_waist"])
    w_o = pov_params_from_optics(optics)[0] if optics is not None else None
    jobs = []
    if w_o is not None:
        for ell in cfg["ell"]:
            for fam in cfg["pump_family"]:
                label = f"{fam} ell={ell}"
                if fam == "nov":
                    spec = col(label, ModeSpec.nov, ell, w_o)
                else:
                    spec = col(label, ModeSpec.pov, ell, cfg["pov_r_r"], w_o, cfg["slm_waist"])
                _grid_check(col, label, spec, pgrid)
                jobs.append((ell, fam, spec))
    xi_i = xi_s = quad = None
    if wl is not None:
        xi_i = col("fiber_mfd", FiberSpec.from_coupler, cfg["fiber_mfd"],
                   cfg["coupler_focal_length"], wl.lambda_i, cfg["relay_magnification"])
        xi_s = col("signal_bucket_radius", FiberSpec, cfg["signal_bucket_radius"])
        quad = col("quad", QuadratureSpec, cfg["quad_n"], cfg["quad_span"])
    col.raise_if_any()
    m = PhaseMatching(crystal, wl)
    d = cfg["center_offset"]
    centers = ((d, 0.0), (-d * m.k_i / m.k_s, 0.0))
    return crystal, wl, pgrid, jobs, xi_s, xi_i, quad, centers


def run_coincidence_sweep(cfg, out):
    crystal, wl, pgrid, jobs, xi_s, xi_i, quad, centers = prepare_coincidence_sweep(cfg)
    rows = []
    for ell, fam, spec in jobs:
        pump = to_kspace(sample(normalized(spec), pgrid, wl.lambda_p))
        kernel = BiphotonKernel(pump, crystal, wl)
        rates = fiber_rates(kernel, xi_s, xi_i, centers, quad, cfg["signal_collection"])
        rows.append((ell, fam, rates.coincidence, rates.singles, rates.efficiency))
        log.info("%s ell=%d C=%.6g S=%.6g eta=%.4f", fam, ell, rates.coincidence,
                 rates.singles, rates.efficiency)
    export.write_csv(os.path.join(out, "coincidence_sweep.csv"),
                     ("ell", "pump_family", "coincidence_arb", "singles_idler_arb",
                      "heralding_efficiency"), rows)
    return ["coincidence_sweep.csv"]


# -- oam-spectrum and bell -------------------------------------------------

def projection_waist(cfg):
    """Configured projection waist, or the fiber mode imaged through the coupler."""
    if cfg["projection_w"]:
        return cfg["projection_w"]
    return FiberSpec.from_coupler(cfg["fiber_mfd"], cfg["coupler_focal_length"],
                                  cfg["lambda_s"]).a


def prepare_oam_spectrum(cfg):
    col = _Collector()
    pumps = [col(f"pump ell={ell}", ModeSpec.pov, ell, cfg["pov_r_r"], cfg["pov_w_o"])
             for ell in cfg["pump_ell"]]
    w = projection_waist(cfg)
    for fam in cfg["projection_family"]:
        col(f"projection {fam}", ProjectionSpec, fam, 0, w,
            cfg["projection_k_r"] if fam == "bg" else None)
    col.raise_if_any()
    return pumps, w


def run_oam_spectrum(cfg, out):
    pumps, w = prepare_oam_spectrum(cfg)
    artifacts = []
    rows = []
    for pump in pumps:
        for fam in cfg["projection_family"]:
            k_r = cfg["projection_k_r"] if fam == "bg" else None
            spec = oam_spectrum(pump, fam, cfg["ell_max"], w, k_r)
            name = f"oam_spectrum_{fam}_lp{pump.ell}.csv"
            export.write_csv(os.path.join(out, name), ("ell_i", "prob"),
                             zip(spec.ells, spec.probs))
            k = schmidt_number(spec)
            rows.append((pump.ell, fam, k))
            artifacts.append(name)
            log.info("pump ell=%d %s projection: K = %.4f", pump.ell, fam, k)
    export.write_csv(os.path.join(out, "schmidt.csv"),
                     ("pump_ell", "projection_family", "schmidt_number"), rows)
    return artifacts + ["schmidt.csv"]


def prepare_bell(cfg):
    col = _Collector()
    pump = col("pump", ModeSpec.pov, cfg["pump_ell"], cfg["pov_r_r"], cfg["pov_w_o"])
    if cfg["ell_s"] + cfg["ell_i"] != cfg["pump_ell"]:
        col.errors.append("ell_s, ell_i: ell_s + ell_i must equal pump_ell")
    if cfg["ell_s"] == cfg["ell_i"]:
        col.errors.append("ell_s, ell_i: must differ to span a two-dimensional subspace")
    col.raise_if_any()
    return pump


def run_bell(cfg, out):
    pump = prepare_bell(cfg)
    fam = cfg["projection_family"]
    k_r = cfg["projection_k_r"] if fam == "bg" else None
    c1, c2 = bell_amplitudes(pump, cfg["ell_s"], cfg["ell_i"], fam, projection_waist(cfg),
                             k_r, cfg["arm_asymmetry"])
    rho = bell_density_matrix(c1, c2, cfg["noise"])
    fid = fidelity(rho, bell_target())
    label = (f"(|{cfg['ell_s']},{cfg['ell_i']}> + |{cfg['ell_i']},{cfg['ell_s']}>)/sqrt(2)")
    basis = (f"|ls,ls>, |ls,li>, |li,ls>, |li,li> with ls={cfg['ell_s']}, li={cfg['ell_i']}")
    export.write_density_matrix(os.path.join(out, "density_matrix.txt"), rho, fid, label,
                                extra=[("basis", basis)])
    log.info("Bell fidelity %.12f", fid)
    return ["density_matrix.txt"]


# -- validate --------------------------------------------------------------

def run_validate(cfg, out):
    results = validation.run_all()
    export.write_csv(os.path.join(out, "validate.csv"),
                     ("check", "module", "passed", "value", "tolerance"),
                     [(r.name, r.module, "pass" if r.passed else "FAIL", r.value, r.tolerance)
                      for r in results])
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.module:<10} {r.name:<{width}}  "
              f"value={export.fmt(r.value)} tol={export.fmt(r.tolerance)}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} invariants passed")
    return ["validate.csv"], failed == 0


RUNNERS = {
    "modes-render": run_modes_render,
    "hologram": run_hologram,
    "spdc-spectrum": run_spdc_spectrum,
    "coincidence-sweep": run_coincidence_sweep,
    "oam-spectrum": run_oam_spectrum,
    "bell": run_bell,
    "validate": run_validate,
}
