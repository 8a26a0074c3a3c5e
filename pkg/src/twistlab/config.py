"""Flat ``key = value`` run configuration with per-scenario schemas.

Lines hold one key each; ``#`` starts a comment. Command-line overrides
replace file values. Every problem found (unknown key, bad type, failed
constraint) is collected and reported together in one ConfigError.
"""
import hashlib
import os
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable, Dict, Optional

from .errors import ConfigError

SCENARIOS = ("modes-render", "hologram", "spdc-spectrum", "coincidence-sweep",
             "oam-spectrum", "bell", "validate")


def _parse_int(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _parse_float(text):
    text = text.strip()
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"expected a number, got {text!r}") from None


def _parse_int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            lo, hi = _parse_int(lo), _parse_int(hi)
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        elif part:
            out.append(_parse_int(part))
    if not out:
        raise ValueError("expected at least one integer")
    return tuple(out)


def _choice(*options):
    def parse(text):
        text = text.strip().lower()
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {text!r}")
        return text
    parse.options = options
    return parse


def _choice_list(*options):
    single = _choice(*options)

    def parse(text):
        items = tuple(single(p) for p in text.split(",") if p.strip())
        if not items:
            raise ValueError("expected at least one value")
        return items
    parse.options = options
    return parse


def _parse_str(text):
    return text.strip()


@dataclass(frozen=True)
class Key:
    parse: Callable[[str], Any]
    default: Optional[str]
    check: Optional[Callable[[Any], bool]] = None
    expect: str = ""


def _positive(v):
    return v > 0


def _nonneg(v):
    return v >= 0


def _pow2(v):
    return v >= 64 and v & (v - 1) == 0


def _unit(v):
    return 0.0 <= v <= 1.0


POS = "a positive number"
POW2 = "a power of two >= 64"

_CRYSTAL = {
    "crystal": Key(_choice("bbo-like", "ppktp-like", "custom"), "bbo-like"),
    "crystal_length": Key(_parse_float, "0", _nonneg, "a length in m (0 = preset default)"),
    "n_p": Key(_parse_float, "0", _nonneg, "a refractive index (custom crystal)"),
    "n_s": Key(_parse_float, "0", _nonneg, "a refractive index (custom crystal)"),
    "n_i": Key(_parse_float, "0", _nonneg, "a refractive index (custom crystal)"),
    "poling_period": Key(_parse_float, "0", _nonneg,
                         "a length in m (0 = unpoled, custom crystal only)"),
    "mismatch_model": Key(_choice("exact", "paraxial"), "exact"),
    "lambda_p": Key(_parse_float, "405e-9", _positive, POS),
    "lambda_s": Key(_parse_float, "0", _nonneg, "a wavelength in m (0 = degenerate)"),
}

_COMMON = {
    "scenario": Key(_choice(*SCENARIOS), None),
    "out": Key(_parse_str, "out"),
}

SCHEMAS: Dict[str, Dict[str, Key]] = {
    "modes-render": {
        "family": Key(_choice_list("gaussian", "nov", "bg", "pov"), "nov,pov"),
        "ell": Key(_parse_int_list, "1,5,10,15,20,25"),
        "w": Key(_parse_float, "1e-3", _positive, POS),
        "k_r": Key(_parse_float, "2e4", _positive, POS),
        "r_r": Key(_parse_float, "1e-3", _positive, POS),
        "w_o": Key(_parse_float, "1e-4", _positive, POS),
        "grid_n": Key(_parse_int, "1024", _pow2, POW2),
        "grid_dx": Key(_parse_float, "16e-6", _positive, POS),
        "n_bins": Key(_parse_int, "512", lambda v: v >= 64, "an integer >= 64"),
    },
    "hologram": {
        "ell": Key(_parse_int_list, "1"),
        "grating_period": Key(_parse_float, "64e-6", _positive, POS),
        "k_r": Key(_parse_float, "0", _nonneg, "a non-negative number"),
        "grid_n": Key(_parse_int, "1024", _pow2, POW2),
        "grid_dx": Key(_parse_float, "8e-6", _positive, POS),
    },
    "spdc-spectrum": dict(_CRYSTAL, **{
        "pump_family": Key(_choice_list("gaussian", "nov", "pov"), "gaussian,nov,pov"),
        "ell": Key(_parse_int_list, "1,2,3"),
        "pump_w": Key(_parse_float, "50e-6", _positive, POS),
        "pov_r_r": Key(_parse_float, "500e-6", _positive, POS),
        "pov_w_o": Key(_parse_float, "50e-6", _positive, POS),
        "pump_grid_n": Key(_parse_int, "256", _pow2, POW2),
        "pump_grid_dx": Key(_parse_float, "20e-6", _positive, POS),
        "signal_grid_n": Key(_parse_int, "256", _pow2, POW2),
        "signal_margin": Key(_parse_float, "1.3", lambda v: v >= 1.25,
                             "a number >= 1.25 (grid half-width / ring radius)"),
        "signal_half_width": Key(_parse_float, "0", _nonneg,
                                 "rad/m (0 = signal_margin x ring radius)"),
        "n_bins": Key(_parse_int, "512", lambda v: v >= 64, "an integer >= 64"),
    }),
    "coincidence-sweep": dict(_CRYSTAL, **{
        "crystal": Key(_choice("bbo-like", "ppktp-like", "custom"), "ppktp-like"),
        "pump_family": Key(_choice_list("nov", "pov"), "nov,pov"),
        "ell": Key(_parse_int_list, "1..25"),
        "slm_waist": Key(_parse_float, "1e-3", _positive, POS),
        "fourier_focal_length": Key(_parse_float, "0.75", _positive, POS),
        "pov_r_r": Key(_parse_float, "300e-6", _positive, POS),
        "fiber_mfd": Key(_parse_float, "5e-6", _positive, POS),
        "coupler_focal_length": Key(_parse_float, "2e-3", _positive, POS),
        "relay_magnification": Key(_parse_float, "2", _positive, POS),
        "signal_collection": Key(_choice("mmf", "smf"), "mmf"),
        "signal_bucket_radius": Key(_parse_float, "50e-6", _positive, POS),
        "center_offset": Key(_parse_float, "0", _nonneg, "rad/m"),
        "pump_grid_n": Key(_parse_int, "512", _pow2, POW2),
        "pump_grid_dx": Key(_parse_float, "20e-6", _positive, POS),
        "quad_n": Key(_parse_int, "64", lambda v: v >= 8, "an integer >= 8"),
        "quad_span": Key(_parse_float, "4", lambda v: v >= 4, "a number >= 4 (units of 1/a)"),
    }),
    "oam-spectrum": {
        "pump_ell": Key(_parse_int_list, "0,1"),
        "pov_r_r": Key(_parse_float, "90e-6", _positive, POS),
        "pov_w_o": Key(_parse_float, "40e-6", _positive, POS),
        "projection_family": Key(_choice_list("lg", "bg"), "lg,bg"),
        "projection_w": Key(_parse_float, "0", _nonneg,
                            "a length in m (0 = fiber mode through the coupler)"),
        "projection_k_r": Key(_parse_float, "2e4", _positive, POS),
        "fiber_mfd": Key(_parse_float, "5e-6", _positive, POS),
        "coupler_focal_length": Key(_parse_float, "2e-3", _positive, POS),
        "lambda_s": Key(_parse_float, "810e-9", _positive, POS),
        "ell_max": Key(_parse_int, "40", lambda v: v >= 10, "an integer >= 10"),
    },
    "bell": {
        "pump_ell": Key(_parse_int, "1"),
        "ell_s": Key(_parse_int, "0"),
        "ell_i": Key(_parse_int, "1"),
        "pov_r_r": Key(_parse_float, "90e-6", _positive, POS),
        "pov_w_o": Key(_parse_float, "40e-6", _positive, POS),
        "projection_family": Key(_choice("lg", "bg"), "lg"),
        "projection_w": Key(_parse_float, "0", _nonneg,
                            "a length in m (0 = fiber mode through the coupler)"),
        "projection_k_r": Key(_parse_float, "2e4", _positive, POS),
        "fiber_mfd": Key(_parse_float, "5e-6", _positive, POS),
        "coupler_focal_length": Key(_parse_float, "2e-3", _positive, POS),
        "lambda_s": Key(_parse_float, "810e-9", _positive, POS),
        "noise": Key(_parse_float, "0", _unit, "a number in [0, 1]"),
        "arm_asymmetry": Key(_parse_float, "1", _positive, POS),
    },
    "validate": {},
}


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    values: Dict[str, Any]
    raw: Dict[str, str]

    def __getitem__(self, key):
        return self.values[key]

    @property
    def out(self):
        return self.values["out"]

    def canonical_text(self):
        """Scenario and every resolved key as sorted ``key = value`` lines."""
        lines = [f"scenario = {self.scenario}"]
        for key in sorted(self.raw):
            if key in ("scenario", "out"):
                continue
            lines.append(f"{key} = {self.raw[key]}")
        return "\n".join(lines) + "\n"

    def sha256(self):
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def read_config_file(path):
    """Parse a config file into an ordered {key: raw text} mapping."""
    if not os.path.exists(path):
        preset = resolve_preset(path)
        if preset is None:
            raise ConfigError(f"config file not found: {path}")
        text = preset
    else:
        with open(path) as fh:
            text = fh.read()
    pairs = {}
    errors = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected 'key = value', got {line!r}")
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in pairs:
            errors.append(f"line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    if errors:
        raise ConfigError("; ".join(errors))
    return pairs


def resolve_preset(name):
    """Text of a shipped preset (``fig6.cfg`` or ``fig6``), or None."""
    base = os.path.basename(name)
    if not base.endswith(".cfg"):
        base += ".cfg"
    try:
        return resources.files("twistlab.presets").joinpath(base).read_text()
    except (FileNotFoundError, ModuleNotFoundError):
        return None


def build_config(scenario, file_pairs=None, overrides=None):
    """Validate raw key/value text against the scenario schema."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {', '.join(SCENARIOS)}")
    raw = dict(file_pairs or {})
    raw.update(overrides or {})
    errors = []
    if "scenario" in raw and raw["scenario"].strip().lower() != scenario:
        errors.append(f"scenario: config file is for {raw['scenario']!r}, "
                      f"command line asks for {scenario!r}")
    schema = dict(_COMMON, **SCHEMAS[scenario])
    values = {}
    resolved = {}
    for key in raw:
        if key not in schema:
            errors.append(f"{key}: unknown key for scenario {scenario}")
    for key, spec in schema.items():
        if key == "scenario":
            continue
        text = raw.get(key, spec.default)
        if text is None:
            continue
        try:
            value = spec.parse(text)
        except ValueError as exc:
            errors.append(f"{key}: {exc}")
            continue
        if spec.check is not None and not spec.check(value):
            errors.append(f"{key}: expected {spec.expect}, got {text!r}")
            continue
        values[key] = value
        resolved[key] = text.strip()
    if errors:
        raise ConfigError("; ".join(errors))
    return RunConfig(scenario, values, resolved)


def parse_config(scenario, path=None, overrides=None):
    """RunConfig from an optional file plus ``{key: text}`` overrides."""
    pairs = read_config_file(path) if path else {}
    norm = {k.replace("-", "_"): v for k, v in (overrides or {}).items()}
    return build_config(scenario, pairs, norm)
