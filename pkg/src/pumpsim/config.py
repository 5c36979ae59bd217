"""Versioned plain-text configuration.

One INI-style file drives every command: materials, stack lay-up, drive
schedule, pump and load parameters, calibration anchors, and sweep
grids. Keys carry display units in their names (mm, GPa, ul/min, kPa,
nF, degrees); values are converted to SI exactly once, here.

The file must carry ``schema = 1`` in its [meta] section. Missing
sections and keys fall back to the built-in defaults below, except the
fitted pump/load keys whose absence means "not calibrated yet".
"""

import configparser
import hashlib
import io
import math
from dataclasses import dataclass

import numpy as np

from . import units
from .drive import PhaseSchedule
from .errors import ConfigError, NotCalibratedError
from .laminate import LaminateStack, Ply
from .power import LoadModel
from .pump import CalibrationSet, PumpParams

SCHEMA_VERSION = 1

# Structural defaults. Fitted keys (see _FITTED_KEYS) are deliberately
# absent: commands that need them fail with exit code 3 until
# `calibrate` writes them.
DEFAULTS = {
    "meta": {"schema": "1"},
    "material.pzt3203hd": {
        "e1_gpa": "62", "e2_gpa": "62", "g12_gpa": "23.7", "nu12": "0.31",
        "alpha1_ppm_per_k": "3.5", "alpha2_ppm_per_k": "3.5",
        "d31_pm_per_v": "-320",
    },
    "material.carbon_epoxy": {
        "e1_gpa": "231.2", "e2_gpa": "7.2", "g12_gpa": "4.3", "nu12": "0.29",
        "alpha1_ppm_per_k": "-1.58", "alpha2_ppm_per_k": "32.2",
        "d31_pm_per_v": "0",
    },
    "material.glass_epoxy": {
        "e1_gpa": "21.7", "e2_gpa": "21.7", "g12_gpa": "3.99", "nu12": "0.13",
        "alpha1_ppm_per_k": "14.2", "alpha2_ppm_per_k": "14.2",
        "d31_pm_per_v": "0",
    },
    "stack": {
        "plies": "glass_epoxy:0.09, pzt3203hd:0.10, carbon_epoxy:0.10, "
                 "glass_epoxy:0.09",
        "span_mm": "12", "width_mm": "4",
    },
    "actuator": {
        "beta_m_per_v": "0", "envelope_vpp": "160",
    },
    "schedule": {
        "vpp": "160", "frequency_hz": "60", "shape": "sine",
        "offsets_deg": "0, -120, -240",
    },
    "anchors": {
        "flow_vpp": "160", "flow_freq_hz": "60", "flow_dp_kpa": "0",
        "flow_ul_min": "900",
        "backpressure_vpp": "160", "backpressure_freq_hz": "60",
        "backpressure_kpa": "1.8",
        "dead_zone_vpp": "40", "peak_freq_hz": "60",
        "power_vpp": "160", "power_freq_hz": "60", "power_mw": "45",
    },
    "pump": {
        "chamber_area_mm2": "24", "shape_factor": "0.6666666666666666",
        "n_roll": "4", "seal_threshold": "0.5",
    },
    "load": {
        "c_eff_nf": "100", "r_e_ohm": "1000",
    },
    "sweeps": {
        "vpp_grid": "0:160:33", "freq_grid": "10:160:151",
        "dp_points": "25", "samples_per_period": "2000",
    },
}

_FITTED_KEYS = {
    "pump": ("v_threshold_vpp", "q_cal_ul_min", "p_max_cal_kpa", "f_c_hz",
             "anchor_vpp", "anchor_freq_hz"),
    "load": ("tan_delta",),
}

_SECTION_ORDER = (
    "meta", "stack", "actuator", "schedule", "anchors", "pump", "load", "sweeps",
)


def _known_keys(section):
    if section.startswith("material."):
        return set(DEFAULTS["material.pzt3203hd"])
    keys = set(DEFAULTS.get(section, ()))
    keys.update(_FITTED_KEYS.get(section, ()))
    return keys


def default_config():
    """Deep copy of the built-in default configuration."""
    return {s: dict(kv) for s, kv in DEFAULTS.items()}


def load_config(path=None):
    """Read a configuration file and merge it over the defaults.

    With ``path`` None the defaults are returned unchanged. Schema and
    key checks run before anything else; violations raise ConfigError.
    """
    cfg = default_config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}")

    if not parser.has_section("meta") or "schema" not in parser["meta"]:
        raise ConfigError(
            "config schema check failed: missing [meta] section with a "
            "'schema' key (expected schema = 1)"
        )
    schema = parser["meta"]["schema"].strip()
    if schema != str(SCHEMA_VERSION):
        raise ConfigError(
            f"config schema check failed: schema = {schema!r} is not "
            f"supported (this tool reads schema = {SCHEMA_VERSION})"
        )

    for section in parser.sections():
        if not (section in DEFAULTS or section in _FITTED_KEYS
                or section.startswith("material.")):
            raise ConfigError(f"unknown config section [{section}]")
        known = _known_keys(section)
        for key in parser[section]:
            if key not in known:
                raise ConfigError(
                    f"unknown key {key!r} in section [{section}] "
                    f"(known: {', '.join(sorted(known))})"
                )
        cfg.setdefault(section, {})
        cfg[section].update({k: v.strip() for k, v in parser[section].items()})
    return cfg


def apply_overrides(cfg, overrides):
    """Apply (section, key) -> value overrides (CLI flags win over file)."""
    out = {s: dict(kv) for s, kv in cfg.items()}
    for (section, key), value in overrides.items():
        out.setdefault(section, {})[key] = str(value)
    return out


def canonical_text(cfg):
    """Deterministic serialization used for hashing and for writing."""
    buf = io.StringIO()
    material_sections = sorted(s for s in cfg if s.startswith("material."))
    other = [s for s in _SECTION_ORDER if s in cfg]
    for section in [*other[:1], *material_sections, *other[1:]]:
        buf.write(f"[{section}]\n")
        for key in sorted(cfg[section]):
            buf.write(f"{key} = {cfg[section][key]}\n")
        buf.write("\n")
    return buf.getvalue()


def config_hash(cfg):
    return hashlib.sha256(canonical_text(cfg).encode()).hexdigest()[:16]


def save_config(cfg, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_text(cfg))


def _get(cfg, section, key):
    try:
        return cfg[section][key]
    except KeyError:
        raise ConfigError(f"missing config value [{section}] {key}")


def _get_float(cfg, section, key):
    raw = _get(cfg, section, key)
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number")
    if not math.isfinite(value):
        raise ConfigError(f"[{section}] {key} must be finite")
    return value


def _get_int(cfg, section, key):
    value = _get_float(cfg, section, key)
    if value != int(value):
        raise ConfigError(f"[{section}] {key} must be an integer")
    return int(value)


def parse_grid(spec, name="grid"):
    """Parse 'start:stop:count' into an inclusive linspace grid."""
    parts = str(spec).split(":")
    if len(parts) != 3:
        raise ConfigError(f"{name} must look like start:stop:count, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{name} must look like start:stop:count, got {spec!r}")
    if count < 1:
        raise ConfigError(f"{name} needs at least one point")
    return np.linspace(start, stop, count)


@dataclass
class RunConfig:
    """Validated view over a resolved configuration mapping."""

    data: dict

    def __post_init__(self):
        schema = self.data.get("meta", {}).get("schema")
        if schema != str(SCHEMA_VERSION):
            raise ConfigError(
                f"config schema check failed: schema = {schema!r}, "
                f"expected {SCHEMA_VERSION}"
            )

    @property
    def hash(self):
        return config_hash(self.data)

    def material(self, name):
        section = f"material.{name}"
        if section not in self.data:
            raise ConfigError(f"unknown material {name!r}: no [{section}] section")
        g = lambda key: _get_float(self.data, section, key)
        return dict(
            e1=g("e1_gpa") * 1e9, e2=g("e2_gpa") * 1e9, g12=g("g12_gpa") * 1e9,
            nu12=g("nu12"),
            alpha1=g("alpha1_ppm_per_k") * 1e-6, alpha2=g("alpha2_ppm_per_k") * 1e-6,
            d31=g("d31_pm_per_v") * 1e-12,
        )

    def stack(self):
        spec = _get(self.data, "stack", "plies")
        plies = []
        for entry in spec.split(","):
            entry = entry.strip()
            if not entry:
                continue
            parts = entry.split(":")
            if len(parts) not in (2, 3):
                raise ConfigError(
                    f"bad ply entry {entry!r}; expected name:thickness_mm"
                    "[:angle_deg]"
                )
            name = parts[0].strip()
            try:
                thickness = units.m_from_mm(float(parts[1]))
                angle = math.radians(float(parts[2])) if len(parts) == 3 else 0.0
            except ValueError:
                raise ConfigError(f"bad ply entry {entry!r}: numbers expected")
            plies.append(Ply(thickness=thickness, angle=angle,
                             **self.material(name)))
        pzt_index = None
        if "pzt_index" in self.data.get("stack", {}):
            pzt_index = _get_int(self.data, "stack", "pzt_index")
        return LaminateStack(
            plies=tuple(plies),
            span=units.m_from_mm(_get_float(self.data, "stack", "span_mm")),
            width=units.m_from_mm(_get_float(self.data, "stack", "width_mm")),
            pzt_index=pzt_index,
        )

    def beta(self):
        return _get_float(self.data, "actuator", "beta_m_per_v")

    def envelope_vpp(self):
        return _get_float(self.data, "actuator", "envelope_vpp")

    def schedule(self):
        offsets = tuple(
            math.radians(float(x))
            for x in _get(self.data, "schedule", "offsets_deg").split(",")
        )
        return PhaseSchedule(
            vpp=_get_float(self.data, "schedule", "vpp"),
            frequency=_get_float(self.data, "schedule", "frequency_hz"),
            shape=_get(self.data, "schedule", "shape"),
            offsets=offsets,
        )

    def seal_threshold(self):
        return _get_float(self.data, "pump", "seal_threshold")

    def is_pump_calibrated(self):
        section = self.data.get("pump", {})
        return all(k in section for k in _FITTED_KEYS["pump"])

    def pump_params(self):
        if not self.is_pump_calibrated():
            raise NotCalibratedError(
                "pump parameters are not calibrated; run "
                "`pumpsim calibrate --config <file>` to fit them from the "
                "[anchors] section"
            )
        g = lambda key: _get_float(self.data, "pump", key)
        return PumpParams(
            chamber_area=units.m2_from_mm2(g("chamber_area_mm2")),
            shape_factor=g("shape_factor"),
            v_threshold=g("v_threshold_vpp"),
            q_cal=units.m3s_from_ul_min(g("q_cal_ul_min")),
            p_max_cal=units.pa_from_kpa(g("p_max_cal_kpa")),
            f_c=g("f_c_hz"),
            n_roll=g("n_roll"),
            v_anchor=g("anchor_vpp"),
            f_anchor=g("anchor_freq_hz"),
        )

    def is_load_calibrated(self):
        section = self.data.get("load", {})
        return all(k in section for k in _FITTED_KEYS["load"])

    def load_model(self):
        if not self.is_load_calibrated():
            raise NotCalibratedError(
                "load model is not calibrated; run "
                "`pumpsim calibrate --config <file>` to fit tan_delta from "
                "the [anchors] section"
            )
        g = lambda key: _get_float(self.data, "load", key)
        return LoadModel(
            c_eff=units.f_from_nf(g("c_eff_nf")),
            tan_delta=g("tan_delta"),
            r_e=g("r_e_ohm"),
        )

    def flow_anchors(self):
        g = lambda key: _get_float(self.data, "anchors", key)
        return CalibrationSet(
            flow=(g("flow_vpp"), g("flow_freq_hz"),
                  units.pa_from_kpa(g("flow_dp_kpa")),
                  units.m3s_from_ul_min(g("flow_ul_min"))),
            backpressure=(g("backpressure_vpp"), g("backpressure_freq_hz"),
                          units.pa_from_kpa(g("backpressure_kpa"))),
            dead_zone_vpp=g("dead_zone_vpp"),
            peak_frequency_hz=g("peak_freq_hz"),
        )

    def power_anchor(self):
        g = lambda key: _get_float(self.data, "anchors", key)
        return ((g("power_vpp"), g("power_freq_hz")),
                units.w_from_mw(g("power_mw")))

    def vpp_grid(self):
        return parse_grid(_get(self.data, "sweeps", "vpp_grid"), "vpp_grid")

    def freq_grid(self):
        return parse_grid(_get(self.data, "sweeps", "freq_grid"), "freq_grid")

    def dp_points(self):
        return _get_int(self.data, "sweeps", "dp_points")

    def samples_per_period(self):
        return _get_int(self.data, "sweeps", "samples_per_period")
