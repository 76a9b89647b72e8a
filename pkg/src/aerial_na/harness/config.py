"""Sectioned ``key = value`` scenario files.

Every key has a default (the reference deployment), so an empty file is
a complete scenario. ``[classes.1]`` and ``[classes.2]`` default to the MS and
LS templates; ``velocity`` is only read for the MS class, since LS velocities
come from the heterogeneity source. The raw values are kept as parsed; the serialized form
is canonical, so parse -> serialize -> parse is a fixpoint and the digest of
the serialization identifies a configuration.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

from ..availability import ESTIMATOR_METHODS, TailEstimator
from ..channel import CSI_MODES, FadingSpec, Geometry, Radio, dbm_to_watt
from ..errors import ConfigError
from ..scenario import LS_THRESHOLD_MODES, Scenario
from ..traffic import EB_UNIT_MODES, ServiceClass
from ..ura import FEASIBILITY_MODES

TOOL_VERSION = "0.1.0"


def _choice(*options):
    def conv(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text
    conv.__name__ = "choice"
    return conv


def _float(text):
    v = float(text)
    if math.isnan(v):
        raise ValueError("nan is not allowed")
    return v


def _int(text):
    f = float(text)
    if f != int(f):
        raise ValueError("expected an integer")
    return int(f)


_CLASS_KEYS = {
    "tag": (_choice("LS", "MS"), None),
    "delay_bound": (_float, None),
    "eps_max": (_float, 1e-5),
    "packet_bits": (_float, None),
    "arrival_rate": (_float, None),
    "arrival_variance": (_float, None),
    "queue_share": (_float, 0.5),
    "velocity": (_float, 30.0),
}

_CLASS_DEFAULTS = {
    "classes.1": {"tag": "MS", "delay_bound": 0.5e-3, "eps_max": 1e-5, "packet_bits": 160.0,
                  "arrival_rate": 20.0, "arrival_variance": 20.0, "queue_share": 0.5,
                  "velocity": 30.0},
    "classes.2": {"tag": "LS", "delay_bound": 55e-3, "eps_max": 1e-5, "packet_bits": 1000.0,
                  "arrival_rate": 500.0, "arrival_variance": 500.0, "queue_share": 0.5,
                  "velocity": 30.0},
}

SCHEMA = {
    "geometry": {
        "disaster_radius": (_float, 3000.0),
        "flight_radius": (_float, 500.0),
        "fap_altitude": (_float, 200.0),
        "aue_min_altitude": (_float, 100.0),
        "aue_max_altitude": (_float, 400.0),
    },
    "radio": {
        "carrier": (_float, 2e9),
        "light_speed": (_float, 3e8),
        "total_bandwidth": (_float, 150e6),
        "subcarrier_spacing": (_float, 15e3),
        "coherence_bandwidth": (_float, 0.5e6),
        "noise_dbm_hz": (_float, -174.0),
        "tx_power_dbm": (_float, 5.0),
        "fronthaul_loss": (_float, 0.5),
        "blocklength_loss": (_float, 1.5),
        "sampling_time": (_float, 66.66e-6),
    },
    "frame": {
        "frame": (_float, 1e-4),
        "frame_ctrl": (_float, 0.05e-3),
    },
    "population": {
        "ues": (_int, 1000),
        "faps": (_int, 15),
    },
    "fading": {
        "kappa": (_float, 0.0),
        "mu": (_int, 3),
        "m": (_float, math.inf),
    },
    "heterogeneity": {
        "source": (_choice("S1", "S2", "S3", "S4", "custom"), "S4"),
        "custom_delays_ms": (str, ""),
        "custom_velocities": (str, ""),
    },
    "policy": {
        "baseline_k": (_int, 6),
    },
    "estimator": {
        "method": (_choice(*ESTIMATOR_METHODS), "auto"),
        "trials": (_int, 1_000_000),
        "seed": (_int, 1),
        "csi": (_choice(*CSI_MODES), "mmse-orthogonal"),
        "mode": (_choice(*FEASIBILITY_MODES), "relaxed"),
        "eb_unit": (_choice(*EB_UNIT_MODES), "verbatim"),
        "ls_threshold": (_choice(*LS_THRESHOLD_MODES), "verbatim"),
        "batch": (_int, 1 << 16),
        "workers": (_int, 1),
    },
    "targets": {
        "eta": (_float, 0.98),
        "u_max": (_int, 6),
    },
}

SECTION_ORDER = ["geometry", "radio", "frame", "population", "fading", "classes",
                 "heterogeneity", "policy", "estimator", "targets"]


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class EstimatorSettings:
    method: str
    trials: int
    seed: int
    csi: str
    batch: int
    workers: int

    def make(self, scenario: Scenario, seed: int | None = None) -> TailEstimator:
        return TailEstimator(scenario.fading, self.csi, self.method, self.trials,
                             self.seed if seed is None else seed, scenario.faps, self.batch,
                             True, self.workers)


@dataclass(frozen=True)
class ScenarioConfig:
    values: dict  # section -> {key: value}, canonical and complete
    scenario: Scenario
    estimator: EstimatorSettings
    eta: float
    u_max: int
    source: str
    custom: tuple | None

    def serialize(self) -> str:
        return serialize(self.values)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()

    def with_overrides(self, overrides: dict) -> "ScenarioConfig":
        vals = {s: dict(kv) for s, kv in self.values.items()}
        for (section, key), value in overrides.items():
            conv = SCHEMA[section][key][0]
            try:
                vals[section][key] = conv(str(value))
            except ValueError as exc:
                raise ConfigError(str(exc), key=key) from None
        return build_config(vals, {})


def serialize(values: dict) -> str:
    lines = []
    for section in _ordered_sections(values):
        lines.append(f"[{section}]")
        for key, value in values[section].items():
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


def _ordered_sections(values):
    out = []
    for s in SECTION_ORDER:
        if s == "classes":
            out += sorted((k for k in values if k.startswith("classes.")),
                          key=lambda k: int(k.split(".")[1]))
        elif s in values:
            out.append(s)
    return out


def _schema_for(section: str):
    if section.startswith("classes."):
        return _CLASS_KEYS
    return SCHEMA.get(section)


def parse_text(text: str) -> ScenarioConfig:
    raw: dict[str, dict] = {}
    lines: dict[tuple, int] = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError("unterminated section header", line=lineno)
            section = stripped[1:-1].strip()
            if _schema_for(section) is None:
                raise ConfigError(f"unknown section [{section}]", line=lineno)
            if section.startswith("classes."):
                try:
                    if int(section.split(".", 1)[1]) < 1:
                        raise ValueError
                except ValueError:
                    raise ConfigError(f"class sections are [classes.N] with N >= 1, got [{section}]",
                                      line=lineno) from None
            raw.setdefault(section, {})
            lines[(section, None)] = lineno
            continue
        if "=" not in stripped:
            raise ConfigError("expected 'key = value'", line=lineno)
        if section is None:
            raise ConfigError("key outside of any section", line=lineno)
        key, value = (p.strip() for p in stripped.split("=", 1))
        schema = _schema_for(section)
        if key not in schema:
            raise ConfigError(f"unknown key in [{section}]", key=key, line=lineno)
        if key in raw[section]:
            raise ConfigError("duplicate key", key=key, line=lineno)
        conv = schema[key][0]
        try:
            raw[section][key] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"bad value '{value}' ({exc})", key=key, line=lineno) from None
        lines[(section, key)] = lineno
    return build_config(raw, lines)


def load_scenario(path) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_text(text)


def _complete(raw: dict) -> dict:
    vals = {}
    for section, keys in SCHEMA.items():
        given = raw.get(section, {})
        vals[section] = {k: given.get(k, default) for k, (_, default) in keys.items()}
    class_sections = list(_CLASS_DEFAULTS) + [s for s in raw
                                              if s.startswith("classes.") and s not in _CLASS_DEFAULTS]
    for s in class_sections:
        given = raw.get(s, {})
        tag = given.get("tag") or _CLASS_DEFAULTS.get(s, {}).get("tag")
        base = next((d for d in _CLASS_DEFAULTS.values() if d["tag"] == tag), None)
        if base is None:
            raise ConfigError(f"[{s}] needs a tag")
        vals[s] = {k: given.get(k, base[k]) for k in _CLASS_KEYS}
    return vals


_FIELD_ALIASES = {"ms_velocity": "velocity", "noise_psd": "noise_dbm_hz",
                  "tx_power": "tx_power_dbm"}


def _locate(exc: ConfigError, lines: dict, sections) -> ConfigError:
    if exc.line is not None or exc.key is None:
        return exc
    key = _FIELD_ALIASES.get(exc.key, exc.key)
    for s in sections:
        if (s, key) in lines:
            return ConfigError(exc.message, key=key, line=lines[(s, key)])
    return exc


def build_config(raw: dict, lines: dict) -> ScenarioConfig:
    vals = _complete(raw)
    sections = _ordered_sections(vals)
    try:
        return _assemble(vals)
    except ConfigError as exc:
        raise _locate(exc, lines, sections) from None


def _assemble(vals: dict) -> ScenarioConfig:
    g, r, f = vals["geometry"], vals["radio"], vals["frame"]
    geometry = Geometry(**g)
    radio = Radio(carrier=r["carrier"], light_speed=r["light_speed"],
                  total_bandwidth=r["total_bandwidth"], subcarrier_spacing=r["subcarrier_spacing"],
                  coherence_bandwidth=r["coherence_bandwidth"],
                  noise_psd=dbm_to_watt(r["noise_dbm_hz"]), tx_power=dbm_to_watt(r["tx_power_dbm"]),
                  fronthaul_loss=r["fronthaul_loss"], blocklength_loss=r["blocklength_loss"],
                  sampling_time=r["sampling_time"], frame=f["frame"], frame_ctrl=f["frame_ctrl"])
    fading = FadingSpec(**vals["fading"])
    classes = {}
    velocity = None
    for s in (k for k in vals if k.startswith("classes.")):
        c = vals[s]
        if c["tag"] in classes:
            raise ConfigError(f"more than one {c['tag']} class", key="tag")
        classes[c["tag"]] = ServiceClass(c["tag"], c["delay_bound"], c["eps_max"], c["packet_bits"],
                                         c["arrival_rate"], c["arrival_variance"],
                                         c["queue_share"] if c["tag"] == "MS" else None)
        if c["tag"] == "MS":
            velocity = c["velocity"]
    if set(classes) != {"MS", "LS"}:
        raise ConfigError("need exactly one MS and one LS class", key="tag")
    for cls in classes.values():
        if cls.delay_bound <= radio.frame:
            raise ConfigError(f"{cls.tag} delay bound must exceed the frame duration",
                              key="delay_bound")
    est = vals["estimator"]
    scenario = Scenario(geometry, radio, fading, vals["population"]["ues"],
                        vals["population"]["faps"], classes["MS"], classes["LS"], velocity,
                        vals["policy"]["baseline_k"], est["mode"], est["eb_unit"],
                        est["ls_threshold"])
    settings = EstimatorSettings(est["method"], est["trials"], est["seed"], est["csi"],
                                 est["batch"], est["workers"])
    if settings.trials < 1:
        raise ConfigError("trials must be positive", key="trials")
    if not 0 <= settings.seed < 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer", key="seed")
    if settings.batch < 1 or settings.workers < 1:
        raise ConfigError("batch and workers must be positive", key="batch")
    settings.make(scenario)  # rejects analytic method on specs without a closed form
    t = vals["targets"]
    if not 0 < t["eta"] <= 1:
        raise ConfigError("eta must lie in (0, 1]", key="eta")
    if t["u_max"] < 1:
        raise ConfigError("u_max must be at least 1", key="u_max")
    h = vals["heterogeneity"]
    custom = None
    if h["source"] == "custom":
        if not h["custom_delays_ms"] or not h["custom_velocities"]:
            raise ConfigError("custom source needs custom_delays_ms and custom_velocities",
                              key="custom_delays_ms")
        custom = (h["custom_delays_ms"], h["custom_velocities"])
    return ScenarioConfig(vals, scenario, settings, t["eta"], t["u_max"], h["source"], custom)


def default_config() -> ScenarioConfig:
    return parse_text("")
