"""Run configuration: one nested file describing an experiment.

Every physical quantity carries its unit in the key name (``B_ext_T``,
``wavelength_nm``, ``nu_mod_Hz``).  Unknown keys are rejected and every
violation is reported with its key path, so a broken file can be fixed in
one pass.  JSON and YAML are both accepted.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .birefringence import (
    AlpModel,
    BeamParams,
    EhwModel,
    McpModel,
    PostMaxwellianModel,
    RadiativeEhwModel,
)
from .exceptions import ConfigError, DataIOError, DomainError
from .jones import r2_from_finesse
from .synthesis import (
    AlphaModel,
    DetectorSpec,
    MagnetSpec,
    ModulatorSpec,
    NoiseSwitches,
    OpticsSpec,
    RinSpec,
    SpuriousHarmonic,
    SynthConfig,
)

__all__ = ["RunConfig", "load_config", "SCHEMA"]


@dataclass(frozen=True)
class _Key:
    kind: type | tuple
    default: Any = None
    required: bool = False
    minimum: float | None = None
    exclusive_min: bool = False


def _num(default=None, *, minimum=None, exclusive=False, required=False):
    return _Key(float, default, required, minimum, exclusive)


_MODEL_KINDS = ("ehw", "radiative", "post_maxwellian", "alp", "mcp")
_EXCLUSIONS = ("alp_birefringence", "alp_dichroism", "mcp_fermion", "mcp_scalar")

#: section -> key -> spec; list sections hold the schema of one item
SCHEMA: dict[str, dict[str, _Key]] = {
    "beam": {"wavelength_nm": _num(1064.0, minimum=0, exclusive=True)},
    "magnets": {
        "B_ext_T": _num(required=True, minimum=0),
        "L_m": _num(required=True, minimum=0, exclusive=True),
        "int_B2_dL_T2m": _num(None, minimum=0),
        "nu_mag_Hz": _num(0.0, minimum=0),
        "theta_mag_rad": _num(0.0),
        "orientation_offset_rad": _num(0.0),
    },
    "modulator": {
        "eta0_rad": _num(1e-2, minimum=0, exclusive=True),
        "nu_mod_Hz": _num(506.0, minimum=0, exclusive=True),
        "theta_mod_rad": _num(0.0),
    },
    "detector": {
        "q_A_per_W": _num(0.7, minimum=0, exclusive=True),
        "G_ohm": _num(1e6, minimum=0, exclusive=True),
        "dark_noise_A_per_rtHz": _num(0.0, minimum=0),
        "temperature_K": _num(0.0, minimum=0),
        "rin_white_per_rtHz": _num(0.0, minimum=0),
        "rin_corner_Hz": _num(0.0, minimum=0),
    },
    "optics": {
        "sigma2": _num(0.0, minimum=0),
        "I_out_W": _num(5e-3, minimum=0),
        "finesse": _num(None, minimum=0),
        "r2": _num(None, minimum=0),
    },
    "alpha": {
        "dc_rad": _num(0.0),
        "drift_rad_per_s": _num(0.0),
        "flicker_rad_per_rtHz": _num(0.0, minimum=0),
        "corner_Hz": _num(0.0, minimum=0),
    },
    "harmonics": {
        "k": _Key(int, required=True, minimum=1),
        "amplitude_rad": _num(required=True),
        "phase_rad": _num(0.0),
    },
    "model": {
        "kind": _Key(_MODEL_KINDS, "ehw"),
        "eta1": _num(None),
        "eta2": _num(None),
        "particle": _Key(str, None),
        "g_per_eV": _num(None, minimum=0),
        "m_eV": _num(None, minimum=0, exclusive=True),
        "epsilon": _num(None, minimum=0),
    },
    "noise": {
        "shot": _Key(bool, True),
        "dark": _Key(bool, True),
        "johnson": _Key(bool, True),
        "rin": _Key(bool, True),
    },
    "synthesis": {
        "duration_s": _num(10.0, minimum=0, exclusive=True),
        "sample_rate_Hz": _num(4096.0, minimum=0, exclusive=True),
        "seed": _Key(int, 0, minimum=0),
        "units": _Key(("A", "relative"), "A"),
        "t0_s": _num(0.0),
        "n_jobs": _Key(int, 1, minimum=1),
    },
    "analysis": {
        "confidence": _num(0.95, minimum=0, exclusive=True),
        "n_bins": _Key(int, 50, minimum=2),
        "band_Hz": _num(0.78, minimum=0, exclusive=True),
        "sideband": _Key(("plus", "minus", "pooled"), "plus"),
        "exclusion": _Key(_EXCLUSIONS, "alp_birefringence"),
        "delta_n_limit": _num(None, minimum=0, exclusive=True),
        "mass_min_eV": _num(1e-5, minimum=0, exclusive=True),
        "mass_max_eV": _num(1e-1, minimum=0, exclusive=True),
        "n_mass": _Key(int, 100, minimum=2),
        "eta0_min_rad": _num(1e-4, minimum=0, exclusive=True),
        "eta0_max_rad": _num(1e-1, minimum=0, exclusive=True),
        "n_eta0": _Key(int, 100, minimum=2),
    },
    "output": {
        "dir": _Key(str, "."),
        "prefix": _Key(str, "vmbpol"),
    },
}

_LIST_SECTIONS = ("magnets", "harmonics")
_TOP_LEVEL = ("name",) + tuple(SCHEMA)


def _coerce(value, spec: _Key, path: str, errors: list):
    if value is None:
        if spec.required:
            errors.append((path, "is required"))
        return None
    kind = spec.kind
    if isinstance(kind, tuple):
        if value not in kind:
            errors.append((path, f"must be one of {list(kind)}, got {value!r}"))
            return None
        return value
    if kind is bool:
        if not isinstance(value, bool):
            errors.append((path, f"must be a boolean, got {value!r}"))
            return None
        return value
    if kind is str:
        if not isinstance(value, str):
            errors.append((path, f"must be a string, got {value!r}"))
            return None
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append((path, f"must be a number, got {value!r}"))
        return None
    if kind is int:
        if float(value) != int(value):
            errors.append((path, f"must be an integer, got {value!r}"))
            return None
        value = int(value)
    else:
        value = float(value)
        if not math.isfinite(value):
            errors.append((path, "must be finite"))
            return None
    if spec.minimum is not None:
        bad = value <= spec.minimum if spec.exclusive_min else value < spec.minimum
        if bad:
            rel = ">" if spec.exclusive_min else ">="
            errors.append((path, f"must be {rel} {spec.minimum:g}, got {value!r}"))
            return None
    return value


def _section(raw, schema: dict[str, _Key], path: str, errors: list) -> dict:
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        errors.append((path, "must be a mapping"))
        return {k: s.default for k, s in schema.items()}
    for key in sorted(set(raw) - set(schema)):
        errors.append((f"{path}.{key}", "unknown key"))
    return {k: _coerce(raw.get(k, spec.default), spec, f"{path}.{k}", errors) for k, spec in schema.items()}


def _normalise(raw: dict) -> dict:
    errors: list = []
    if not isinstance(raw, dict):
        raise ConfigError([("", "configuration must be a mapping")])
    for key in sorted(set(raw) - set(_TOP_LEVEL)):
        errors.append((key, "unknown key"))
    out: dict = {"name": raw.get("name", "run")}
    if not isinstance(out["name"], str):
        errors.append(("name", "must be a string"))
    for sec, schema in SCHEMA.items():
        if sec in _LIST_SECTIONS:
            items = raw.get(sec, [])
            if not isinstance(items, list):
                errors.append((sec, "must be a list"))
                items = []
            out[sec] = [_section(it, schema, f"{sec}[{i}]", errors) for i, it in enumerate(items)]
        else:
            out[sec] = _section(raw.get(sec), schema, sec, errors)

    opt = out["optics"]
    if opt["finesse"] is not None and opt["r2"] is not None:
        errors.append(("optics", "give finesse or r2, not both"))
    if opt["r2"] is not None and not opt["r2"] < 1:
        errors.append(("optics.r2", "must be below 1"))
    conf = out["analysis"]["confidence"]
    if conf is not None and not conf < 1:
        errors.append(("analysis.confidence", "must lie in (0, 1)"))
    a = out["analysis"]
    if a["mass_min_eV"] and a["mass_max_eV"] and not a["mass_min_eV"] < a["mass_max_eV"]:
        errors.append(("analysis.mass_max_eV", "must exceed mass_min_eV"))
    if a["eta0_min_rad"] and a["eta0_max_rad"] and not a["eta0_min_rad"] < a["eta0_max_rad"]:
        errors.append(("analysis.eta0_max_rad", "must exceed eta0_min_rad"))
    _check_model(out["model"], errors)
    if errors:
        raise ConfigError(errors)
    return out


def _check_model(m: dict, errors: list) -> None:
    kind = m["kind"]
    needs = {
        "ehw": (),
        "radiative": (),
        "post_maxwellian": ("eta1", "eta2"),
        "alp": ("particle", "g_per_eV", "m_eV"),
        "mcp": ("particle", "epsilon", "m_eV"),
    }.get(kind, ())
    for key in needs:
        if m[key] is None:
            errors.append((f"model.{key}", f"required for model kind {kind!r}"))
    allowed = set(needs) | {"kind"}
    for key, v in m.items():
        if v is not None and key not in allowed:
            errors.append((f"model.{key}", f"not used by model kind {kind!r}"))
    particles = {"alp": ("pseudoscalar", "scalar"), "mcp": ("fermion", "scalar")}
    if kind in particles and m["particle"] is not None and m["particle"] not in particles[kind]:
        errors.append(("model.particle", f"must be one of {list(particles[kind])} for {kind!r}"))


class RunConfig:
    """Validated run configuration.

    ``RunConfig.from_dict(cfg.to_dict())`` reproduces ``cfg`` exactly; the
    serialised form has every default filled in.
    """

    def __init__(self, data: dict):
        self._data = _normalise(data)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(copy.deepcopy(data))

    def to_dict(self) -> dict:
        return copy.deepcopy(self._data)

    def to_json(self) -> str:
        return json.dumps(self._data, sort_keys=True, indent=2)

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self._data == other._data

    def __getitem__(self, section):
        return copy.deepcopy(self._data[section])

    @property
    def sha256(self) -> str:
        """Hash of the canonical JSON form, written into every artifact."""
        canon = json.dumps(self._data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def override(self, assignments) -> "RunConfig":
        """New config with ``section.key=value`` overrides applied (values parsed as YAML scalars)."""
        data = self.to_dict()
        errors = []
        for item in assignments or ():
            path, sep, text = item.partition("=")
            if not sep:
                errors.append((item, "override must look like section.key=value"))
                continue
            parts = path.split(".")
            try:
                value = yaml.safe_load(text)
            except yaml.YAMLError as exc:
                errors.append((path, f"unparsable value: {exc}"))
                continue
            node = data
            try:
                for p in parts[:-1]:
                    node = node[int(p)] if isinstance(node, list) else node[p]
                if isinstance(node, list):
                    node[int(parts[-1])] = value
                else:
                    node[parts[-1]] = value
            except (KeyError, IndexError, ValueError, TypeError):
                errors.append((path, "no such key"))
        if errors:
            raise ConfigError(errors)
        return RunConfig(data)

    # ------------------------------------------------------------- builders

    def beam(self) -> BeamParams:
        return BeamParams(wavelength=self._data["beam"]["wavelength_nm"] * 1e-9)

    def magnets(self) -> list[MagnetSpec]:
        return [
            MagnetSpec(
                B_ext=m["B_ext_T"],
                L=m["L_m"],
                int_B2_dL=m["int_B2_dL_T2m"],
                nu_mag=m["nu_mag_Hz"],
                theta_mag=m["theta_mag_rad"],
                orientation_offset=m["orientation_offset_rad"],
            )
            for m in self._data["magnets"]
        ]

    def model(self):
        m = self._data["model"]
        kind = m["kind"]
        if kind == "ehw":
            return EhwModel()
        if kind == "radiative":
            return RadiativeEhwModel()
        if kind == "post_maxwellian":
            return PostMaxwellianModel(eta1=m["eta1"], eta2=m["eta2"])
        if kind == "alp":
            return AlpModel(particle=m["particle"], g=m["g_per_eV"], m=m["m_eV"])
        return McpModel(particle=m["particle"], epsilon=m["epsilon"], m=m["m_eV"])

    def finesse(self) -> float:
        o = self._data["optics"]
        if o["finesse"] is not None:
            return o["finesse"]
        if o["r2"] is not None and o["r2"] > 0:
            return math.pi * math.sqrt(o["r2"]) / (1.0 - o["r2"])
        return 0.0

    def r2(self) -> float | None:
        F = self.finesse()
        return r2_from_finesse(F) if F > 0 else None

    def detector(self) -> DetectorSpec:
        d = self._data["detector"]
        return DetectorSpec(
            q=d["q_A_per_W"],
            G=d["G_ohm"],
            dark_noise_density=d["dark_noise_A_per_rtHz"],
            temperature=d["temperature_K"],
            rin=RinSpec(white=d["rin_white_per_rtHz"], corner=d["rin_corner_Hz"]),
        )

    def synth_config(self) -> SynthConfig:
        d = self._data
        return SynthConfig(
            magnets=tuple(self.magnets()),
            modulator=ModulatorSpec(
                eta0=d["modulator"]["eta0_rad"],
                nu_mod=d["modulator"]["nu_mod_Hz"],
                theta_mod=d["modulator"]["theta_mod_rad"],
            ),
            optics=OpticsSpec(sigma2=d["optics"]["sigma2"], I_out=d["optics"]["I_out_W"], finesse=self.finesse()),
            detector=self.detector(),
            alpha=AlphaModel(
                dc=d["alpha"]["dc_rad"],
                drift=d["alpha"]["drift_rad_per_s"],
                flicker=d["alpha"]["flicker_rad_per_rtHz"],
                corner=d["alpha"]["corner_Hz"],
            ),
            beam=self.beam(),
            sample_rate=d["synthesis"]["sample_rate_Hz"],
            noise=NoiseSwitches(**d["noise"]),
            harmonics=tuple(
                SpuriousHarmonic(k=h["k"], amplitude=h["amplitude_rad"], phase=h["phase_rad"]) for h in d["harmonics"]
            ),
            units=d["synthesis"]["units"],
        )

    def nu_mod(self) -> float:
        return self._data["modulator"]["nu_mod_Hz"]

    def nu_mag(self) -> float:
        mags = self._data["magnets"]
        if not mags:
            raise ConfigError([("magnets", "at least one magnet is required")])
        rates = {m["nu_mag_Hz"] for m in mags}
        if len(rates) != 1:
            raise ConfigError([("magnets", "demodulation needs a common nu_mag_Hz")])
        return rates.pop()

    def mass_grid(self) -> np.ndarray:
        a = self._data["analysis"]
        return np.logspace(math.log10(a["mass_min_eV"]), math.log10(a["mass_max_eV"]), a["n_mass"])

    def eta0_grid(self) -> np.ndarray:
        a = self._data["analysis"]
        return np.logspace(math.log10(a["eta0_min_rad"]), math.log10(a["eta0_max_rad"]), a["n_eta0"])

    def total_length(self) -> float:
        return sum(m["L_m"] for m in self._data["magnets"])

    def total_int_B2_dL(self) -> float:
        return sum(m.region.int_B2_dL for m in self.magnets())

    def field_rms(self) -> float:
        L = self.total_length()
        if not L > 0:
            raise DomainError("no magnet length configured")
        return math.sqrt(self.total_int_B2_dL() / L)


def load_config(path) -> RunConfig:
    """Read a JSON or YAML config file (chosen by extension; YAML otherwise)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataIOError(f"cannot read config {p}: {exc}") from exc
    try:
        data = json.loads(text) if p.suffix.lower() == ".json" else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError([("", f"cannot parse {p.name}: {exc}")]) from exc
    return RunConfig(data if data is not None else {})
