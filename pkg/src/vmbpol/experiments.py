"""Figures of merit of vacuum-birefringence ellipsometers.

Each experiment is described by its primary parameters (field integral,
finesse, sensitivity, duty cycle); the derived figures (expected QED
ellipticity, effective birefringence sensitivity, time to reach SNR = 1)
follow from simple algebra.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from importlib import resources

from .birefringence import EhwModel, FieldRegion, birefringence, is_b2_proportional
from .exceptions import ConfigError, DomainError

__all__ = [
    "ExperimentParams",
    "ExperimentFigures",
    "compare_experiments",
    "load_experiments",
    "table2_experiments",
]

_YEAR = 365.25 * 86400.0
_DETECTION = ("heterodyne", "homodyne")


@dataclass(frozen=True)
class ExperimentParams:
    """Primary parameters of one experiment configuration.

    ``T_pulse`` [s] is required for pulsed experiments (``duty_cycle < 1``)
    and forbidden otherwise.  ``delta_n_B`` [T^-2] is the single-pulse
    birefringence sensitivity per unit B^2, when published.
    """

    name: str
    wavelength: float
    int_B2_dL: float
    B_avg: float
    finesse: float
    s: float
    detection: str = "heterodyne"
    f_mod: float = 0.0
    duty_cycle: float = 1.0
    T_pulse: float | None = None
    delta_n_B: float | None = None

    def __post_init__(self):
        errors = []
        for key in ("wavelength", "int_B2_dL", "B_avg", "finesse", "s"):
            v = getattr(self, key)
            if not (isinstance(v, (int, float)) and v > 0 and math.isfinite(v)):
                errors.append((key, f"must be positive and finite, got {v!r}"))
        if self.detection not in _DETECTION:
            errors.append(("detection", f"must be one of {_DETECTION}, got {self.detection!r}"))
        if not 0.0 < self.duty_cycle <= 1.0:
            errors.append(("duty_cycle", f"must lie in (0, 1], got {self.duty_cycle!r}"))
        pulsed = self.duty_cycle < 1.0
        if pulsed and self.T_pulse is None:
            errors.append(("T_pulse", "required when duty_cycle < 1"))
        if not pulsed and (self.T_pulse is not None or self.delta_n_B is not None):
            errors.append(("T_pulse", "pulse parameters only apply when duty_cycle < 1"))
        for key in ("T_pulse", "delta_n_B"):
            v = getattr(self, key)
            if v is not None and not v > 0:
                errors.append((key, f"must be positive, got {v!r}"))
        if errors:
            raise ConfigError([(f"{self.name}.{k}", m) for k, m in errors])

    @property
    def L(self) -> float:
        """Equivalent magnet length int_B2_dL / B_avg^2 [m]."""
        return self.int_B2_dL / self.B_avg**2

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentParams":
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError([(k, "unknown key") for k in unknown])
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ExperimentFigures:
    """Derived figures of merit; densities are per sqrt(Hz)."""

    name: str
    psi_qed: float
    s_eff: float
    delta_n_eff: float
    A_e_eff: float
    time_snr1: float
    L: float
    delta_n_eff_pulsed: float | None = None
    extra: dict = field(default_factory=dict)

    columns = ("name", "psi_qed", "s_eff", "delta_n_eff", "A_e_eff", "time_snr1_s", "L_m")

    @property
    def time_snr1_days(self) -> float:
        return self.time_snr1 / 86400.0

    @property
    def time_snr1_years(self) -> float:
        return self.time_snr1 / _YEAR

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("extra")
        d["time_snr1_days"] = self.time_snr1_days
        d["time_snr1_years"] = self.time_snr1_years
        return d

    def row(self) -> tuple:
        return (self.name, self.psi_qed, self.s_eff, self.delta_n_eff, self.A_e_eff, self.time_snr1, self.L)


def _figures(p: ExperimentParams, A_e: float, psi_override: float | None) -> ExperimentFigures:
    psi = 2.0 * p.finesse * 3.0 * A_e * p.int_B2_dL / p.wavelength
    psi_used = psi if psi_override is None else psi_override
    s_eff = p.s / math.sqrt(p.duty_cycle)
    L = p.L
    dn_eff = s_eff * p.wavelength / (2.0 * p.finesse * L)
    ae_eff = dn_eff / (3.0 * p.B_avg**2)
    pulsed = None
    if p.delta_n_B is not None:
        pulsed = p.delta_n_B * p.B_avg**2 * math.sqrt(p.T_pulse / p.duty_cycle)
    return ExperimentFigures(
        name=p.name,
        psi_qed=psi,
        s_eff=s_eff,
        delta_n_eff=dn_eff,
        A_e_eff=ae_eff,
        time_snr1=(s_eff / psi_used) ** 2,
        L=L,
        delta_n_eff_pulsed=pulsed,
    )


def compare_experiments(
    params,
    model=None,
    *,
    psi_override: dict[str, float] | None = None,
) -> list[ExperimentFigures]:
    """Derived figures of merit for each experiment.

    Parameters
    ----------
    params : iterable of ExperimentParams
    model : optional
        Any B^2-proportional birefringence model; supplies
        A_e = Delta n(1 T) / 3.  Defaults to the QED value.
    psi_override : dict, optional
        Per-name ellipticity used for the SNR time instead of the computed one
        (e.g. a published, rounded value).
    """
    model = model or EhwModel()
    if not is_b2_proportional(model):
        raise DomainError("compare_experiments needs a model with Delta n proportional to B^2")
    A_e = birefringence(model, FieldRegion(B_ext=1.0, L=1.0)).delta_n / 3.0
    psi_override = psi_override or {}
    return [_figures(p, A_e, psi_override.get(p.name)) for p in params]


def load_experiments(path) -> list[ExperimentParams]:
    """Read a JSON list of experiment parameter records."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if isinstance(raw, dict):
        raw = raw.get("experiments", [])
    return [ExperimentParams.from_dict(d) for d in raw]


def table2_experiments() -> list[ExperimentParams]:
    """Bundled parameters of the ongoing experiments (achieved and planned)."""
    text = resources.files("vmbpol").joinpath("data/table2.json").read_text(encoding="utf-8")
    return [ExperimentParams.from_dict(d) for d in json.loads(text)["experiments"]]
