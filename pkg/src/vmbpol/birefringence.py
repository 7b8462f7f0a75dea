"""Magnetically induced vacuum birefringence for the supported physics models.

Sign convention throughout: ``delta_n = n_par - n_perp`` and
``delta_kappa = kappa_par - kappa_perp``, with "par" meaning light polarised
along the external field.  Inputs and outputs are SI except the ALP/MCP model
parameters, which use eV (masses) and eV^-1 (couplings) as is customary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .constants import BRIDGE, CONSTANTS, ev_to_kg, photon_energy_ev
from .exceptions import DomainError

__all__ = [
    "BeamParams",
    "FieldRegion",
    "EhwModel",
    "PostMaxwellianModel",
    "RadiativeEhwModel",
    "AlpModel",
    "McpModel",
    "BirefringenceModel",
    "SignedBirefringence",
    "IndexTable",
    "MCP_GAP_BAND",
    "RADIATIVE_FACTOR",
    "ehw_birefringence",
    "ehw_indices",
    "post_maxwellian_birefringence",
    "radiative_corrected_birefringence",
    "alp_effect",
    "alp_x",
    "mcp_chi",
    "mcp_a_epsilon",
    "mcp_birefringence",
    "birefringence",
    "is_b2_proportional",
]

#: chi interval around 1 where neither asymptotic MCP form applies.
MCP_GAP_BAND = (0.2, 5.0)

#: alpha^3 radiative correction relative to the one-loop result, 25 alpha / 4 pi.
RADIATIVE_FACTOR = 25.0 * CONSTANTS.alpha / (4.0 * math.pi)

# pi^(1/2) 2^(1/3) Gamma(2/3)^2 / Gamma(1/6), common to both strong-field MCP forms
_GAMMA_FACTOR = math.sqrt(math.pi) * 2.0 ** (1.0 / 3.0) * math.gamma(2.0 / 3.0) ** 2 / math.gamma(1.0 / 6.0)

_SERIES_CUTOFF = 1e-4


# --------------------------------------------------------------------------- types


@dataclass(frozen=True)
class BeamParams:
    """Probe beam; ``wavelength`` in metres."""

    wavelength: float = 1064e-9

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength!r}")

    @property
    def photon_energy(self) -> float:
        """hbar*omega in eV."""
        return photon_energy_ev(self.wavelength)


@dataclass(frozen=True)
class FieldRegion:
    """Magnetic field region crossed by the beam.

    ``int_B2_dL`` defaults to ``B_ext**2 * L`` (uniform field).  A measured
    value may differ for real magnets with fringe fields.
    """

    B_ext: float
    L: float
    int_B2_dL: float | None = None

    def __post_init__(self):
        for name in ("B_ext", "L"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and non-negative, got {v!r}")
        if self.int_B2_dL is None:
            object.__setattr__(self, "int_B2_dL", self.B_ext**2 * self.L)
        elif not self.int_B2_dL >= 0:
            raise DomainError(f"int_B2_dL must be non-negative, got {self.int_B2_dL!r}")

    @property
    def uniform(self) -> bool:
        return math.isclose(self.int_B2_dL, self.B_ext**2 * self.L, rel_tol=1e-12, abs_tol=0.0)

    @property
    def mean_B2(self) -> float:
        """Path-averaged B^2 in T^2."""
        if self.L == 0:
            return self.B_ext**2
        return self.int_B2_dL / self.L


@dataclass(frozen=True)
class EhwModel:
    """One-loop Euler-Heisenberg-Weisskopf vacuum."""

    kind: Literal["ehw"] = "ehw"


@dataclass(frozen=True)
class RadiativeEhwModel:
    """EHW including the alpha^3 radiative correction."""

    kind: Literal["radiative"] = "radiative"


@dataclass(frozen=True)
class PostMaxwellianModel:
    """Generic parity-conserving quartic Lagrangian with parameters eta1, eta2."""

    eta1: float
    eta2: float
    kind: Literal["post_maxwellian"] = "post_maxwellian"

    @classmethod
    def ehw(cls) -> "PostMaxwellianModel":
        eta1 = CONSTANTS.alpha / (45.0 * math.pi)
        return cls(eta1=eta1, eta2=1.75 * eta1)

    @classmethod
    def born_infeld(cls, eta: float = 1.0) -> "PostMaxwellianModel":
        return cls(eta1=eta, eta2=eta)


@dataclass(frozen=True)
class AlpModel:
    """Axion-like particle: ``particle`` is pseudoscalar or scalar.

    g : two-photon coupling in eV^-1
    m : mass in eV
    """

    particle: Literal["pseudoscalar", "scalar"]
    g: float
    m: float
    kind: Literal["alp"] = "alp"

    def __post_init__(self):
        if self.particle not in ("pseudoscalar", "scalar"):
            raise DomainError(f"ALP particle must be 'pseudoscalar' or 'scalar', got {self.particle!r}")
        if not self.g >= 0:
            raise DomainError(f"coupling g must be non-negative, got {self.g!r}")
        if not self.m > 0:
            raise DomainError(f"ALP mass must be positive, got {self.m!r}")


@dataclass(frozen=True)
class McpModel:
    """Millicharged particle with charge epsilon*e and mass m (eV)."""

    particle: Literal["fermion", "scalar"]
    epsilon: float
    m: float
    kind: Literal["mcp"] = "mcp"

    def __post_init__(self):
        if self.particle not in ("fermion", "scalar"):
            raise DomainError(f"MCP particle must be 'fermion' or 'scalar', got {self.particle!r}")
        if not self.epsilon >= 0:
            raise DomainError(f"epsilon must be non-negative, got {self.epsilon!r}")
        if not self.m > 0:
            raise DomainError(f"MCP mass must be positive, got {self.m!r}")


BirefringenceModel = Union[EhwModel, RadiativeEhwModel, PostMaxwellianModel, AlpModel, McpModel]


@dataclass(frozen=True)
class SignedBirefringence:
    delta_n: float
    delta_kappa: float = 0.0
    regime_valid: bool = True


@dataclass(frozen=True)
class IndexTable:
    """Excess over unity of the relative permittivity, permeability and index.

    Each field holds ``value - 1``; at laboratory fields the excess is ~1e-23,
    far below double precision relative to 1.
    """

    n_par: float
    n_perp: float
    eps_par: float
    eps_perp: float
    mu_par: float
    mu_perp: float

    @property
    def delta_n(self):
        return self.n_par - self.n_perp


# ------------------------------------------------------------------------ helpers


def _check_field(B):
    B = np.asarray(B, dtype=float)
    if np.any(B < 0) or np.any(~np.isfinite(B)):
        raise DomainError("magnetic field must be finite and non-negative")
    return B


def _scalar(a):
    return float(a) if np.ndim(a) == 0 else a


def _sinc(x: float) -> float:
    """sin(x)/x with the removable singularity handled by series."""
    if abs(x) < _SERIES_CUTOFF:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return math.sin(x) / x


def _one_minus_sinc(y: float) -> float:
    """1 - sin(y)/y without catastrophic cancellation at small y."""
    if abs(y) < 0.05:
        y2 = y * y
        # alternating series y^2/3! - y^4/5! + y^6/7! - y^8/9!
        return y2 / 6.0 - y2**2 / 120.0 + y2**3 / 5040.0 - y2**4 / 362880.0
    return 1.0 - math.sin(y) / y


# --------------------------------------------------------------------- QED models


def ehw_indices(B) -> IndexTable:
    """Excess index table of magnetised vacuum from the EHW Lagrangian."""
    b2a = CONSTANTS.A_e * _check_field(B) ** 2
    return IndexTable(
        n_par=_scalar(7.0 * b2a),
        n_perp=_scalar(4.0 * b2a),
        eps_par=_scalar(10.0 * b2a),
        eps_perp=_scalar(-4.0 * b2a),
        mu_par=_scalar(4.0 * b2a),
        mu_perp=_scalar(12.0 * b2a),
    )


def ehw_birefringence(B):
    """Delta n = 3 A_e B^2."""
    B = _check_field(B)
    return _scalar(3.0 * CONSTANTS.A_e * B**2)


def post_maxwellian_birefringence(eta1, eta2, B):
    """Delta n = 2 (eta2 - eta1) B^2 / B_crit^2 (signed)."""
    B = _check_field(B)
    return _scalar(2.0 * (eta2 - eta1) * B**2 / CONSTANTS.B_crit**2)


def radiative_corrected_birefringence(B):
    return _scalar((1.0 + RADIATIVE_FACTOR) * ehw_birefringence(B))


# -------------------------------------------------------------------------- ALPs


def alp_x(m: float, L: float, omega: float) -> float:
    """Dimensionless oscillation parameter x = L m^2 / (4 omega).

    m and omega in eV, L in metres.
    """
    return BRIDGE.meter_to_inv_eV * L * m**2 / (4.0 * omega)


def alp_effect(model: AlpModel, region: FieldRegion, beam: BeamParams) -> SignedBirefringence:
    """Birefringence and dichroism induced by an axion-like particle.

    Pseudoscalars act on the polarisation parallel to the field, so both
    delta_n and delta_kappa come out positive; scalars act on the
    perpendicular one and both change sign.
    """
    if not model.m > 0:
        raise DomainError(f"ALP mass must be positive, got {model.m!r}")
    omega = beam.photon_energy
    B = BRIDGE.tesla_to_eV2 * region.B_ext
    L = BRIDGE.meter_to_inv_eV * region.L
    g, m = model.g, model.m
    x = L * m**2 / (4.0 * omega)

    dkappa = 2.0 * (g * B * L / 4.0) ** 2 * _sinc(x) ** 2
    dn = g**2 * B**2 / (2.0 * m**2) * _one_minus_sinc(2.0 * x)

    sign = 1.0 if model.particle == "pseudoscalar" else -1.0
    return SignedBirefringence(delta_n=sign * dn, delta_kappa=sign * dkappa)


# -------------------------------------------------------------------------- MCPs


def mcp_chi(model: McpModel, beam: BeamParams, B: float) -> float:
    """Field-strength regime parameter chi of a millicharged particle (SI)."""
    _check_field(B)
    k = CONSTANTS
    mass = ev_to_kg(model.m)
    hw = beam.photon_energy * k.e_charge
    mc2 = mass * k.c**2
    return 1.5 * (hw / mc2) * (model.epsilon * k.e_charge * B * k.hbar / (mass**2 * k.c**2))


def mcp_a_epsilon(epsilon: float, m: float) -> float:
    """Nonlinearity scale A_epsilon [T^-2] for charge epsilon*e, mass m in eV."""
    k = CONSTANTS
    mass = ev_to_kg(m)
    lambdabar = k.hbar / (mass * k.c)
    return (2.0 / (45.0 * k.mu_0)) * epsilon**4 * k.alpha**2 * lambdabar**3 / (mass * k.c**2)


# coefficient of A_eps B^2 in delta_n: (weak field, strong field * chi^-4/3)
_MCP_COEFFS = {
    "fermion": (3.0, -(9.0 / 7.0) * 22.5 * _GAMMA_FACTOR),
    "scalar": (-1.5, (9.0 / 14.0) * 22.5 * _GAMMA_FACTOR),
}


def mcp_birefringence(model: McpModel, beam: BeamParams, B: float) -> SignedBirefringence:
    """Birefringence from vacuum fluctuations of millicharged particles.

    Only the asymptotic chi << 1 and chi >> 1 forms are known; inside
    ``MCP_GAP_BAND`` the nearer asymptote is returned with
    ``regime_valid=False``.
    """
    chi = mcp_chi(model, beam, B)
    a_eps = mcp_a_epsilon(model.epsilon, model.m)
    weak, strong = _MCP_COEFFS[model.particle]
    if chi <= 1.0:
        dn = weak * a_eps * B**2
    else:
        dn = strong * chi ** (-4.0 / 3.0) * a_eps * B**2
    lo, hi = MCP_GAP_BAND
    return SignedBirefringence(delta_n=dn, regime_valid=not (lo < chi < hi))


# ----------------------------------------------------------------------- dispatch


def is_b2_proportional(model: BirefringenceModel) -> bool:
    """True for models whose delta_n scales exactly as B^2 at every field."""
    return model.kind in ("ehw", "radiative", "post_maxwellian")


def birefringence(
    model: BirefringenceModel,
    region: FieldRegion,
    beam: BeamParams | None = None,
    *,
    path_integrated: bool = False,
) -> SignedBirefringence:
    """Dispatch over the model union.

    With ``path_integrated=True`` B^2-proportional models use the path average
    ``int_B2_dL / L`` instead of ``B_ext**2``.
    """
    beam = beam or BeamParams()
    if model.kind in ("ehw", "radiative", "post_maxwellian"):
        B = math.sqrt(region.mean_B2) if path_integrated else region.B_ext
        if model.kind == "ehw":
            dn = ehw_birefringence(B)
        elif model.kind == "radiative":
            dn = radiative_corrected_birefringence(B)
        else:
            dn = post_maxwellian_birefringence(model.eta1, model.eta2, B)
        return SignedBirefringence(delta_n=dn)
    if model.kind == "alp":
        return alp_effect(model, region, beam)
    if model.kind == "mcp":
        return mcp_birefringence(model, beam, region.B_ext)
    raise DomainError(f"unknown birefringence model {model!r}")
