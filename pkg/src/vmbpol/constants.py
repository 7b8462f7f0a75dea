"""Physical constants and SI <-> natural (Heaviside-Lorentz) unit bridge.

Constants come from CODATA via :mod:`scipy.constants`.  Derived quantities
(``A_e``, the critical fields) are computed, never typed in, so chained
formulas do not accumulate rounding from published values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants as _sc

from .exceptions import DomainError

__all__ = [
    "PhysicalConstants",
    "NaturalUnitBridge",
    "CONSTANTS",
    "BRIDGE",
    "tesla_to_natural",
    "natural_to_tesla",
    "meter_to_natural",
    "natural_to_meter",
    "ev_to_kg",
    "ev_to_joule",
    "photon_energy_ev",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants plus the derived nonlinear-QED scales.

    Attributes
    ----------
    alpha : fine-structure constant
    e_charge : elementary charge [C]
    hbar : reduced Planck constant [J s]
    c : speed of light [m/s]
    m_e : electron mass [kg]
    k_B : Boltzmann constant [J/K]
    mu_0 : vacuum permeability [T m / A]
    """

    alpha: float = _sc.fine_structure
    e_charge: float = _sc.e
    hbar: float = _sc.hbar
    c: float = _sc.c
    m_e: float = _sc.m_e
    k_B: float = _sc.k
    mu_0: float = _sc.mu_0
    A_e: float = field(init=False)
    B_crit: float = field(init=False)
    E_crit: float = field(init=False)
    lambdabar_e: float = field(init=False)

    def __post_init__(self):
        lambdabar = self.hbar / (self.m_e * self.c)
        a_e = (2.0 / (45.0 * self.mu_0)) * self.alpha**2 * lambdabar**3 / (self.m_e * self.c**2)
        b_crit = self.m_e**2 * self.c**2 / (self.e_charge * self.hbar)
        object.__setattr__(self, "lambdabar_e", lambdabar)
        object.__setattr__(self, "A_e", a_e)
        object.__setattr__(self, "B_crit", b_crit)
        object.__setattr__(self, "E_crit", b_crit * self.c)

    @property
    def m_e_ev(self) -> float:
        """Electron rest energy in eV."""
        return self.m_e * self.c**2 / self.e_charge


@dataclass(frozen=True)
class NaturalUnitBridge:
    """Conversion factors into natural Heaviside-Lorentz units (hbar = c = 1).

    ``tesla_to_eV2`` is sqrt(hbar^3 c^3 / (e^4 mu_0)) with energies in eV, and
    ``meter_to_inv_eV`` is e / (hbar c).
    """

    tesla_to_eV2: float
    meter_to_inv_eV: float

    @classmethod
    def from_constants(cls, k: PhysicalConstants) -> "NaturalUnitBridge":
        t2ev2 = math.sqrt(k.hbar**3 * k.c**3 / (k.e_charge**4 * k.mu_0))
        m2iev = k.e_charge / (k.hbar * k.c)
        return cls(tesla_to_eV2=t2ev2, meter_to_inv_eV=m2iev)


CONSTANTS = PhysicalConstants()
BRIDGE = NaturalUnitBridge.from_constants(CONSTANTS)


def _check_nonneg(value, name):
    arr = np.asarray(value, dtype=float)
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise DomainError(f"{name} must be finite and non-negative, got {value!r}")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def tesla_to_natural(B):
    """Magnetic field in tesla -> eV^2."""
    return _out(_check_nonneg(B, "B") * BRIDGE.tesla_to_eV2)


def natural_to_tesla(B_ev2):
    return _out(_check_nonneg(B_ev2, "B") / BRIDGE.tesla_to_eV2)


def meter_to_natural(L):
    """Length in metres -> eV^-1."""
    return _out(_check_nonneg(L, "L") * BRIDGE.meter_to_inv_eV)


def natural_to_meter(L_inv_ev):
    return _out(_check_nonneg(L_inv_ev, "L") / BRIDGE.meter_to_inv_eV)


def ev_to_joule(E_ev):
    return E_ev * CONSTANTS.e_charge


def ev_to_kg(m_ev):
    """Rest energy in eV -> mass in kg."""
    return m_ev * CONSTANTS.e_charge / CONSTANTS.c**2


def photon_energy_ev(wavelength):
    """Photon energy hbar*omega in eV for a vacuum wavelength in metres."""
    if wavelength <= 0:
        raise DomainError(f"wavelength must be positive, got {wavelength!r}")
    return 2.0 * math.pi * CONSTANTS.hbar * CONSTANTS.c / (wavelength * CONSTANTS.e_charge)
