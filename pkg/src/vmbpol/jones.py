"""Jones-matrix model of the ellipsometer optical chain.

Matrices are plain ``(2, 2)`` complex numpy arrays and vectors ``(2,)``
complex arrays; X is the input polarisation, Y the analyser pass axis.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .exceptions import DomainError, SingularityError

__all__ = [
    "SMALL_PARAMETER_WARN",
    "MirrorParams",
    "CavityState",
    "brf_matrix",
    "mod_matrix",
    "sp_matrix",
    "analyzer_matrix",
    "cavity_resolvent",
    "cavity_chain",
    "finesse",
    "amplification",
    "r2_from_finesse",
    "transmitted_intensity",
    "transmitted_intensity_modulus",
    "chain_intensity",
    "ellipticity_of",
    "airy_transmission",
]

SMALL_PARAMETER_WARN = 0.1


def _warn_if_large(value, name):
    if np.any(np.abs(value) > SMALL_PARAMETER_WARN):
        warnings.warn(
            f"{name}={value!r} exceeds {SMALL_PARAMETER_WARN}; first-order Jones forms lose accuracy",
            RuntimeWarning,
            stacklevel=3,
        )


@dataclass(frozen=True)
class MirrorParams:
    """Power budget of one cavity mirror: transmission, reflection, loss.

    The three fractions must sum to one.  ``t2``, ``r2`` and ``p2`` are the
    squared amplitude coefficients (T, R, P).
    """

    t2: float
    r2: float
    p2: float = 0.0

    def __post_init__(self):
        for name in ("t2", "r2", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v!r}")
        if abs(self.t2 + self.r2 + self.p2 - 1.0) > 1e-12:
            raise DomainError(f"t2 + r2 + p2 must equal 1, got {self.t2 + self.r2 + self.p2!r}")

    @classmethod
    def from_r2(cls, r2: float, p2: float = 0.0) -> "MirrorParams":
        return cls(t2=1.0 - r2 - p2, r2=r2, p2=p2)

    @classmethod
    def from_finesse(cls, F: float, p2: float = 0.0) -> "MirrorParams":
        return cls.from_r2(r2_from_finesse(F), p2)

    @property
    def finesse(self) -> float:
        return finesse(self.r2)

    @property
    def resonant_transmission(self) -> float:
        """Field prefactor t^2 / (1 - r^2) = T / (T + P) on resonance."""
        return self.t2 / (1.0 - self.r2)


@dataclass(frozen=True)
class CavityState:
    """Cavity length and laser wavelength; derives the roundtrip phase."""

    length: float
    wavelength: float
    mirrors: MirrorParams

    @property
    def roundtrip_phase(self) -> float:
        return 4.0 * math.pi * self.length / self.wavelength

    @property
    def finesse(self) -> float:
        return self.mirrors.finesse

    @property
    def on_resonance(self) -> bool:
        m = self.roundtrip_phase / (2.0 * math.pi)
        return abs(m - round(m)) < 1e-9


# ---------------------------------------------------------------------- elements


def brf_matrix(psi: float, theta: float) -> np.ndarray:
    """Uniaxial birefringent element, first order in the ellipticity ``psi``.

    ``theta`` is the angle between the slow axis and the input polarisation.
    """
    _warn_if_large(psi, "psi")
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return np.array(
        [[1.0 + 1j * psi * c, 1j * psi * s], [1j * psi * s, 1.0 - 1j * psi * c]],
        dtype=complex,
    )


def mod_matrix(eta: float) -> np.ndarray:
    """Ellipticity modulator: a birefringent element at 45 degrees."""
    _warn_if_large(eta, "eta")
    return np.array([[1.0, 1j * eta], [1j * eta, 1.0]], dtype=complex)


def sp_matrix(alpha: float) -> np.ndarray:
    """Spurious ellipticity ``alpha``, modelled like the modulator."""
    return mod_matrix(alpha)


def analyzer_matrix() -> np.ndarray:
    """Polariser crossed with the input polariser."""
    return np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


# ------------------------------------------------------------------------ cavity


def finesse(r2):
    """Cavity finesse pi*r / (1 - r^2) for mirror power reflectivity ``r2``."""
    r2 = np.asarray(r2, dtype=float)
    if np.any(r2 < 0) or np.any(r2 >= 1):
        raise DomainError("mirror reflectivity r2 must satisfy 0 <= r2 < 1")
    out = np.pi * np.sqrt(r2) / (1.0 - r2)
    return float(out) if out.ndim == 0 else out


def amplification(r2):
    """Ellipticity gain (1 + r^2)/(1 - r^2) of a resonant Fabry-Perot."""
    r2 = np.asarray(r2, dtype=float)
    if np.any(r2 < 0) or np.any(r2 >= 1):
        raise DomainError("mirror reflectivity r2 must satisfy 0 <= r2 < 1")
    out = (1.0 + r2) / (1.0 - r2)
    return float(out) if out.ndim == 0 else out


def r2_from_finesse(F: float) -> float:
    """Invert :func:`finesse`: the r^2 that gives finesse ``F``."""
    if not F > 0:
        raise DomainError(f"finesse must be positive, got {F!r}")
    # rationalised root of F r^2 + pi r - F = 0, free of cancellation at large F
    r = 2.0 * F / (math.pi + math.sqrt(math.pi**2 + 4.0 * F**2))
    return r * r


def cavity_resolvent(r2: float, delta: float, intracavity: np.ndarray) -> np.ndarray:
    """[I - M^2 r^2 e^{i delta}]^-1 by exact 2x2 inversion."""
    m2 = intracavity @ intracavity
    k = np.eye(2, dtype=complex) - m2 * (r2 * np.exp(1j * delta))
    det = k[0, 0] * k[1, 1] - k[0, 1] * k[1, 0]
    scale = max(1.0, float(np.max(np.abs(k)))) ** 2
    if abs(det) < 1e-14 * scale:
        raise SingularityError("cavity resolvent is singular (|det| ~ 0)")
    return np.array([[k[1, 1], -k[0, 1]], [-k[1, 0], k[0, 0]]], dtype=complex) / det


def _single_pass_retardance(m: np.ndarray) -> float:
    # half the phase difference between the eigenpolarisations of one pass
    ev = np.linalg.eigvals(m)
    return 0.5 * abs(np.angle(ev[0] / ev[1]))


def cavity_chain(
    mirrors: MirrorParams,
    delta: float,
    intracavity: np.ndarray,
    downstream: Sequence[np.ndarray] = (),
) -> np.ndarray:
    """Jones matrix of a Fabry-Perot followed by downstream elements.

    Computes ``D_k ... D_1 . t^2 e^{i delta/2} [I - M^2 r^2 e^{i delta}]^-1 . M``
    where ``downstream = [D_1, ..., D_k]`` in beam order.

    Raises
    ------
    DomainError
        If the accumulated birefringent phase exceeds pi/2, where the cavity
        splits into two separate polarisation resonances.
    SingularityError
        If the resolvent cannot be inverted.
    """
    intracavity = np.asarray(intracavity, dtype=complex)
    if mirrors.r2 < 1.0:
        accumulated = 2.0 * _single_pass_retardance(intracavity) * amplification(mirrors.r2)
        if accumulated > math.pi / 2:
            raise DomainError(
                f"accumulated cavity birefringence {accumulated:.3g} rad exceeds pi/2: "
                "orthogonal polarisations resonate separately"
            )
    res = cavity_resolvent(mirrors.r2, delta, intracavity)
    out = mirrors.t2 * np.exp(0.5j * delta) * (res @ intracavity)
    for elem in downstream:
        out = np.asarray(elem, dtype=complex) @ out
    return out


def airy_transmission(r2: float, delta) -> np.ndarray:
    """Power transmission relative to resonance, 1 / (1 + (2F/pi)^2 sin^2(delta/2))."""
    coeff = 4.0 * r2 / (1.0 - r2) ** 2
    return 1.0 / (1.0 + coeff * np.sin(np.asarray(delta) / 2.0) ** 2)


def ellipticity_of(field: np.ndarray) -> float:
    """Ellipticity Im(E_y / E_x) of a nearly X-polarised field."""
    return float(np.imag(field[1] / field[0]))


# --------------------------------------------------------------------- intensity


def transmitted_intensity(I_out, sigma2, alpha, eta, Psi):
    """Intensity after the analyser, expanded to first order in the ellipticities.

    ``I_out * (sigma2 + eta^2 + alpha^2 + 2 eta Psi + 2 eta alpha)``; ``Psi``
    is the cavity-amplified ellipticity including its sin(2 theta) factor.
    Broadcasts over array arguments.
    """
    eta = np.asarray(eta, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    return I_out * (sigma2 + eta**2 + alpha**2 + 2.0 * eta * Psi + 2.0 * eta * alpha)


def transmitted_intensity_modulus(I_out, sigma2, alpha, eta, Psi):
    """``I_out * (sigma2 + |i alpha + i eta + i Psi|^2)`` without truncation."""
    total = np.asarray(alpha) + np.asarray(eta) + np.asarray(Psi)
    return I_out * (sigma2 + total**2)


def chain_intensity(
    I_0: float,
    mirrors: MirrorParams,
    psi: float,
    theta: float,
    eta: float,
    alpha: float = 0.0,
    sigma2: float = 0.0,
    delta: float = 0.0,
) -> float:
    """Analyser output intensity from the full matrix product.

    The extinction ``sigma2`` is added incoherently, scaled by the power that
    reaches the analyser.
    """
    ell = cavity_chain(
        mirrors,
        delta,
        brf_matrix(psi, theta),
        downstream=[mod_matrix(eta), sp_matrix(alpha), analyzer_matrix()],
    )
    e_tr = ell @ np.array([1.0, 0.0], dtype=complex)
    I_out = I_0 * abs(mirrors.resonant_transmission) ** 2
    return float(I_0 * np.vdot(e_tr, e_tr).real + I_out * sigma2)
