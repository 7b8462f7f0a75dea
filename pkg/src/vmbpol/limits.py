"""Noise-floor fitting and the physics limits derived from it."""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .birefringence import ehw_birefringence
from .exceptions import DomainError

__all__ = [
    "SIGMA_GG_EHW",
    "RayleighFit",
    "LimitResult",
    "rayleigh_fit",
    "confidence_factor",
    "birefringence_limit",
    "ae_limit",
    "cross_section_limit",
    "noise_floor_limits",
]

#: QED photon-photon elastic cross-section at 1.17 eV [m^2]; anchor of the
#: quadratic scaling used by :func:`cross_section_limit`.
SIGMA_GG_EHW = 1.8e-69


@dataclass(frozen=True)
class RayleighFit:
    sigma: float
    n_bins: int
    chi2_per_dof: float
    value_at_signal_bin: float | None = None
    n_samples: int = 0

    @property
    def signal_p_value(self) -> float | None:
        """Probability that noise alone exceeds the signal-bin value."""
        if self.value_at_signal_bin is None:
            return None
        return math.exp(-self.value_at_signal_bin**2 / (2.0 * self.sigma**2))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["signal_p_value"] = self.signal_p_value
        return d


@dataclass(frozen=True)
class LimitResult:
    delta_n_limit: float
    A_e_limit: float
    sigma_gamma_gamma_limit: float
    confidence: float

    def to_dict(self) -> dict:
        return asdict(self)


def rayleigh_fit(amplitudes, n_bins: int = 50, value_at_signal_bin: float | None = None) -> RayleighFit:
    """Fit a Rayleigh density to spectral amplitudes.

    sigma is the closed-form maximum-likelihood estimate sqrt(<r^2>/2).  A
    histogram with ``n_bins`` bins is compared with the fitted density and its
    chi^2 per degree of freedom is reported as a diagnostic only.
    """
    r = np.asarray(amplitudes, dtype=float).ravel()
    if r.size == 0:
        raise DomainError("rayleigh_fit needs at least one amplitude")
    if np.any(r < 0) or np.any(~np.isfinite(r)):
        raise DomainError("amplitudes must be finite and non-negative")
    if r.size < 100:
        warnings.warn(f"only {r.size} amplitudes; Rayleigh fit is poorly constrained", RuntimeWarning, stacklevel=2)
    sigma = math.sqrt(np.mean(r**2) / 2.0)
    if sigma == 0.0:
        raise DomainError("all amplitudes are zero: degenerate input, not a Rayleigh sample")

    edges = np.linspace(0.0, r.max(), n_bins + 1)
    observed, _ = np.histogram(r, bins=edges)
    cdf = 1.0 - np.exp(-(edges**2) / (2.0 * sigma**2))
    expected = r.size * np.diff(cdf)
    use = expected >= 5.0
    dof = int(use.sum()) - 1
    if dof > 0:
        chi2 = float(np.sum((observed[use] - expected[use]) ** 2 / expected[use]))
        chi2_dof = chi2 / dof
    else:
        chi2_dof = float("nan")
    return RayleighFit(
        sigma=sigma,
        n_bins=n_bins,
        chi2_per_dof=chi2_dof,
        value_at_signal_bin=value_at_signal_bin,
        n_samples=int(r.size),
    )


def confidence_factor(confidence: float) -> float:
    """Amplitude threshold in units of sigma for a Rayleigh noise: sqrt(-2 ln(1 - CL))."""
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence!r}")
    return math.sqrt(-2.0 * math.log1p(-confidence))


def _check_positive(**kw):
    for name, v in kw.items():
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive and finite, got {v!r}")


def birefringence_limit(sigma: float, confidence: float, finesse: float, L: float, wavelength: float) -> float:
    """Upper limit on Delta n from an ellipticity noise floor ``sigma``."""
    _check_positive(sigma=sigma, finesse=finesse, L=L, wavelength=wavelength)
    return confidence_factor(confidence) * sigma * wavelength / (2.0 * finesse * L)


def ae_limit(sigma: float, confidence: float, finesse: float, int_B2_dL: float, wavelength: float) -> float:
    """Upper limit on A_e [T^-2]; equals the Delta n limit over 3 <B^2>."""
    _check_positive(sigma=sigma, finesse=finesse, int_B2_dL=int_B2_dL, wavelength=wavelength)
    return confidence_factor(confidence) * sigma * wavelength / (6.0 * finesse * int_B2_dL)


def cross_section_limit(delta_n_limit: float, B: float) -> float:
    """Photon-photon cross-section bound [m^2] from a Delta n bound measured at field ``B``.

    The cross-section scales as the square of the quartic coupling, i.e. as
    ``(Delta n / Delta n_EHW(B))**2`` times the QED value.  ``B`` is the rms
    field of the measurement, sqrt(int_B2_dL / L) for non-uniform magnets.
    """
    _check_positive(delta_n_limit=delta_n_limit, B=B)
    return SIGMA_GG_EHW * (delta_n_limit / ehw_birefringence(B)) ** 2


def noise_floor_limits(
    sigma: float,
    confidence: float,
    finesse: float,
    L: float,
    int_B2_dL: float,
    wavelength: float,
) -> LimitResult:
    """All three limits from one ellipticity noise floor."""
    dn = birefringence_limit(sigma, confidence, finesse, L, wavelength)
    ae = ae_limit(sigma, confidence, finesse, int_B2_dL, wavelength)
    b_rms = math.sqrt(int_B2_dL / L)
    return LimitResult(
        delta_n_limit=dn,
        A_e_limit=ae,
        sigma_gamma_gamma_limit=cross_section_limit(dn, b_rms),
        confidence=confidence,
    )
