"""Ellipticity noise budget of the heterodyne ellipsometer as a function of eta0."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CONSTANTS
from .exceptions import DomainError
from .synthesis import DetectorSpec

__all__ = ["NoiseBudget", "shot_noise_sensitivity", "noise_budget"]


def shot_noise_sensitivity(I_out: float, q: float) -> float:
    """Shot-noise limit sqrt(e / (I_out q)) for eta0^2 >> sigma^2."""
    if not (I_out > 0 and q > 0):
        raise DomainError("I_out and q must be positive")
    return math.sqrt(CONSTANTS.e_charge / (I_out * q))


@dataclass(frozen=True)
class NoiseBudget:
    eta0: np.ndarray
    s_shot: np.ndarray
    s_dark: np.ndarray
    s_J: np.ndarray
    s_RIN: np.ndarray

    @property
    def s_total(self) -> np.ndarray:
        return np.sqrt(self.s_shot**2 + self.s_dark**2 + self.s_J**2 + self.s_RIN**2)

    columns = ("eta0", "s_shot", "s_dark", "s_J", "s_RIN", "s_total")

    def rows(self):
        cols = [getattr(self, c) for c in self.columns]
        return np.column_stack(cols)

    def optimum(self) -> tuple[float, float]:
        """(eta0, s_total) at the grid point of lowest total noise."""
        i = int(np.argmin(self.s_total))
        return float(self.eta0[i]), float(self.s_total[i])


def noise_budget(eta0, I_out: float, sigma2: float, detector: DetectorSpec, nu_mod: float = 0.0) -> NoiseBudget:
    """Per-source ellipticity sensitivity curves [1/sqrt(Hz)].

    ``nu_mod`` is where the laser RIN is evaluated.
    """
    eta0 = np.atleast_1d(np.asarray(eta0, dtype=float))
    if np.any(eta0 <= 0) or not I_out > 0 or sigma2 < 0:
        raise DomainError("eta0 and I_out must be positive, sigma2 non-negative")
    q = detector.q
    dc = sigma2 + eta0**2 / 2.0
    s_shot = np.sqrt(2.0 * CONSTANTS.e_charge / (I_out * q) * dc / eta0**2)
    s_dark = detector.dark_noise_density / (I_out * q * eta0)
    s_j = detector.johnson_density / (I_out * q * eta0)
    rin = float(detector.rin(nu_mod)) if nu_mod > 0 else float(detector.rin(np.inf))
    s_rin = rin * np.sqrt(dc**2 + (eta0**2 / 2.0) ** 2) / eta0
    return NoiseBudget(eta0=eta0, s_shot=s_shot, s_dark=s_dark, s_J=s_j, s_RIN=s_rin)
