"""scikit-learn style wrappers around demodulation and noise-floor fitting.

They let a stack of detector records go through a ``Pipeline`` or a grid
search like any other feature extractor.  The functional API in
:mod:`vmbpol.demodulation` and :mod:`vmbpol.limits` remains the reference.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_amplitudes, check_fraction, check_positive, check_records
from .demodulation import demodulate, estimate_psi, sensitivity_from_spectrum
from .exceptions import DomainError
from .limits import confidence_factor, rayleigh_fit
from .synthesis import TimeSeries

__all__ = ["HeterodyneDemodulator", "RayleighNoiseFloor", "FEATURE_NAMES"]

FEATURE_NAMES = (
    "I_dc",
    "amp_mod",
    "phase_mod",
    "amp_minus",
    "phase_minus",
    "amp_plus",
    "phase_plus",
    "amp_2mod",
    "phase_2mod",
    "noise_density_plus",
    "noise_density_minus",
)


class HeterodyneDemodulator(TransformerMixin, BaseEstimator):
    """Map detector records to their heterodyne line table.

    Parameters
    ----------
    nu_mod, nu_mag : float
        Modulator and magnet rotation frequencies [Hz].
    sample_rate : float
        Sampling rate of the records [Hz].
    I_out : float, optional
        Analyser-input intensity in the units of the records.  Only
        :meth:`predict` and :meth:`sensitivity` need it.
    noise_halfwidth : float, optional
        Band half-width for the sideband noise density, default ``nu_mag``.

    Each row of ``X`` is one record sampled from ``t = 0``.  The transform is
    stateless; ``fit`` only checks the parameters.
    """

    def __init__(self, nu_mod=506.0, nu_mag=0.3, sample_rate=4096.0, I_out=None, noise_halfwidth=None):
        self.nu_mod = nu_mod
        self.nu_mag = nu_mag
        self.sample_rate = sample_rate
        self.I_out = I_out
        self.noise_halfwidth = noise_halfwidth

    def fit(self, X, y=None):
        check_positive("nu_mod", self.nu_mod)
        check_positive("nu_mag", self.nu_mag)
        check_positive("sample_rate", self.sample_rate)
        if self.I_out is not None:
            check_positive("I_out", self.I_out)
        X = check_records(X)
        self.n_features_in_ = X.shape[1]
        return self

    def _tables(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_records(X)
        return [
            demodulate(
                TimeSeries(sample_rate=self.sample_rate, samples=row, i_out=self.I_out),
                self.nu_mod,
                self.nu_mag,
                noise_halfwidth=self.noise_halfwidth,
            )
            for row in X
        ]

    def transform(self, X):
        """Line table as an ``(n_records, 11)`` array, columns per :data:`FEATURE_NAMES`."""
        return np.array([[getattr(t, k) for k in FEATURE_NAMES] for t in self._tables(X)])

    def predict(self, X):
        """Ellipticity Psi of each record."""
        return np.array([estimate_psi(t) for t in self._tables(X)])

    def sensitivity(self, X, sideband="plus"):
        """Ellipticity sensitivity [1/sqrt(Hz)] of each record."""
        return np.array([sensitivity_from_spectrum(t, sideband=sideband) for t in self._tables(X)])

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURE_NAMES, dtype=object)


class RayleighNoiseFloor(BaseEstimator):
    """Rayleigh noise-floor model of spectral amplitudes.

    ``fit`` estimates sigma by maximum likelihood; ``predict`` flags
    amplitudes above the ``confidence`` quantile as candidate signals (1) and
    the rest as noise (0).

    Parameters
    ----------
    confidence : float
        Confidence level of the exceedance threshold.
    n_bins : int
        Histogram bins for the chi^2 diagnostic.
    """

    def __init__(self, confidence=0.95, n_bins=50):
        self.confidence = confidence
        self.n_bins = n_bins

    def fit(self, X, y=None):
        check_fraction("confidence", self.confidence)
        if int(self.n_bins) < 2:
            raise DomainError("n_bins must be at least 2")
        fit = rayleigh_fit(check_amplitudes(X), n_bins=int(self.n_bins))
        self.fit_ = fit
        self.sigma_ = fit.sigma
        self.chi2_per_dof_ = fit.chi2_per_dof
        self.threshold_ = confidence_factor(self.confidence) * fit.sigma
        return self

    def score_samples(self, X):
        """Log Rayleigh density of each amplitude."""
        check_is_fitted(self, "sigma_")
        r = check_amplitudes(X)
        s2 = self.sigma_**2
        with np.errstate(divide="ignore"):
            return np.log(r / s2) - r**2 / (2.0 * s2)

    def predict(self, X):
        check_is_fitted(self, "threshold_")
        return (check_amplitudes(X) > self.threshold_).astype(int)

    def p_value(self, X):
        """Probability that pure noise exceeds each amplitude."""
        check_is_fitted(self, "sigma_")
        r = check_amplitudes(X)
        return np.exp(-(r**2) / (2.0 * self.sigma_**2))
