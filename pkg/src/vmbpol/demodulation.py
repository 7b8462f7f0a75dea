"""Heterodyne demodulation: Fourier components at known frequencies.

Lines are measured by least-squares projection onto sinusoids at the exact
carrier and sideband frequencies over an integer number of magnet periods.
When the frequencies are commensurate with the record this is the
single-bin DFT; otherwise it also removes the mutual leakage of the lines.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .exceptions import DomainError, ModulationAbsentError, ResolutionError
from .synthesis import TimeSeries

__all__ = [
    "SpectralTable",
    "demodulate",
    "estimate_psi",
    "sensitivity_from_spectrum",
    "ellipticity_spectrum",
    "line_frequencies",
]

_PROJECTION_CHUNK = 1 << 20
_GUARD_BINS = 3


def _wrap(phase: float) -> float:
    """Wrap to (-pi, pi]."""
    w = math.remainder(phase, 2.0 * math.pi)
    return math.pi if w == -math.pi else w


@dataclass(frozen=True)
class SpectralTable:
    """The four heterodyne lines plus the broadband noise at the sidebands.

    Amplitudes are one-sided (a line ``A cos(2 pi f t + phi)`` has amplitude
    ``A``) in the units of the record.  Carrier phases follow the cosine
    convention.  Sideband phases are referred to the ellipticity term
    ``2 eta(t) Psi sin 2theta(t)``, so a positive ellipticity reads
    ``theta_mod +/- 2 theta_mag``.

    ``noise_density_plus/minus`` is the magnitude spectral density R with
    ``R**2 = T * <|a|^2>``: the rms line-amplitude noise in a 1 s record.
    """

    I_dc: float
    amp_mod: float
    phase_mod: float
    amp_minus: float
    phase_minus: float
    amp_plus: float
    phase_plus: float
    amp_2mod: float
    phase_2mod: float
    noise_density_plus: float
    noise_density_minus: float
    resolution: float
    nu_mod: float
    nu_mag: float
    I_out: float | None = None
    n_samples: int = 0

    @property
    def noise_density(self) -> float:
        return self.noise_density_plus

    @property
    def duration(self) -> float:
        return 1.0 / self.resolution

    def to_dict(self) -> dict:
        return asdict(self)


def line_frequencies(nu_mod: float, nu_mag: float) -> dict[str, float]:
    return {
        "mod": nu_mod,
        "minus": nu_mod - 2.0 * nu_mag,
        "plus": nu_mod + 2.0 * nu_mag,
        "2mod": 2.0 * nu_mod,
    }


def _usable_length(n: int, fs: float, nu_mag: float) -> int:
    periods = math.floor(n / fs * nu_mag + 1e-9)
    return min(n, int(round(periods / nu_mag * fs)))


def _project(x: np.ndarray, fs: float, t0: float, freqs: list[float]) -> np.ndarray:
    """Least-squares coefficients [dc, c_1, s_1, c_2, s_2, ...]."""
    k = 1 + 2 * len(freqs)
    gram = np.zeros((k, k))
    rhs = np.zeros(k)
    w = 2.0 * np.pi * np.asarray(freqs)
    for start in range(0, len(x), _PROJECTION_CHUNK):
        stop = min(start + _PROJECTION_CHUNK, len(x))
        t = t0 + np.arange(start, stop) / fs
        a = np.empty((stop - start, k))
        a[:, 0] = 1.0
        ph = np.outer(t, w)
        a[:, 1::2] = np.cos(ph)
        a[:, 2::2] = np.sin(ph)
        gram += a.T @ a
        rhs += a.T @ x[start:stop]
    return np.linalg.solve(gram, rhs)


def _residual(x, fs, t0, freqs, coef):
    t = t0 + np.arange(len(x)) / fs
    model = np.full_like(x, coef[0], dtype=float)
    for j, f in enumerate(freqs):
        ph = 2.0 * np.pi * f * t
        model += coef[1 + 2 * j] * np.cos(ph) + coef[2 + 2 * j] * np.sin(ph)
    return x - model


def _band_density(amp2: np.ndarray, freqs: np.ndarray, center: float, halfwidth: float, avoid: list[float], df: float, T: float) -> float:
    sel = np.abs(freqs - center) <= halfwidth
    for f in avoid:
        sel &= np.abs(freqs - f) > _GUARD_BINS * df
    if not np.any(sel):
        return float("nan")
    # |a|^2 of a complex Gaussian bin is exponential: median = mean * ln 2
    mean_power = np.median(amp2[sel]) / math.log(2.0)
    return math.sqrt(T * mean_power)


def demodulate(
    ts: TimeSeries,
    nu_mod: float,
    nu_mag: float,
    *,
    noise_halfwidth: float | None = None,
) -> SpectralTable:
    """Measure the Fourier components of an ellipsometer record.

    Parameters
    ----------
    ts : TimeSeries
    nu_mod, nu_mag : float
        Modulator and magnet rotation frequencies [Hz].
    noise_halfwidth : float, optional
        Half-width [Hz] of the band around each sideband used for the noise
        density; defaults to ``nu_mag``.

    Raises
    ------
    ResolutionError
        If the record is shorter than 4 magnet periods.
    """
    if not nu_mag > 0 or not nu_mod > 0:
        raise DomainError("nu_mod and nu_mag must be positive")
    fs = ts.sample_rate
    n = len(ts.samples)
    if n / fs < 4.0 / nu_mag:
        raise ResolutionError(
            f"record of {n / fs:.4g} s is shorter than 4/nu_mag = {4.0 / nu_mag:.4g} s; sidebands unresolved"
        )
    if 2.0 * nu_mod >= fs / 2.0:
        raise ResolutionError("2 nu_mod lies above the Nyquist frequency")
    n_use = _usable_length(n, fs, nu_mag)
    x = np.asarray(ts.samples[:n_use], dtype=float)
    T = n_use / fs

    lines = line_frequencies(nu_mod, nu_mag)
    names = list(lines)
    freqs = [lines[k] for k in names]
    coef = _project(x, fs, ts.t0, freqs)

    amp, phase = {}, {}
    for j, name in enumerate(names):
        c, s = coef[1 + 2 * j], coef[2 + 2 * j]
        amp[name] = math.hypot(c, s)
        phase[name] = math.atan2(-s, c)
    # sidebands: A cos(wt + phi) = A sin(wt + phi + pi/2); the lower sideband
    # enters the product expansion with a minus sign
    phase["plus"] = _wrap(phase["plus"] + math.pi / 2)
    phase["minus"] = _wrap(phase["minus"] - math.pi / 2)

    resid = _residual(x, fs, ts.t0, freqs, coef)
    spec = np.fft.rfft(resid)
    amp2 = (2.0 * np.abs(spec) / n_use) ** 2
    fgrid = np.fft.rfftfreq(n_use, 1.0 / fs)
    df = 1.0 / T
    halfwidth = nu_mag if noise_halfwidth is None else noise_halfwidth
    avoid = [0.0] + freqs + [nu_mod + k * nu_mag for k in (-4, -3, -1, 1, 3, 4)]
    r_plus = _band_density(amp2, fgrid, lines["plus"], halfwidth, avoid, df, T)
    r_minus = _band_density(amp2, fgrid, lines["minus"], halfwidth, avoid, df, T)

    return SpectralTable(
        I_dc=float(coef[0]),
        amp_mod=amp["mod"],
        phase_mod=_wrap(phase["mod"]),
        amp_minus=amp["minus"],
        phase_minus=phase["minus"],
        amp_plus=amp["plus"],
        phase_plus=phase["plus"],
        amp_2mod=amp["2mod"],
        phase_2mod=_wrap(phase["2mod"]),
        noise_density_plus=r_plus,
        noise_density_minus=r_minus,
        resolution=df,
        nu_mod=nu_mod,
        nu_mag=nu_mag,
        I_out=ts.i_out,
        n_samples=n_use,
    )


def _resolve_iout(table: SpectralTable, I_out):
    I_out = table.I_out if I_out is None else I_out
    if I_out is None or not I_out > 0:
        raise DomainError("I_out (in the record's units) must be given and positive")
    if not table.amp_2mod > 0:
        raise ModulationAbsentError("no 2 nu_mod component: modulation absent")
    return I_out


def estimate_psi(table: SpectralTable, I_out: float | None = None) -> float:
    """Ellipticity as the mean of the two normalised sideband amplitudes.

    ``I_out`` must be in the same units as the record (for a photocurrent
    record, ``q * I_out``); by default it is taken from the table.
    """
    I_out = _resolve_iout(table, I_out)
    norm = math.sqrt(2.0 * I_out * table.amp_2mod)
    return 0.5 * (table.amp_plus / norm + table.amp_minus / norm)


def sensitivity_from_spectrum(table: SpectralTable, I_out: float | None = None, sideband: str = "plus") -> float:
    """Ellipticity sensitivity s = R / sqrt(4 I_out I_2mod) [1/sqrt(Hz)].

    ``sideband`` picks the noise density: ``"plus"`` (the usual assumption
    R+ = R-), ``"minus"``, or ``"pooled"`` (rms of both).
    """
    I_out = _resolve_iout(table, I_out)
    if sideband == "plus":
        r = table.noise_density_plus
    elif sideband == "minus":
        r = table.noise_density_minus
    elif sideband == "pooled":
        r = math.sqrt(0.5 * (table.noise_density_plus**2 + table.noise_density_minus**2))
    else:
        raise DomainError(f"sideband must be 'plus', 'minus' or 'pooled', got {sideband!r}")
    return r / math.sqrt(4.0 * I_out * table.amp_2mod)


def ellipticity_spectrum(
    ts: TimeSeries,
    nu_mod: float,
    nu_mag: float,
    band: float = 0.78,
    table: SpectralTable | None = None,
    sideband: str = "plus",
) -> tuple[np.ndarray, np.ndarray, float]:
    """Ellipticity amplitude spectrum in a band centred on 2 nu_mag.

    Each bin of the chosen sideband region is normalised like the estimator,
    ``|a| / sqrt(2 I_out I_2mod)``.  Its in-phase and quadrature parts then
    have standard deviation ``s / sqrt(T)``.

    Returns
    -------
    freqs : offsets from the carrier [Hz]
    amplitudes : ellipticity amplitude per bin
    signal_value : value in the bin at exactly 2 nu_mag
    """
    table = table or demodulate(ts, nu_mod, nu_mag)
    I_out = _resolve_iout(table, None)
    norm = math.sqrt(2.0 * I_out * table.amp_2mod)
    n_use = table.n_samples
    x = np.asarray(ts.samples[:n_use], dtype=float)
    fs = ts.sample_rate
    spec = np.fft.rfft(x - x.mean())
    fgrid = np.fft.rfftfreq(n_use, 1.0 / fs)
    sign = 1.0 if sideband == "plus" else -1.0
    offsets = sign * (fgrid - nu_mod)
    sel = np.abs(offsets - 2.0 * nu_mag) <= band / 2.0
    amps = 2.0 * np.abs(spec[sel]) / n_use / norm
    signal_amp = table.amp_plus if sideband == "plus" else table.amp_minus
    return offsets[sel], amps, signal_amp / norm
