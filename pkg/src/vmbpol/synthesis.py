"""Time-domain synthesis of the heterodyne ellipsometer photocurrent.

The detector sees ``q * I_out * (1 + rin(t)) * [sigma^2 + eta^2 + alpha^2 +
2 eta Psi + 2 eta alpha]`` plus shot, dark and Johnson current noise.  All
random draws come from per-block substreams keyed by ``(seed, block index)``,
so a record is bit-identical however the blocks are distributed over workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Sequence

import numpy as np

from .birefringence import BeamParams, BirefringenceModel, FieldRegion, birefringence, is_b2_proportional
from .constants import CONSTANTS
from .exceptions import ConfigError, DomainError

__all__ = [
    "BLOCK_SIZE",
    "MAX_SAMPLES",
    "MagnetSpec",
    "ModulatorSpec",
    "RinSpec",
    "DetectorSpec",
    "AlphaModel",
    "SpuriousHarmonic",
    "OpticsSpec",
    "NoiseSwitches",
    "SynthConfig",
    "TimeSeries",
    "single_pass_retardation",
    "ellipticity_signal",
    "synthesize",
]

#: samples per RNG substream; part of the reproducibility contract.
BLOCK_SIZE = 4096
MAX_SAMPLES = 200_000_000

_STREAM_NOISE = 0
_STREAM_ALPHA_FLICKER = 1
_STREAM_RIN_FLICKER = 2


# --------------------------------------------------------------------------- specs


@dataclass(frozen=True)
class MagnetSpec:
    """One rotating dipole magnet.

    ``orientation_offset`` is added to the field angle; two identical magnets
    with offsets 0 and pi/2 (fields at 90 degrees) cancel each other.
    """

    B_ext: float
    L: float
    int_B2_dL: float | None = None
    nu_mag: float = 0.0
    theta_mag: float = 0.0
    orientation_offset: float = 0.0

    def __post_init__(self):
        if self.int_B2_dL is None:
            object.__setattr__(self, "int_B2_dL", self.B_ext**2 * self.L)

    @property
    def region(self) -> FieldRegion:
        return FieldRegion(self.B_ext, self.L, self.int_B2_dL)


@dataclass(frozen=True)
class ModulatorSpec:
    """PEM: eta(t) = eta0 cos(2 pi nu_mod t + theta_mod)."""

    eta0: float
    nu_mod: float
    theta_mod: float = 0.0


@dataclass(frozen=True)
class RinSpec:
    """Relative intensity noise density [1/sqrt(Hz)].

    Flat at ``white``; below ``corner`` an extra 1/f power segment is added,
    giving ``white * sqrt(1 + corner/nu)`` there.
    """

    white: float = 0.0
    corner: float = 0.0

    def __call__(self, nu):
        nu = np.asarray(nu, dtype=float)
        excess = np.where(nu < self.corner, self.corner / np.maximum(nu, 1e-300), 0.0)
        out = self.white * np.sqrt(1.0 + excess)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DetectorSpec:
    """Photodetector and transimpedance front end.

    q : responsivity [A/W]
    G : transimpedance gain [ohm]
    dark_noise_density : dark-current noise V_dark/G [A/sqrt(Hz)]
    temperature : transimpedance resistor temperature [K]
    """

    q: float = 0.7
    G: float = 1e6
    dark_noise_density: float = 0.0
    temperature: float = 0.0
    rin: Callable[[float], float] = field(default_factory=RinSpec)

    @property
    def johnson_density(self) -> float:
        """Johnson current noise sqrt(4 k_B T / G) [A/sqrt(Hz)]."""
        return math.sqrt(4.0 * CONSTANTS.k_B * self.temperature / self.G)


@dataclass(frozen=True)
class SpuriousHarmonic:
    """Extra ellipticity a*sin(2 pi k nu_mag t + phase) locked to the rotation."""

    k: int
    amplitude: float
    phase: float = 0.0


@dataclass(frozen=True)
class AlphaModel:
    """Static and slowly varying spurious ellipticity alpha(t).

    alpha(t) = dc + drift * (t - t0) + flicker process, where the flicker
    process has one-sided PSD ``flicker**2 * corner / f`` between 1/T and
    ``corner`` and nothing above.
    """

    dc: float = 0.0
    drift: float = 0.0
    flicker: float = 0.0
    corner: float = 0.0


@dataclass(frozen=True)
class OpticsSpec:
    """Extinction ``sigma2``, power at the analyser ``I_out`` [W], cavity finesse."""

    sigma2: float = 0.0
    I_out: float = 5e-3
    finesse: float = 0.0

    @property
    def amplification(self) -> float:
        """Effective path multiplication 2F/pi (1 with no cavity)."""
        return 2.0 * self.finesse / math.pi if self.finesse > 0 else 1.0


@dataclass(frozen=True)
class NoiseSwitches:
    shot: bool = True
    dark: bool = True
    johnson: bool = True
    rin: bool = True

    @classmethod
    def off(cls) -> "NoiseSwitches":
        return cls(False, False, False, False)

    @property
    def any(self) -> bool:
        return self.shot or self.dark or self.johnson or self.rin


@dataclass(frozen=True)
class SynthConfig:
    magnets: Sequence[MagnetSpec]
    modulator: ModulatorSpec
    optics: OpticsSpec = OpticsSpec()
    detector: DetectorSpec = DetectorSpec()
    alpha: AlphaModel = AlphaModel()
    beam: BeamParams = BeamParams()
    sample_rate: float = 1000.0
    noise: NoiseSwitches = NoiseSwitches()
    harmonics: Sequence[SpuriousHarmonic] = ()
    units: Literal["A", "relative"] = "A"

    @property
    def reference_intensity(self) -> float:
        """I_out expressed in the units of the synthesized samples."""
        return self.detector.q * self.optics.I_out if self.units == "A" else 1.0

    def validate(self, duration: float | None = None) -> None:
        """Raise :class:`ConfigError` listing every violation found."""
        errs = []
        if not self.magnets:
            errs.append(("magnets", "at least one magnet is required"))
        for i, m in enumerate(self.magnets):
            for name in ("B_ext", "L", "int_B2_dL", "nu_mag"):
                if not getattr(m, name) >= 0:
                    errs.append((f"magnets[{i}].{name}", "must be non-negative"))
        mod = self.modulator
        if not mod.eta0 > 0:
            errs.append(("modulator.eta0", "must be positive"))
        if not mod.nu_mod > 0:
            errs.append(("modulator.nu_mod", "must be positive"))
        if not 0 < self.detector.q <= 2:
            errs.append(("detector.q", "must lie in (0, 2] A/W"))
        if not self.detector.G > 0:
            errs.append(("detector.G", "must be positive"))
        if not self.detector.temperature >= 0:
            errs.append(("detector.temperature", "must be non-negative"))
        if not self.detector.dark_noise_density >= 0:
            errs.append(("detector.dark_noise_density", "must be non-negative"))
        if not self.optics.I_out >= 0:
            errs.append(("optics.I_out", "must be non-negative"))
        if not self.optics.sigma2 >= 0:
            errs.append(("optics.sigma2", "must be non-negative"))
        if not self.optics.finesse >= 0:
            errs.append(("optics.finesse", "must be non-negative"))
        if self.units not in ("A", "relative"):
            errs.append(("units", "must be 'A' or 'relative'"))
        nu_mag = max((m.nu_mag for m in self.magnets), default=0.0)
        top = mod.nu_mod + 2.0 * nu_mag
        if not self.sample_rate > 4.0 * top:
            errs.append(("sample_rate", f"must exceed 4 x (nu_mod + 2 nu_mag) = {4.0 * top:g} Hz"))
        if duration is not None:
            if not duration > 0:
                errs.append(("duration", "must be positive"))
            elif duration * self.sample_rate > MAX_SAMPLES:
                errs.append(("duration", f"record exceeds {MAX_SAMPLES} samples"))
        if errs:
            raise ConfigError(errs)
        if mod.eta0 > 0.3:
            warnings.warn(f"eta0={mod.eta0} > 0.3: small-ellipticity expansion is poor", RuntimeWarning, stacklevel=3)
        if mod.nu_mod <= 2.0 * nu_mag:
            warnings.warn("nu_mod <= 2 nu_mag: sidebands fold around dc", RuntimeWarning, stacklevel=3)


# ---------------------------------------------------------------------- container


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled detector record.

    ``units`` is ``"A"`` (photocurrent) or ``"relative"`` (I_Tr / I_out);
    ``i_out`` is the analyser-input intensity expressed in the same units,
    which the ratio estimators need.
    """

    sample_rate: float
    samples: np.ndarray
    t0: float = 0.0
    seed: int | None = None
    units: str = "A"
    i_out: float | None = None
    chunk_layout: str = f"SeedSequence(seed, spawn_key=(0, block)); block={BLOCK_SIZE}"

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.samples)) / self.sample_rate


# ------------------------------------------------------------------ ellipticity


def single_pass_retardation(magnet: MagnetSpec, model: BirefringenceModel, beam: BeamParams) -> float:
    """Signed optical path difference Delta n * L [m] for one magnet.

    B^2-proportional models use the measured ``int_B2_dL``; the others use
    ``B_ext`` over the geometric length.
    """
    if is_b2_proportional(model):
        per_t2 = birefringence(model, FieldRegion(1.0, 1.0), beam).delta_n
        return per_t2 * magnet.int_B2_dL
    result = birefringence(model, magnet.region, beam)
    if not result.regime_valid:
        warnings.warn("birefringence model evaluated inside its regime gap", RuntimeWarning, stacklevel=2)
    return result.delta_n * magnet.L


def ellipticity_signal(
    magnets: Sequence[MagnetSpec],
    model: BirefringenceModel,
    beam: BeamParams,
    finesse: float,
    t,
):
    """Cavity-amplified ellipticity Psi(t) from a set of rotating magnets."""
    if not magnets:
        raise DomainError("at least one magnet is required")
    t = np.asarray(t, dtype=float)
    gain = 2.0 * finesse / math.pi if finesse > 0 else 1.0
    out = np.zeros_like(t)
    for m in magnets:
        psi0 = math.pi * single_pass_retardation(m, model, beam) / beam.wavelength
        theta = 2.0 * math.pi * m.nu_mag * t + m.theta_mag + m.orientation_offset
        out = out + psi0 * np.sin(2.0 * theta)
    out = gain * out
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------------- synthesis


@dataclass(frozen=True)
class _SlowProcess:
    freqs: np.ndarray
    cos_amp: np.ndarray
    sin_amp: np.ndarray

    def __call__(self, t):
        if self.freqs.size == 0:
            return np.zeros_like(t)
        phase = 2.0 * np.pi * np.outer(t, self.freqs)
        return np.cos(phase) @ self.cos_amp + np.sin(phase) @ self.sin_amp


def _flicker_process(level: float, corner: float, duration: float, seed: int, stream: int) -> _SlowProcess:
    """Gaussian process with 1/f PSD below ``corner`` by random-phase spectral synthesis.

    Components sit on the record's Fourier grid k/T, so the process can be
    evaluated on any block independently.
    """
    df = 1.0 / duration
    n = int(math.floor(corner * duration)) if level > 0 and corner > 0 else 0
    freqs = df * np.arange(1, n + 1)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))
    coeff = rng.standard_normal((2, n))
    if n == 0:
        return _SlowProcess(freqs, coeff[0], coeff[1])
    psd = level**2 * corner / freqs
    # a cos + b sin with a, b ~ N(0, S df) carries power S df
    sd = np.sqrt(psd * df)
    return _SlowProcess(freqs, coeff[0] * sd, coeff[1] * sd)


def _block_samples(cfg: SynthConfig, model, seed, n_total, t0, block, slow, psi0s):
    fs = cfg.sample_rate
    start = block * BLOCK_SIZE
    stop = min(start + BLOCK_SIZE, n_total)
    idx = np.arange(start, stop)
    t = t0 + idx / fs

    mod = cfg.modulator
    eta = mod.eta0 * np.cos(2.0 * np.pi * mod.nu_mod * t + mod.theta_mod)

    gain = cfg.optics.amplification
    psi = np.zeros_like(t)
    for m, psi0 in zip(cfg.magnets, psi0s):
        theta = 2.0 * np.pi * m.nu_mag * t + m.theta_mag + m.orientation_offset
        psi += psi0 * np.sin(2.0 * theta)
    psi *= gain
    nu_rot = cfg.magnets[0].nu_mag
    for h in cfg.harmonics:
        psi += h.amplitude * np.sin(2.0 * np.pi * h.k * nu_rot * t + h.phase)

    a = cfg.alpha
    alpha = a.dc + a.drift * (t - t0) + slow["alpha"](t)

    rel = cfg.optics.sigma2 + eta**2 + alpha**2 + 2.0 * eta * psi + 2.0 * eta * alpha

    noise = cfg.noise
    if not noise.any:
        signal = rel
        return signal if cfg.units == "relative" else cfg.detector.q * cfg.optics.I_out * signal

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAM_NOISE, block)))
    z = rng.standard_normal((4, stop - start))
    det = cfg.detector
    q_iout = det.q * cfg.optics.I_out
    per_sample = math.sqrt(fs / 2.0)

    rin_t = np.zeros_like(t)
    if noise.rin:
        white = det.rin.white if isinstance(det.rin, RinSpec) else float(det.rin(mod.nu_mod))
        rin_t = white * per_sample * z[0] + slow["rin"](t)
    current = q_iout * (1.0 + rin_t) * rel

    if noise.shot:
        i_dc = q_iout * (cfg.optics.sigma2 + 0.5 * mod.eta0**2 + a.dc**2)
        current += math.sqrt(2.0 * CONSTANTS.e_charge * i_dc) * per_sample * z[1]
    if noise.dark:
        current += det.dark_noise_density * per_sample * z[2]
    if noise.johnson:
        current += det.johnson_density * per_sample * z[3]

    if cfg.units == "relative":
        return current / q_iout
    return current


def synthesize(
    config: SynthConfig,
    model: BirefringenceModel,
    duration: float,
    seed: int = 0,
    *,
    t0: float = 0.0,
    n_jobs: int = 1,
) -> TimeSeries:
    """Generate a detector record of length ``duration`` seconds.

    Output is a deterministic function of ``(config, model, duration, seed,
    t0)``; ``n_jobs`` only changes how blocks are scheduled.
    """
    config.validate(duration)
    if config.units == "relative" and config.noise.any and not config.detector.q * config.optics.I_out > 0:
        raise ConfigError([("optics.I_out", "must be positive to express noise in relative units")])
    fs = config.sample_rate
    n_total = int(round(duration * fs))
    psi0s = [math.pi * single_pass_retardation(m, model, config.beam) / config.beam.wavelength for m in config.magnets]

    a = config.alpha
    rin = config.detector.rin
    slow = {
        "alpha": _flicker_process(a.flicker, a.corner, duration, seed, _STREAM_ALPHA_FLICKER),
        "rin": _flicker_process(
            rin.white if isinstance(rin, RinSpec) and config.noise.rin else 0.0,
            rin.corner if isinstance(rin, RinSpec) else 0.0,
            duration,
            seed,
            _STREAM_RIN_FLICKER,
        ),
    }

    n_blocks = -(-n_total // BLOCK_SIZE)

    def work(b):
        return _block_samples(config, model, seed, n_total, t0, b, slow, psi0s)

    if n_jobs > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(work, range(n_blocks)))
    else:
        parts = [work(b) for b in range(n_blocks)]
    samples = np.concatenate(parts) if parts else np.zeros(0)
    return TimeSeries(
        sample_rate=fs,
        samples=samples,
        t0=t0,
        seed=seed,
        units=config.units,
        i_out=config.reference_intensity,
    )
