"""Virtual polarimeter for vacuum magnetic birefringence searches.

Physics models of magnetically induced vacuum birefringence, Jones-calculus
optics of a Fabry-Perot ellipsometer, a seeded signal synthesizer, heterodyne
demodulation and the statistical chain from a noise floor to physics limits.
"""

from ._version import __version__
from .birefringence import (
    AlpModel,
    BeamParams,
    EhwModel,
    FieldRegion,
    McpModel,
    PostMaxwellianModel,
    RadiativeEhwModel,
    alp_effect,
    birefringence,
    ehw_birefringence,
    mcp_birefringence,
)
from .config import RunConfig, load_config
from .constants import BRIDGE, CONSTANTS
from .demodulation import SpectralTable, demodulate, ellipticity_spectrum, estimate_psi, sensitivity_from_spectrum
from .estimators import HeterodyneDemodulator, RayleighNoiseFloor
from .exceptions import (
    ConfigError,
    DataIOError,
    DomainError,
    ModulationAbsentError,
    ResolutionError,
    SingularityError,
    VmbError,
)
from .exclusion import ExclusionCurve, alp_exclusion, mcp_exclusion
from .experiments import ExperimentParams, compare_experiments, table2_experiments
from .jones import MirrorParams, cavity_chain
from .limits import LimitResult, RayleighFit, noise_floor_limits, rayleigh_fit
from .noise import NoiseBudget, noise_budget, shot_noise_sensitivity
from .synthesis import (
    AlphaModel,
    DetectorSpec,
    MagnetSpec,
    ModulatorSpec,
    NoiseSwitches,
    OpticsSpec,
    SynthConfig,
    TimeSeries,
    synthesize,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
