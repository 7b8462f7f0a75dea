"""Exclusion curves for axion-like and millicharged particles.

Given an upper limit on the magnetically induced birefringence (or
dichroism), each mass on a grid is mapped to the largest coupling or charge
still compatible with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .birefringence import MCP_GAP_BAND, McpModel, BeamParams, _MCP_COEFFS, mcp_a_epsilon, mcp_chi
from .constants import BRIDGE
from .exceptions import DomainError

__all__ = [
    "ExclusionCurve",
    "ENVELOPE_FRACTION",
    "alp_exclusion",
    "mcp_exclusion",
    "mcp_regime_solutions",
]

#: a point is flagged where the mixing factor drops below this fraction of its envelope
ENVELOPE_FRACTION = 1e-3
_REL_TOL = 1e-4


@dataclass(frozen=True)
class ExclusionCurve:
    """Upper bound on a coupling (eV^-1) or charge fraction versus mass (eV).

    ``valid`` is False at spikes of the mixing factor and, for MCPs, where no
    asymptotic regime applies; ``limit`` is NaN there.
    """

    mass_grid: np.ndarray
    limit: np.ndarray
    valid: np.ndarray
    quantity: str = "g"

    columns = ("mass_eV", "limit", "valid")

    def rows(self):
        return np.column_stack([self.mass_grid, self.limit, self.valid.astype(int)])


def _check_grid(mass_grid):
    m = np.asarray(mass_grid, dtype=float)
    if m.ndim != 1 or m.size == 0:
        raise DomainError("mass grid must be a non-empty 1-D sequence")
    if np.any(m <= 0):
        raise DomainError("masses must be positive")
    if np.any(np.diff(m) <= 0):
        raise DomainError("mass grid must be strictly increasing")
    return m


def _one_minus_sinc(y):
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < 0.05
    y2 = y * y
    series = y2 / 6.0 - y2**2 / 120.0 + y2**3 / 5040.0 - y2**4 / 362880.0
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = 1.0 - np.sin(y) / y
    return np.where(small, series, direct)


def alp_exclusion(
    B: float,
    L: float,
    mass_grid,
    *,
    delta_n_limit: float | None = None,
    dichroism_limit: float | None = None,
    beam: BeamParams | None = None,
) -> ExclusionCurve:
    """ALP coupling bound g(m) [eV^-1] from a birefringence or dichroism limit.

    Exactly one of ``delta_n_limit`` / ``dichroism_limit`` must be given.
    ``B`` in tesla, ``L`` in metres.
    """
    if (delta_n_limit is None) == (dichroism_limit is None):
        raise DomainError("give exactly one of delta_n_limit or dichroism_limit")
    if not (B > 0 and L > 0):
        raise DomainError("B and L must be positive")
    m = _check_grid(mass_grid)
    omega = (beam or BeamParams()).photon_energy
    b = BRIDGE.tesla_to_eV2 * B
    l_nat = BRIDGE.meter_to_inv_eV * L
    x = l_nat * m**2 / (4.0 * omega)

    if delta_n_limit is not None:
        if not delta_n_limit > 0:
            raise DomainError("delta_n_limit must be positive")
        y = 2.0 * x
        factor = _one_minus_sinc(y)
        # upper envelope: y^2/6 below, 1 + 1/y above
        envelope = np.minimum(y**2 / 6.0, 1.0 + 1.0 / y)
        with np.errstate(divide="ignore"):
            g = np.sqrt(2.0 * delta_n_limit * m**2 / (b**2 * factor))
    else:
        if not dichroism_limit > 0:
            raise DomainError("dichroism_limit must be positive")
        with np.errstate(invalid="ignore", divide="ignore"):
            sinc = np.where(x < 1e-4, 1.0 - x**2 / 6.0, np.sin(x) / x)
        factor = sinc**2
        envelope = np.minimum(1.0, 1.0 / x**2)
        with np.errstate(divide="ignore"):
            g = (4.0 / (b * l_nat)) * np.sqrt(dichroism_limit / (2.0 * factor))

    valid = factor >= ENVELOPE_FRACTION * envelope
    limit = np.where(valid, g, np.nan)
    return ExclusionCurve(mass_grid=m, limit=limit, valid=valid, quantity="g")


def _solve_log(f, guess):
    """Bisection on log(x) for the root of a monotone f, bracketed around ``guess``."""
    lo, hi = math.log(guess) - math.log(10.0), math.log(guess) + math.log(10.0)
    for _ in range(60):
        if f(lo) < 0 < f(hi) or f(lo) > 0 > f(hi):
            break
        lo -= math.log(10.0)
        hi += math.log(10.0)
    else:
        return None
    # rtol on log(x) would be meaningless near x = 1; use an absolute tolerance
    # that maps onto the requested relative tolerance in x
    return math.exp(bisect(f, lo, hi, xtol=_REL_TOL / 4.0, maxiter=200))


def mcp_regime_solutions(particle: str, delta_n_limit: float, B: float, m: float, beam: BeamParams) -> tuple[float | None, float | None]:
    """Charge fractions saturating the limit in the weak and strong field regimes.

    Each regime's solution is returned only if the regime actually applies at
    that charge (chi below / above the gap band).
    """
    weak_c, strong_c = _MCP_COEFFS[particle]
    a1 = mcp_a_epsilon(1.0, m)
    chi1 = mcp_chi(McpModel(particle, 1.0, m), beam, B)
    log_target = math.log(delta_n_limit)

    def weak(log_eps):
        return math.log(abs(weak_c) * mcp_a_epsilon(math.exp(log_eps), m) * B**2) - log_target

    def strong(log_eps):
        eps = math.exp(log_eps)
        chi = mcp_chi(McpModel(particle, eps, m), beam, B)
        return math.log(abs(strong_c) * chi ** (-4.0 / 3.0) * mcp_a_epsilon(eps, m) * B**2) - log_target

    guess_weak = (delta_n_limit / (abs(weak_c) * a1 * B**2)) ** 0.25
    guess_strong = (delta_n_limit / (abs(strong_c) * chi1 ** (-4.0 / 3.0) * a1 * B**2)) ** 0.375
    lo, hi = MCP_GAP_BAND

    eps_weak = _solve_log(weak, guess_weak)
    if eps_weak is not None and not chi1 * eps_weak <= lo:
        eps_weak = None
    eps_strong = _solve_log(strong, guess_strong)
    if eps_strong is not None and not chi1 * eps_strong >= hi:
        eps_strong = None
    return eps_weak, eps_strong


def mcp_exclusion(
    particle: str,
    delta_n_limit: float,
    B: float,
    mass_grid,
    beam: BeamParams | None = None,
) -> ExclusionCurve:
    """Charge-fraction bound epsilon(m) for fermion or scalar millicharged particles.

    Where both regimes admit a solution the smaller (stronger) bound is kept;
    where neither does, the point falls in the gap around chi ~ 1.
    """
    if particle not in _MCP_COEFFS:
        raise DomainError(f"particle must be 'fermion' or 'scalar', got {particle!r}")
    if not (delta_n_limit > 0 and B > 0):
        raise DomainError("delta_n_limit and B must be positive")
    m = _check_grid(mass_grid)
    beam = beam or BeamParams()
    limit = np.full(m.shape, np.nan)
    for i, mass in enumerate(m):
        sols = [e for e in mcp_regime_solutions(particle, delta_n_limit, B, float(mass), beam) if e is not None]
        if sols:
            limit[i] = min(sols)
    valid = np.isfinite(limit)
    return ExclusionCurve(mass_grid=m, limit=limit, valid=valid, quantity="epsilon")
