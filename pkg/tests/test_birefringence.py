import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import approx
from vmbpol.birefringence import (
    MCP_GAP_BAND,
    RADIATIVE_FACTOR,
    AlpModel,
    BeamParams,
    EhwModel,
    FieldRegion,
    McpModel,
    PostMaxwellianModel,
    RadiativeEhwModel,
    alp_effect,
    alp_x,
    birefringence,
    ehw_birefringence,
    ehw_indices,
    mcp_a_epsilon,
    mcp_birefringence,
    mcp_chi,
    post_maxwellian_birefringence,
)
from vmbpol.constants import CONSTANTS
from vmbpol.exceptions import DomainError

BEAM = BeamParams(1064e-9)
# independent natural-unit factors (Heaviside-Lorentz, hbar = c = 1)
T_EV2 = 195.35
M_INV_EV = 5.0677e6


def test_ehw_at_2p3_tesla():
    assert ehw_birefringence(2.3) == approx(2.1e-23, rel=1e-2)


def test_ehw_zero_field():
    assert ehw_birefringence(0.0) == 0.0


def test_ehw_negative_field_rejected():
    with pytest.raises(DomainError):
        ehw_birefringence(-1.0)


def test_index_table_coefficients():
    B = 2.5
    t = ehw_indices(B)
    unit = CONSTANTS.A_e * B**2
    assert t.n_par == approx(7 * unit)
    assert t.n_perp == approx(4 * unit)
    assert t.eps_par == approx(10 * unit)
    assert t.eps_perp == approx(-4 * unit)
    assert t.mu_par == approx(4 * unit)
    assert t.mu_perp == approx(12 * unit)
    assert t.delta_n == approx(ehw_birefringence(B), rel=1e-12)


def test_index_table_survives_double_precision():
    # excess ~1e-23 would vanish if stored as 1 + excess
    assert ehw_indices(1.0).delta_n > 0


def test_post_maxwellian_reduces_to_ehw():
    pm = PostMaxwellianModel.ehw()
    B = 1.7
    got = post_maxwellian_birefringence(pm.eta1, pm.eta2, B)
    assert got == approx(ehw_birefringence(B), rel=1e-10)


def test_born_infeld_has_no_birefringence():
    bi = PostMaxwellianModel.born_infeld(0.37)
    assert birefringence(bi, FieldRegion(2.0, 1.0)).delta_n == 0.0


def test_post_maxwellian_sign():
    assert post_maxwellian_birefringence(2.0, 1.0, 1.0) < 0


def test_radiative_correction_factor():
    assert RADIATIVE_FACTOR == approx(25 * CONSTANTS.alpha / (4 * math.pi))
    dn = birefringence(RadiativeEhwModel(), FieldRegion(2.3, 1.0)).delta_n
    assert dn / ehw_birefringence(2.3) == approx(1 + 0.0145, rel=1e-3)


@given(st.floats(0.0, 100.0), st.floats(0.01, 10.0))
def test_b2_scaling(B, k):
    a = ehw_birefringence(B)
    assert ehw_birefringence(k * B) == approx(k * k * a, rel=1e-12, abs=1e-300)


def test_path_integrated_field():
    region = FieldRegion(2.3, 0.4, int_B2_dL=1.85)
    dn = birefringence(EhwModel(), region, path_integrated=True).delta_n
    assert dn == approx(3 * CONSTANTS.A_e * 1.85 / 0.4, rel=1e-12)


# ---------------------------------------------------------------- ALP


def _alp_natural(g, m, B, L, omega):
    b, l = B * T_EV2, L * M_INV_EV
    x = l * m**2 / (4 * omega)
    dk = 2 * (g * b * l / 4) ** 2 * (math.sin(x) / x) ** 2
    dn = g**2 * b**2 / (2 * m**2) * (1 - math.sin(2 * x) / (2 * x))
    return x, dn, dk


@pytest.mark.parametrize("m", [3e-4, 1e-3, 3e-3, 1e-2])
def test_alp_matches_independent_oracle(m):
    g, B, L = 1e-6, 2.3, 0.4
    x, dn, dk = _alp_natural(g, m, B, L, BEAM.photon_energy)
    res = alp_effect(AlpModel("pseudoscalar", g, m), FieldRegion(B, L), BEAM)
    assert alp_x(m, L, BEAM.photon_energy) == approx(x, rel=1e-3)
    assert res.delta_n == approx(dn, rel=2e-3)
    assert res.delta_kappa == approx(dk, rel=2e-3)


def _region_for_x(x, m=1e-3, B=2.0):
    L = 4 * BEAM.photon_energy * x / (m**2 * M_INV_EV)
    return FieldRegion(B, L)


def test_alp_small_x_limit():
    g, m = 1e-7, 1e-3
    region = _region_for_x(0.1, m)
    res = alp_effect(AlpModel("pseudoscalar", g, m), region, BEAM)
    b, l, w = region.B_ext * T_EV2, region.L * M_INV_EV, BEAM.photon_energy
    dn_asym = g**2 * b**2 * m**2 * l**2 / (48 * w**2)
    dk_asym = 2 * (g * b * l / 4) ** 2
    assert res.delta_n == approx(dn_asym, rel=1e-2)
    assert res.delta_kappa == approx(dk_asym, rel=1e-2)


def test_alp_large_x_limit():
    g, m = 1e-7, 1e-3
    region = _region_for_x(100.0, m)
    res = alp_effect(AlpModel("pseudoscalar", g, m), region, BEAM)
    b = region.B_ext * T_EV2
    assert res.delta_n == approx(g**2 * b**2 / (2 * m**2), rel=1e-2)


def test_alp_tiny_x_is_stable():
    # the naive 1 - sin(y)/y cancels completely here
    res = alp_effect(AlpModel("pseudoscalar", 1e-7, 1e-9), FieldRegion(1.0, 1.0), BEAM)
    assert res.delta_n > 0
    region = FieldRegion(1.0, 1.0)
    b, l, w = T_EV2, M_INV_EV, BEAM.photon_energy
    assert res.delta_n == approx((1e-7) ** 2 * b**2 * 1e-18 * l**2 / (48 * w**2), rel=1e-2)
    assert region.uniform


def test_alp_scalar_sign_opposite():
    args = (1e-6, 1e-3)
    r = FieldRegion(2.3, 0.4)
    ps = alp_effect(AlpModel("pseudoscalar", *args), r, BEAM)
    sc = alp_effect(AlpModel("scalar", *args), r, BEAM)
    assert ps.delta_n > 0 and ps.delta_kappa > 0
    assert sc.delta_n == approx(-ps.delta_n)
    assert sc.delta_kappa == approx(-ps.delta_kappa)


@given(st.floats(1e-9, 1e-3), st.floats(1e-5, 1.0))
def test_alp_g_squared_scaling(g, m):
    r = FieldRegion(2.0, 1.0)
    a = alp_effect(AlpModel("pseudoscalar", g, m), r, BEAM)
    b = alp_effect(AlpModel("pseudoscalar", 2 * g, m), r, BEAM)
    assert b.delta_n == approx(4 * a.delta_n, rel=1e-9)
    assert b.delta_kappa == approx(4 * a.delta_kappa, rel=1e-9)


@given(st.floats(1e-6, 10.0))
def test_alp_effects_nonnegative(m):
    r = alp_effect(AlpModel("pseudoscalar", 1e-6, m), FieldRegion(2.0, 1.0), BEAM)
    assert r.delta_n >= 0 and r.delta_kappa >= 0


@pytest.mark.parametrize("kw", [dict(particle="vector", g=1, m=1), dict(particle="scalar", g=-1, m=1), dict(particle="scalar", g=1, m=0)])
def test_alp_validation(kw):
    with pytest.raises(DomainError):
        AlpModel(**kw)


# ---------------------------------------------------------------- MCP


def test_mcp_electron_weak_field_reduces_to_ehw():
    m = McpModel("fermion", 1.0, CONSTANTS.m_e_ev)
    assert mcp_a_epsilon(1.0, CONSTANTS.m_e_ev) == approx(CONSTANTS.A_e, rel=1e-9)
    res = mcp_birefringence(m, BEAM, 2.3)
    assert mcp_chi(m, BEAM, 2.3) < 1e-10
    assert res.delta_n == approx(ehw_birefringence(2.3), rel=1e-9)
    assert res.regime_valid


def test_mcp_chi_formula():
    m = McpModel("fermion", 1e-3, 1.0)
    k = CONSTANTS
    mass = 1.0 * k.e_charge / k.c**2
    hw = BEAM.photon_energy * k.e_charge
    expected = 1.5 * hw / (mass * k.c**2) * (1e-3 * k.e_charge * 2.0 * k.hbar / (mass**2 * k.c**2))
    assert mcp_chi(m, BEAM, 2.0) == approx(expected, rel=1e-12)


def _mass_for_chi(chi, eps=1e-3, B=2.0):
    # chi scales as m^-3
    chi1 = mcp_chi(McpModel("fermion", eps, 1.0), BEAM, B)
    return (chi1 / chi) ** (1 / 3)


@pytest.mark.parametrize("chi", [1e-3, 1e3])
def test_mcp_fermion_scalar_sign_opposition(chi):
    m = _mass_for_chi(chi)
    f = mcp_birefringence(McpModel("fermion", 1e-3, m), BEAM, 2.0)
    s = mcp_birefringence(McpModel("scalar", 1e-3, m), BEAM, 2.0)
    assert f.delta_n * s.delta_n < 0
    assert f.regime_valid and s.regime_valid


def test_mcp_regime_signs():
    weak = _mass_for_chi(1e-3)
    strong = _mass_for_chi(1e3)
    assert mcp_birefringence(McpModel("fermion", 1e-3, weak), BEAM, 2.0).delta_n > 0
    assert mcp_birefringence(McpModel("fermion", 1e-3, strong), BEAM, 2.0).delta_n < 0
    assert mcp_birefringence(McpModel("scalar", 1e-3, weak), BEAM, 2.0).delta_n < 0
    assert mcp_birefringence(McpModel("scalar", 1e-3, strong), BEAM, 2.0).delta_n > 0


def test_mcp_weak_ratio_scalar_to_fermion():
    m = _mass_for_chi(1e-4)
    f = mcp_birefringence(McpModel("fermion", 1e-3, m), BEAM, 2.0).delta_n
    s = mcp_birefringence(McpModel("scalar", 1e-3, m), BEAM, 2.0).delta_n
    assert s / f == approx(-0.5, rel=1e-12)


def test_mcp_strong_coefficient():
    gamma = math.sqrt(math.pi) * 2 ** (1 / 3) * math.gamma(2 / 3) ** 2 / math.gamma(1 / 6)
    m = _mass_for_chi(1e4)
    model = McpModel("fermion", 1e-3, m)
    chi = mcp_chi(model, BEAM, 2.0)
    expected = -(9 / 7) * (45 / 2) * gamma * chi ** (-4 / 3) * mcp_a_epsilon(1e-3, m) * 4.0
    assert mcp_birefringence(model, BEAM, 2.0).delta_n == approx(expected, rel=1e-12)


@pytest.mark.parametrize("particle", ["fermion", "scalar"])
def test_mcp_epsilon_exponents(particle):
    def slope(m):
        a = abs(mcp_birefringence(McpModel(particle, 1e-6, m), BEAM, 2.0).delta_n)
        b = abs(mcp_birefringence(McpModel(particle, 2e-6, m), BEAM, 2.0).delta_n)
        return math.log(b / a) / math.log(2)

    m_weak = _mass_for_chi(1e-4, eps=1e-6)
    m_strong = _mass_for_chi(1e4, eps=1e-6)
    assert slope(m_weak) == approx(4.0, abs=1e-9)
    assert slope(m_strong) == approx(8 / 3, abs=1e-9)


def test_mcp_gap_band_flagged():
    lo, hi = MCP_GAP_BAND
    for chi, valid in [(0.1, True), (0.5, False), (2.0, False), (10.0, True)]:
        m = _mass_for_chi(chi)
        res = mcp_birefringence(McpModel("fermion", 1e-3, m), BEAM, 2.0)
        assert res.regime_valid is valid
        assert np.isfinite(res.delta_n)


@pytest.mark.parametrize("kw", [dict(particle="boson", epsilon=1, m=1), dict(particle="fermion", epsilon=-1, m=1), dict(particle="fermion", epsilon=1, m=0)])
def test_mcp_validation(kw):
    with pytest.raises(DomainError):
        McpModel(**kw)


def test_dispatch_covers_all_models():
    r = FieldRegion(2.0, 1.0)
    for model in [EhwModel(), RadiativeEhwModel(), PostMaxwellianModel(1.0, 2.0), AlpModel("scalar", 1e-7, 1e-3), McpModel("fermion", 1e-3, 1.0)]:
        assert np.isfinite(birefringence(model, r, BEAM).delta_n)
