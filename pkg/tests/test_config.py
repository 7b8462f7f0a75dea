import json

import pytest
import yaml
from hypothesis import given, strategies as st

from conftest import approx
from vmbpol.birefringence import AlpModel, EhwModel, McpModel, PostMaxwellianModel
from vmbpol.config import SCHEMA, RunConfig, load_config
from vmbpol.exceptions import ConfigError, DataIOError

BASE = {
    "name": "bench",
    "magnets": [{"B_ext_T": 2.3, "L_m": 0.2, "nu_mag_Hz": 4.0}],
    "modulator": {"eta0_rad": 0.01, "nu_mod_Hz": 506.0},
    "optics": {"I_out_W": 0.005, "finesse": 240000},
}


def test_defaults_filled_and_round_trip():
    cfg = RunConfig(BASE)
    again = RunConfig.from_dict(cfg.to_dict())
    assert again == cfg
    assert again.to_dict() == cfg.to_dict()
    assert cfg["beam"]["wavelength_nm"] == 1064.0


def test_every_key_carries_a_unit_or_is_dimensionless():
    dimensionless = {"sigma2", "finesse", "r2", "eta1", "eta2", "particle", "epsilon", "kind", "k", "seed", "units",
                     "n_jobs", "confidence", "n_bins", "sideband", "exclusion", "delta_n_limit", "n_mass", "n_eta0",
                     "dir", "prefix", "shot", "dark", "johnson", "rin"}
    for section, keys in SCHEMA.items():
        for key in keys:
            assert key in dimensionless or "_" in key, f"{section}.{key}"


def test_unknown_keys_rejected_with_paths():
    bad = dict(BASE, extra=1, magnets=[{"B_ext_T": 1.0, "L_m": 1.0, "colour": "red"}])
    with pytest.raises(ConfigError) as exc:
        RunConfig(bad)
    keys = {k for k, _ in exc.value.errors}
    assert {"extra", "magnets[0].colour"} <= keys


def test_all_errors_reported_together():
    bad = {"magnets": [{"L_m": -1.0}], "modulator": {"eta0_rad": "big"}, "optics": {"finesse": 1e5, "r2": 0.9}}
    with pytest.raises(ConfigError) as exc:
        RunConfig(bad)
    keys = {k for k, _ in exc.value.errors}
    assert {"magnets[0].B_ext_T", "magnets[0].L_m", "modulator.eta0_rad", "optics"} <= keys


def test_model_requirements():
    with pytest.raises(ConfigError) as exc:
        RunConfig(dict(BASE, model={"kind": "alp", "particle": "pseudoscalar"}))
    assert {k for k, _ in exc.value.errors} == {"model.g_per_eV", "model.m_eV"}
    with pytest.raises(ConfigError):
        RunConfig(dict(BASE, model={"kind": "ehw", "m_eV": 1.0}))
    with pytest.raises(ConfigError):
        RunConfig(dict(BASE, model={"kind": "mcp", "particle": "pseudoscalar", "epsilon": 1e-6, "m_eV": 1.0}))


@pytest.mark.parametrize(
    "model,cls",
    [
        ({"kind": "ehw"}, EhwModel),
        ({"kind": "post_maxwellian", "eta1": 1.0, "eta2": 2.0}, PostMaxwellianModel),
        ({"kind": "alp", "particle": "scalar", "g_per_eV": 1e-7, "m_eV": 1e-3}, AlpModel),
        ({"kind": "mcp", "particle": "fermion", "epsilon": 1e-6, "m_eV": 1.0}, McpModel),
    ],
)
def test_model_builder(model, cls):
    assert isinstance(RunConfig(dict(BASE, model=model)).model(), cls)


def test_builders():
    cfg = RunConfig(BASE)
    sc = cfg.synth_config()
    assert sc.magnets[0].B_ext == 2.3 and sc.magnets[0].nu_mag == 4.0
    assert sc.optics.finesse == 240000
    assert cfg.beam().wavelength == approx(1064e-9)
    assert cfg.nu_mag() == 4.0 and cfg.nu_mod() == 506.0
    assert len(cfg.mass_grid()) == 100
    assert cfg.field_rms() == approx(2.3)


def test_finesse_from_r2():
    cfg = RunConfig(dict(BASE, optics={"r2": 0.9999}))
    assert cfg.finesse() == approx(31414.4, rel=1e-4)


def test_override():
    cfg = RunConfig(BASE).override(["magnets.0.B_ext_T=2.5", "synthesis.seed=7", "noise.shot=false"])
    assert cfg["magnets"][0]["B_ext_T"] == 2.5
    assert cfg["synthesis"]["seed"] == 7
    assert cfg["noise"]["shot"] is False
    with pytest.raises(ConfigError):
        RunConfig(BASE).override(["nonsense"])
    with pytest.raises(ConfigError):
        RunConfig(BASE).override(["magnets.3.B_ext_T=1"])


def test_hash_is_stable_and_sensitive():
    a, b = RunConfig(BASE), RunConfig(json.loads(json.dumps(BASE)))
    assert a.sha256 == b.sha256
    assert a.override(["synthesis.seed=1"]).sha256 != a.sha256


def test_load_json_and_yaml(tmp_path):
    j = tmp_path / "c.json"
    y = tmp_path / "c.yaml"
    j.write_text(json.dumps(BASE))
    y.write_text(yaml.safe_dump(BASE))
    assert load_config(j) == load_config(y)


def test_load_errors(tmp_path):
    with pytest.raises(DataIOError):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(bad)


@given(
    st.floats(0.0, 30.0),
    st.floats(0.01, 5.0),
    st.floats(1e-4, 0.3),
    st.integers(0, 2**31),
    st.sampled_from(["A", "relative"]),
)
def test_round_trip_property(B, L, eta0, seed, units):
    raw = {
        "magnets": [{"B_ext_T": B, "L_m": L, "nu_mag_Hz": 1.0}],
        "modulator": {"eta0_rad": eta0},
        "synthesis": {"seed": seed, "units": units},
    }
    cfg = RunConfig(raw)
    text = cfg.to_json()
    assert RunConfig(json.loads(text)) == cfg
    assert RunConfig(yaml.safe_load(yaml.safe_dump(cfg.to_dict()))) == cfg
