import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline
from sklearn.preprocessing import FunctionTransformer

from conftest import approx, make_config
from test_demodulation import psi_config
from vmbpol.birefringence import EhwModel
from vmbpol.demodulation import demodulate, estimate_psi
from vmbpol.estimators import FEATURE_NAMES, HeterodyneDemodulator, RayleighNoiseFloor
from vmbpol.exceptions import DomainError
from vmbpol.synthesis import NoiseSwitches, synthesize


def _records(psis):
    return np.vstack([synthesize(psi_config(p), EhwModel(), 4.0).samples for p in psis])


def test_get_params_and_clone():
    est = HeterodyneDemodulator(nu_mod=100.0, nu_mag=2.0, sample_rate=1024.0, I_out=3.5e-3)
    params = est.get_params()
    assert params == {"nu_mod": 100.0, "nu_mag": 2.0, "sample_rate": 1024.0, "I_out": 3.5e-3, "noise_halfwidth": None}
    assert clone(est).get_params() == params
    est.set_params(nu_mag=3.0)
    assert est.nu_mag == 3.0


def test_transform_matches_functional_api():
    X = _records([1e-6, 2e-6])
    est = HeterodyneDemodulator(nu_mod=100.0, nu_mag=2.0, sample_rate=1024.0, I_out=0.7 * 5e-3)
    feats = est.fit_transform(X)
    assert feats.shape == (2, len(FEATURE_NAMES))
    ref = demodulate(synthesize(psi_config(1e-6), EhwModel(), 4.0), 100.0, 2.0)
    assert feats[0, FEATURE_NAMES.index("amp_plus")] == approx(ref.amp_plus)
    assert list(est.get_feature_names_out()) == list(FEATURE_NAMES)


def test_predict_psi():
    X = _records([1e-6, 5e-5])
    est = HeterodyneDemodulator(nu_mod=100.0, nu_mag=2.0, sample_rate=1024.0, I_out=0.7 * 5e-3).fit(X)
    assert est.predict(X) == approx([1e-6, 5e-5], rel=1e-3)


def test_single_record_accepted():
    x = _records([1e-6])[0]
    est = HeterodyneDemodulator(nu_mod=100.0, nu_mag=2.0, sample_rate=1024.0, I_out=0.7 * 5e-3).fit(x)
    assert est.predict(x).shape == (1,)


def test_pipeline_usage():
    X = _records([1e-6])
    pipe = Pipeline([("scale", FunctionTransformer(lambda a: a * 2.0)), ("demod", HeterodyneDemodulator(100.0, 2.0, 1024.0, I_out=0.7e-2))])
    out = pipe.fit_transform(X)
    assert out.shape == (1, 11)


def test_not_fitted():
    with pytest.raises(NotFittedError):
        HeterodyneDemodulator().transform(np.ones((1, 100)))


def test_bad_params_rejected_on_fit():
    with pytest.raises(DomainError):
        HeterodyneDemodulator(nu_mod=-1.0).fit(np.ones((1, 100)))


def test_sensitivity_method():
    cfg = make_config(noise=NoiseSwitches(shot=True, dark=False, johnson=False, rin=False), eta0=0.05)
    X = synthesize(cfg, EhwModel(), 40.0, seed=1).samples
    est = HeterodyneDemodulator(100.0, 2.0, 1024.0, I_out=0.7 * 5e-3).fit(X)
    assert est.sensitivity(X, sideband="pooled")[0] == approx(6.77e-9, rel=0.2)


def _rayleigh(sigma, n, seed=0):
    rng = np.random.default_rng(seed)
    return np.abs(rng.normal(0, sigma, n) + 1j * rng.normal(0, sigma, n))


def test_noise_floor_estimator():
    r = _rayleigh(3.35e-9, 10_000)
    est = RayleighNoiseFloor(confidence=0.95).fit(r)
    assert est.sigma_ == approx(3.35e-9, rel=0.02)
    assert est.predict(r).mean() == approx(0.05, abs=0.01)
    assert est.p_value(np.array([0.0]))[0] == approx(1.0)
    scores = est.score_samples(r[:10])
    assert scores.shape == (10,)
    assert est.get_params() == {"confidence": 0.95, "n_bins": 50}


def test_noise_floor_validation():
    with pytest.raises(DomainError):
        RayleighNoiseFloor(confidence=1.5).fit(_rayleigh(1.0, 200))
    with pytest.raises(NotFittedError):
        RayleighNoiseFloor().predict([1.0])
