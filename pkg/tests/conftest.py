import os

import pytest
from hypothesis import HealthCheck, settings

from vmbpol.synthesis import MagnetSpec, ModulatorSpec, NoiseSwitches, OpticsSpec, SynthConfig

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def approx(expected, rel=None, abs=None, **kw):
    """pytest.approx without its 1e-12 absolute floor, which would make every
    relative check on quantities like 1e-20 pass trivially."""
    if rel is None and abs is None:
        rel = 1e-6
    return pytest.approx(expected, rel=rel, abs=0.0 if abs is None else abs, **kw)


def make_config(
    *,
    eta0=1e-2,
    nu_mod=100.0,
    nu_mag=2.0,
    theta_mod=0.0,
    theta_mag=0.0,
    sigma2=0.0,
    I_out=5e-3,
    finesse=0.0,
    fs=1024.0,
    noise=None,
    units="A",
    magnets=None,
    **kw,
):
    """Small synthesis config used throughout the tests."""
    if magnets is None:
        magnets = (MagnetSpec(B_ext=2.3, L=0.2, nu_mag=nu_mag, theta_mag=theta_mag),)
    return SynthConfig(
        magnets=magnets,
        modulator=ModulatorSpec(eta0=eta0, nu_mod=nu_mod, theta_mod=theta_mod),
        optics=OpticsSpec(sigma2=sigma2, I_out=I_out, finesse=finesse),
        sample_rate=fs,
        noise=noise if noise is not None else NoiseSwitches.off(),
        units=units,
        **kw,
    )


@pytest.fixture
def quiet_config():
    return make_config()


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
