import pytest

from capmimo import SystemConfig


@pytest.fixture(scope="session")
def default_cfg() -> SystemConfig:
    """The standard scenario: l = 2 m, wavelength 0.04 m, d = 10 m, P = 1, n0 = 2."""
    return SystemConfig()
