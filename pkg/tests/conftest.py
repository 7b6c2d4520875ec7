import os

import pytest
from hypothesis import settings

from src.models import ElectronState, LaserConfig, LaserMode, QuadratureSettings

settings.register_profile("default", max_examples=50, deadline=None)
settings.register_profile("fast", max_examples=10, deadline=None)
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "default"))

THETA = 2.0e-3
OMEGA1 = 1.55


@pytest.fixture
def electron() -> ElectronState:
    return ElectronState.head_on(1.0e9)


@pytest.fixture
def single_color() -> LaserConfig:
    return LaserConfig(modes=(LaserMode(nu=1, a0=1.3, helicity=1),))


@pytest.fixture
def two_color() -> LaserConfig:
    return LaserConfig(
        modes=(LaserMode(nu=1, a0=1.3, helicity=1), LaserMode(nu=2, a0=1.0, helicity=1))
    )


@pytest.fixture
def quadrature() -> QuadratureSettings:
    return QuadratureSettings()
