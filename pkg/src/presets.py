"""
Ready-made run configurations for the standard driver setups
"""

from collections.abc import Callable

from .models import LaserMode
from .schemas import OmegaGrid, RunConfig

ELECTRON_ENERGY_EV = 1.0e9
INTENSITY_LADDER = [(0.8, 0.5), (1.3, 1.0), (3.3, 3.0)]


def _spectrum_grid() -> OmegaGrid:
    return OmegaGrid(min_ev=5.0e4, max_ev=5.0e6, count=200)


def create_default_single_color_config() -> RunConfig:
    """Factory method to create the single-colour control run (a_0 = 1.3)"""
    return RunConfig(
        electron_energy_ev=ELECTRON_ENERGY_EV,
        modes=[LaserMode(nu=1, a0=1.3, helicity=1)],
        theta_mrad=[2.0],
        omega_grid=_spectrum_grid(),
    )


def create_default_two_color_config(nu: int = 2, opposite: bool = False) -> RunConfig:
    """Factory method to create a two-colour run with ω_2 = ν ω_1 and a_0 = (1.3, 1.0)"""
    return RunConfig(
        electron_energy_ev=ELECTRON_ENERGY_EV,
        modes=[
            LaserMode(nu=1, a0=1.3, helicity=1),
            LaserMode(nu=nu, a0=1.0, helicity=-1 if opposite else 1),
        ],
        theta_mrad=[2.0],
        omega_grid=_spectrum_grid(),
    )


def create_default_three_color_config() -> RunConfig:
    """Factory method to create the three-colour run ν = (1, 2, 3), a_0 = (1.4, 1.2, 1.0)"""
    return RunConfig(
        electron_energy_ev=ELECTRON_ENERGY_EV,
        modes=[
            LaserMode(nu=1, a0=1.4, helicity=1),
            LaserMode(nu=2, a0=1.2, helicity=1),
            LaserMode(nu=3, a0=1.0, helicity=1),
        ],
        theta_mrad=[2.4],
        omega_grid=_spectrum_grid(),
    )


def create_default_intensity_ladder_config() -> RunConfig:
    """Factory method to create the ν = 2 intensity ladder over three cone angles"""
    config = create_default_two_color_config(nu=2)
    return RunConfig.model_validate(
        {**config.model_dump(), "theta_mrad": [1.0, 2.0, 3.0], "intensity_ladder": INTENSITY_LADDER}
    )


PRESETS: dict[str, Callable[[], RunConfig]] = {
    "single-color": create_default_single_color_config,
    "two-color-nu2": lambda: create_default_two_color_config(nu=2),
    "two-color-nu3": lambda: create_default_two_color_config(nu=3),
    "two-color-opposite": lambda: create_default_two_color_config(nu=2, opposite=True),
    "three-color": create_default_three_color_config,
    "intensity-ladder": create_default_intensity_ladder_config,
}
