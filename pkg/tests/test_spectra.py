"""Mode content of the degenerate harmonics of multicolour drivers."""

import numpy as np
import pytest

from src.models import ElectronState, LaserConfig, LaserMode, PointStatus
from src.orchestrator import evaluate_point, run_intensity_scan
from src.physcore import harmonic_energy
from src.presets import INTENSITY_LADDER
from src.schemas import OmegaGrid, ScanSpec

from .conftest import THETA

pytestmark = pytest.mark.slow

THREE_COLOR = LaserConfig(
    modes=(
        LaserMode(nu=1, a0=1.4, helicity=1),
        LaserMode(nu=2, a0=1.2, helicity=1),
        LaserMode(nu=3, a0=1.0, helicity=1),
    )
)
THREE_COLOR_THETA = 2.4e-3


def point_at(config: LaserConfig, omega: float, theta: float = THETA) -> ScanSpec:
    return ScanSpec(
        laser=config,
        electron_energy_ev=1.0e9,
        omega_grid=OmegaGrid(min_ev=omega, max_ev=omega, count=1),
        theta_rad=(theta,),
    )


def point_at_harmonic(config: LaserConfig, harmonic: int) -> ScanSpec:
    return point_at(config, harmonic_energy(float(harmonic), THETA, ElectronState.head_on(1.0e9), config))


def mode_weights(spec: ScanSpec) -> dict[int, float]:
    result = evaluate_point(spec, 0, 0)
    assert result.status is PointStatus.COMPLETED
    return {mode.ell: mode.weight for mode in result.modes}


@pytest.mark.parametrize(
    ("nu", "helicity", "expected"),
    [(2, 1, {2, 3}), (3, 1, {2, 4}), (2, -1, {0, 3})],
)
def test_degenerate_harmonic_carries_the_two_predicted_modes(nu, helicity, expected):
    config = LaserConfig(
        modes=(LaserMode(nu=1, a0=1.3, helicity=1), LaserMode(nu=nu, a0=1.0, helicity=helicity))
    )
    result = evaluate_point(point_at_harmonic(config, nu), 0, 0)
    assert result.status is PointStatus.COMPLETED
    weights = {mode.ell: mode.weight for mode in result.modes}
    assert sum(weights.get(ell, 0.0) for ell in expected) >= 0.9
    # the rest sits on windings of channels absorbing one colour and emitting another
    assert result.allowed_fraction >= 1.0 - 2e-3


def test_single_color_harmonic_is_a_single_mode():
    config = LaserConfig(modes=(LaserMode(nu=1, a0=1.3, helicity=1),))
    result = evaluate_point(point_at_harmonic(config, 2), 0, 0)
    leading = max(result.modes, key=lambda mode: mode.weight)
    assert leading.ell == 3
    assert leading.weight > 0.9
    assert result.allowed_fraction >= 1.0 - 1e-4


def test_single_color_superpositions_are_adjacent_modes():
    config = LaserConfig(modes=(LaserMode(nu=1, a0=1.3, helicity=1),))
    electron = ElectronState.head_on(1.0e9)
    low, high = (harmonic_energy(n, THETA, electron, config) for n in (1.0, 3.0))
    results = [evaluate_point(point_at(config, float(omega)), 0, 0) for omega in np.linspace(low, high, 25)]
    peak = max(result.total_rate for result in results)

    leading = set()
    for result in results:
        if result.total_rate < 1e-3 * peak:
            continue
        present = sorted(mode.ell for mode in result.modes if mode.weight >= 0.05)
        assert present[-1] - present[0] <= 1, present
        leading.add(max(result.modes, key=lambda mode: mode.weight).ell)
    assert {2, 3, 4} <= leading


def test_three_color_low_overlap_mixes_two_modes():
    weights = mode_weights(point_at(THREE_COLOR, 1.75e6, THREE_COLOR_THETA))
    assert weights.get(2, 0.0) >= 0.05
    assert weights.get(3, 0.0) >= 0.05
    assert weights[2] + weights[3] >= 0.8


def test_three_color_high_overlap_mixes_three_modes():
    result = evaluate_point(point_at(THREE_COLOR, 2.65e6, THREE_COLOR_THETA), 0, 0)
    assert result.status is PointStatus.COMPLETED
    weights = {mode.ell: mode.weight for mode in result.modes}
    assert all(weights.get(ell, 0.0) >= 0.05 for ell in (2, 3, 4))
    assert max(weights, key=weights.get) == 3
    assert weights[2] + weights[3] + weights[4] >= 0.95
    assert result.allowed_fraction >= 0.95


def test_intensity_ladder_broadens_and_redshifts_the_first_harmonic():
    config = LaserConfig(
        modes=(LaserMode(nu=1, a0=0.8, helicity=1), LaserMode(nu=2, a0=0.5, helicity=1))
    )
    spec = ScanSpec(
        laser=config,
        electron_energy_ev=1.0e9,
        omega_grid=OmegaGrid(min_ev=1.0e5, max_ev=1.6e6, count=100),
        theta_rad=(THETA,),
    )
    _, report = run_intensity_scan(spec, INTENSITY_LADDER)
    widths = [band.linewidth_fraction for band in report.bands]
    assert report.redshift_monotonic
    assert report.broadening_monotonic, widths
    assert report.scaling_consistent_angle
    assert all(band.deviation_angle <= 0.2 for band in report.bands)
