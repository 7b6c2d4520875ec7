import math

import numpy as np
import pytest

from src.errors import CoverageError
from src.models import LaserConfig, LaserMode
from src.reports import (
    angular_aperture_report,
    band_merge_report,
    format_aperture,
    format_band_merge,
    leading_peak,
)
from src.schemas import OmegaGrid, ScanSpec, SpectrumRow, SpectrumTable, table_metadata

LADDER = [(0.8, 0.5), (1.3, 1.0), (3.3, 3.0)]
OMEGAS = np.linspace(1.0e5, 1.44e6, 2001)


def ladder_spec(a0s: tuple[float, ...], thetas: tuple[float, ...] = (2.0e-3,)) -> ScanSpec:
    return ScanSpec(
        laser=LaserConfig(
            modes=(LaserMode(nu=1, a0=a0s[0], helicity=1), LaserMode(nu=2, a0=a0s[1], helicity=1))
        ),
        electron_energy_ev=1.0e9,
        omega_grid=OmegaGrid(min_ev=float(OMEGAS[0]), max_ev=float(OMEGAS[-1]), count=OMEGAS.size),
        theta_rad=thetas,
        n_phi=32,
    )


def gaussian_table(spec: ScanSpec, centre: float, width: float, theta_weights: list[float] | None = None) -> SpectrumTable:
    weights = theta_weights or [1.0] * len(spec.theta_rad)
    rows = [
        SpectrumRow(
            omega_ev=float(omega),
            theta_rad=theta,
            ell=2,
            rate=weight * math.exp(-0.5 * ((omega - centre) / width) ** 2),
            weight=1.0,
        )
        for theta, weight in zip(spec.theta_rad, weights)
        for omega in OMEGAS
    ]
    return SpectrumTable(metadata=table_metadata(spec, 0), rows=rows)


def test_leading_peak_of_a_gaussian():
    omegas = np.linspace(0.0, 2.0, 2001)
    totals = np.exp(-0.5 * ((omegas - 1.0) / 0.05) ** 2)
    peak, width = leading_peak(omegas, totals, free_edge=1.5)
    assert peak == pytest.approx(1.0)
    assert width == pytest.approx(2.0 * math.sqrt(2.0 * math.log(2.0)) * 0.05, rel=1e-3)


def test_leading_peak_ignores_emission_above_the_free_edge():
    omegas = np.linspace(0.0, 2.0, 2001)
    totals = 0.3 * np.exp(-0.5 * ((omegas - 1.0) / 0.05) ** 2) + np.exp(-0.5 * ((omegas - 1.8) / 0.05) ** 2)
    peak, _ = leading_peak(omegas, totals, free_edge=1.5)
    assert peak == pytest.approx(1.0)


def test_leading_peak_is_the_first_harmonic_under_a_redshifted_second():
    omegas = np.linspace(0.0, 2.0, 2001)
    totals = 0.5 * np.exp(-0.5 * ((omegas - 0.8) / 0.03) ** 2) + np.exp(-0.5 * ((omegas - 1.3) / 0.03) ** 2)
    peak, width = leading_peak(omegas, totals, free_edge=1.5)
    assert peak == pytest.approx(0.8)
    left = 0.8 - 0.03 * math.sqrt(2.0 * math.log(2.0))
    right = 1.3 + 0.03 * math.sqrt(2.0 * math.log(4.0))
    assert width == pytest.approx((right - left) / 0.8, rel=1e-3)


def test_leading_peak_skips_weak_fringes():
    omegas = np.linspace(0.0, 2.0, 2001)
    totals = 0.1 * np.exp(-0.5 * ((omegas - 0.6) / 0.03) ** 2) + np.exp(-0.5 * ((omegas - 1.0) / 0.05) ** 2)
    peak, _ = leading_peak(omegas, totals, free_edge=1.5)
    assert peak == pytest.approx(1.0)


def test_leading_peak_without_emission():
    omegas = np.linspace(0.0, 2.0, 11)
    assert leading_peak(omegas, np.zeros(11), free_edge=1.5) == (None, None)
    assert leading_peak(omegas, np.ones(11), free_edge=-1.0) == (None, None)


def angle_aware_ratio(spec: ScanSpec, reference: ScanSpec) -> float:
    angular = (spec.electron.gamma * spec.theta_rad[0]) ** 2
    return (1.0 + reference.laser.a0_squared_sum + angular) / (1.0 + spec.laser.a0_squared_sum + angular)


@pytest.fixture
def ladder_tables() -> list[SpectrumTable]:
    specs = [ladder_spec(a0s) for a0s in LADDER]
    return [
        gaussian_table(spec, 1.2e6 * angle_aware_ratio(spec, specs[0]), width)
        for spec, width in zip(specs, [1.0e4, 2.0e4, 4.0e4])
    ]


def test_band_merge_follows_the_angle_aware_scaling(ladder_tables):
    report = band_merge_report(ladder_tables, n_max=3)
    assert report.redshift_monotonic
    assert report.broadening_monotonic
    assert report.scaling_consistent_angle
    assert not report.scaling_consistent
    assert report.bands[0].redshift_ratio == 1.0
    assert all(band.deviation_angle < 0.01 for band in report.bands)
    assert report.bands[0].free_edge_ev == pytest.approx(1.4529e6, rel=1e-3)


def test_band_merge_lists_adjacent_pair_overlaps(ladder_tables):
    report = band_merge_report(ladder_tables, n_max=3)
    overlaps = report.bands[2].pair_overlaps
    assert overlaps
    assert all(0.0 <= overlap.overlap_fraction <= 1.0 for overlap in overlaps)
    assert all(overlap.beta < 0.0 for overlap in overlaps)
    weakest = max(o.beta for o in report.bands[0].pair_overlaps)
    strongest = min(o.beta for o in overlaps)
    assert strongest < weakest


def test_band_merge_needs_tables():
    with pytest.raises(ValueError):
        band_merge_report([])


def test_band_merge_text(ladder_tables):
    text = format_band_merge(band_merge_report(ladder_tables, n_max=2))
    lines = text.splitlines()
    assert lines[0] == "[band_merge]"
    assert "redshift_monotonic=true" in lines
    assert "scaling_consistent=false" in lines
    assert "[intensity.2]" in lines
    assert "a0s=3.3,3.0" in lines
    assert any(line.startswith("overlap.(") for line in lines)


def test_aperture_of_uniform_emission():
    spec = ladder_spec((1.3, 1.0), thetas=(1.0e-3, 2.0e-3, 3.0e-3))
    report = angular_aperture_report([gaussian_table(spec, 1.0e6, 5.0e4)])
    (entry,) = report.entries
    assert entry.mean_theta_rad == pytest.approx(2.0e-3)
    assert entry.gamma_star == pytest.approx(entry.gamma / math.sqrt(3.69))
    assert entry.ratio_gamma_star == pytest.approx(2.0e-3 * entry.gamma_star)
    assert entry.ratio_a_eff == pytest.approx(2.0e-3 * entry.gamma / math.sqrt(2.69))
    assert entry.order_unity


def test_aperture_broadens_with_intensity():
    thetas = (1.0e-3, 2.0e-3, 3.0e-3)
    weak = gaussian_table(ladder_spec((0.8, 0.5), thetas), 1.0e6, 5.0e4, [1.0, 0.5, 0.1])
    strong = gaussian_table(ladder_spec((3.3, 3.0), thetas), 1.0e6, 5.0e4, [0.2, 0.6, 1.0])
    report = angular_aperture_report([weak, strong])
    assert report.broadening_monotonic
    text = format_aperture(report)
    assert text.splitlines()[0] == "[aperture]"
    assert "broadening_monotonic=true" in text.splitlines()


def test_aperture_needs_three_angles():
    spec = ladder_spec((1.3, 1.0), thetas=(1.0e-3, 2.0e-3))
    with pytest.raises(CoverageError, match="insufficient"):
        angular_aperture_report([gaussian_table(spec, 1.0e6, 5.0e4)])
