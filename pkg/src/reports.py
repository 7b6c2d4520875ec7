"""
Band-merge and angular-aperture summaries of finished scans.
"""

import logging
import math

import numpy as np
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from .channelplanner import adjacent_pairs, overlap_fraction
from .errors import CoverageError
from .physcore import beta_sigma, emission_kinematics, gamma_star, photon_energy
from .schemas import (
    ApertureEntry,
    ApertureReport,
    BandMergeReport,
    IntensityBand,
    PairOverlap,
    ScanSpec,
    SpectrumTable,
)
from .templating import render

logger = logging.getLogger(__name__)

SCALING_TOLERANCE = 0.2
APERTURE_BOUNDS = (0.3, 3.0)
MIN_APERTURE_ANGLES = 3
# Local maxima weaker than this share of the strongest emission are fringes
LEADING_PEAK_HEIGHT = 0.2


def _half_crossing(omegas: np.ndarray, totals: np.ndarray, start: int, step: int, half: float) -> float:
    """Walk from `start` while the rate stays above `half`, interpolating the crossing."""
    j = start
    while 0 <= j + step < len(totals) and totals[j + step] > half:
        j += step
    k = j + step
    if not 0 <= k < len(totals):
        return float(omegas[j])
    return float(omegas[k] + (half - totals[k]) * (omegas[j] - omegas[k]) / (totals[j] - totals[k]))


def leading_peak(
    omegas: np.ndarray, totals: np.ndarray, free_edge: float
) -> tuple[float | None, float | None]:
    """
    Position of the first-harmonic feature below the free edge, and the
    fractional width of the band it opens.

    The first harmonic peaks at its dressed edge, the lowest-energy local
    maximum above LEADING_PEAK_HEIGHT of the strongest emission there. Higher
    harmonics redshifted under the free edge sit above it. The width runs from
    the lower half-maximum crossing of that peak to the last point under the
    free edge still above half of it.
    """
    below = omegas <= free_edge
    if not below.any() or totals[below].max() <= 0.0:
        return None, None
    omegas, totals = omegas[below], totals[below]
    peaks, _ = find_peaks(totals, height=LEADING_PEAK_HEIGHT * totals.max())
    peak = int(peaks[0]) if peaks.size else int(np.argmax(totals))
    half = 0.5 * totals[peak]
    upper = int(np.flatnonzero(totals >= half)[-1])
    left = _half_crossing(omegas, totals, peak, -1, half)
    right = _half_crossing(omegas, totals, upper, 1, half)
    position = float(omegas[peak])
    return position, (right - left) / position


def pair_overlaps(spec: ScanSpec, theta: float) -> list[PairOverlap]:
    config, electron = spec.laser, spec.electron
    overlaps = []
    for pair in adjacent_pairs(config, spec.n_max):
        harmonic = pair.first.harmonic_index(config)
        omega = photon_energy(harmonic, theta, electron, config.omega1_ev)
        beta = beta_sigma(emission_kinematics(omega, theta, electron, config.omega1_ev), config)
        overlaps.append(
            PairOverlap(
                first=str(pair.first),
                second=str(pair.second),
                beta=beta,
                overlap_fraction=overlap_fraction(pair, beta),
            )
        )
    return overlaps


def band_merge_report(
    tables: list[SpectrumTable], n_max: int | None = None, tolerance: float = SCALING_TOLERANCE
) -> BandMergeReport:
    """
    Compare the leading harmonic feature across an intensity ladder at the
    first scanned angle.

    The measured redshift of the leading peak is set against the dressed-mass
    scaling 1/(1 + Σa_0²) and against its angle-aware form 1/(1 + Σa_0² + γ²θ²).
    """
    if not tables:
        raise ValueError("no tables to compare")

    bands: list[IntensityBand] = []
    for table in tables:
        spec = table.spec
        if n_max is not None:
            spec = spec.model_copy(update={"n_max": n_max})
        theta = spec.theta_rad[0]
        electron = spec.electron
        free_edge = photon_energy(1.0, theta, electron, spec.laser.omega1_ev)
        omegas, totals = table.totals(table.thetas[0])
        peak, linewidth = leading_peak(omegas, totals, free_edge)
        bands.append(
            IntensityBand(
                a0s=spec.laser.a0s,
                a0_squared_sum=spec.laser.a0_squared_sum,
                free_edge_ev=free_edge,
                leading_peak_ev=peak,
                linewidth_fraction=linewidth,
                predicted_ratio=1.0,
                predicted_ratio_angle=1.0,
                pair_overlaps=pair_overlaps(spec, theta),
            )
        )

    reference = bands[0]
    spec = tables[0].spec
    theta = spec.theta_rad[0]
    angular = (spec.electron.gamma * theta) ** 2
    for band in bands:
        band.predicted_ratio = (1.0 + reference.a0_squared_sum) / (1.0 + band.a0_squared_sum)
        band.predicted_ratio_angle = (1.0 + reference.a0_squared_sum + angular) / (
            1.0 + band.a0_squared_sum + angular
        )
        if band.leading_peak_ev is not None and reference.leading_peak_ev is not None:
            band.redshift_ratio = band.leading_peak_ev / reference.leading_peak_ev
            band.deviation = abs(band.redshift_ratio / band.predicted_ratio - 1.0)
            band.deviation_angle = abs(band.redshift_ratio / band.predicted_ratio_angle - 1.0)

    peaks = [band.leading_peak_ev for band in bands]
    widths = [band.linewidth_fraction for band in bands]
    report = BandMergeReport(
        theta_rad=theta,
        tolerance=tolerance,
        bands=bands,
        redshift_monotonic=None not in peaks and all(b < a for a, b in zip(peaks, peaks[1:])),
        broadening_monotonic=None not in widths and all(b > a for a, b in zip(widths, widths[1:])),
        scaling_consistent=all(b.deviation is not None and b.deviation <= tolerance for b in bands),
        scaling_consistent_angle=all(
            b.deviation_angle is not None and b.deviation_angle <= tolerance for b in bands
        ),
    )
    logger.info(
        f"📊 Band merge over {len(bands)} intensities: redshift {report.redshift_monotonic}, "
        f"broadening {report.broadening_monotonic}"
    )
    return report


def angular_aperture_report(tables: list[SpectrumTable]) -> ApertureReport:
    """
    Emission-weighted mean cone angle of each table against a_eff/γ and 1/γ*.

    The order-unity check uses 1/γ*, which stays finite as a_0 → 0.
    """
    entries = []
    for table in tables:
        thetas = np.array(table.thetas)
        if thetas.size < MIN_APERTURE_ANGLES:
            raise CoverageError(
                f"insufficient θ coverage: {thetas.size} angle(s), need {MIN_APERTURE_ANGLES}"
            )
        weights = np.array([trapezoid(totals, omegas) for omegas, totals in map(table.totals, thetas)])
        total = float(trapezoid(weights, thetas))
        mean = float(trapezoid(thetas * weights, thetas)) / total if total > 0.0 else None

        spec = table.spec
        electron = spec.electron
        a_eff = math.sqrt(spec.laser.a0_squared_sum)
        g_star = gamma_star(electron, spec.laser)
        scale_a_eff = a_eff / electron.gamma
        scale_star = 1.0 / g_star
        ratio_a_eff = mean / scale_a_eff if mean is not None and scale_a_eff > 0.0 else None
        ratio_star = mean / scale_star if mean is not None else None
        entries.append(
            ApertureEntry(
                a0s=spec.laser.a0s,
                a_eff=a_eff,
                gamma=electron.gamma,
                gamma_star=g_star,
                mean_theta_rad=mean,
                scale_a_eff_rad=scale_a_eff,
                scale_gamma_star_rad=scale_star,
                ratio_a_eff=ratio_a_eff,
                ratio_gamma_star=ratio_star,
                order_unity=ratio_star is not None
                and APERTURE_BOUNDS[0] <= ratio_star <= APERTURE_BOUNDS[1],
            )
        )

    means = [entry.mean_theta_rad for entry in entries]
    return ApertureReport(
        entries=entries,
        broadening_monotonic=None not in means and all(b > a for a, b in zip(means, means[1:])),
    )


def format_band_merge(report: BandMergeReport) -> str:
    return render("band_merge_report.txt.j2", report=report)


def format_aperture(report: ApertureReport) -> str:
    return render("aperture_report.txt.j2", report=report)
