"""
Service implementations for the individual steps of a scan point
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .laserfield import Envelope, PulseField
from .models import EmissionKinematics, LaserConfig
from .physcore import emission_kinematics
from .schemas import ModeRow, PointResult, PointStep, ScanSpec
from .volkovamp import AmplitudeGrid, amplitude_grid, plane_wave_rate_integrated
from .vortexproj import (
    VortexDecomposition,
    allowed_power_fraction,
    decompose_grid,
    selection_rule_floor,
    superposition_state,
    vortex_rate,
)

logger = logging.getLogger(__name__)

# Modes weaker than this share of a point's emission are not tabulated
ROW_WEIGHT_FLOOR = 1e-12


@lru_cache(maxsize=8)
def pulse_field(config: LaserConfig, envelope: Envelope) -> PulseField:
    """One shared, read-only field per (driver, envelope) within a process."""
    return PulseField(config=config, envelope=envelope)


@dataclass
class PointWork:
    """Intermediate state handed from step to step at one grid point"""

    spec: ScanSpec
    result: PointResult
    field: PulseField | None = None
    kinematics: EmissionKinematics | None = None
    grid: AmplitudeGrid | None = None
    decomposition: VortexDecomposition | None = None

    @classmethod
    def at(cls, spec: ScanSpec, theta_index: int, omega_index: int, step_names: list[str]) -> "PointWork":
        result = PointResult(
            theta_index=theta_index,
            omega_index=omega_index,
            omega_ev=float(spec.omegas[omega_index]),
            theta_rad=spec.theta_rad[theta_index],
            steps=[PointStep(name=name) for name in step_names],
        )
        return cls(spec=spec, result=result)


class KinematicsService:
    """Exact emission kinematics of the point"""

    @staticmethod
    def validate_kinematics(work: PointWork) -> None:
        spec, result = work.spec, work.result
        work.field = pulse_field(spec.laser, spec.envelope)
        work.kinematics = emission_kinematics(
            result.omega_ev, result.theta_rad, spec.electron, spec.laser.omega1_ev
        )
        logger.debug(f"Point {result.key} sits at s={work.kinematics.s:.6g}")


class AmplitudeService:
    """Plane-wave amplitudes on the azimuth ring"""

    @staticmethod
    def sample_amplitudes(work: PointWork) -> None:
        spec = work.spec
        work.grid = amplitude_grid(
            work.field,
            work.kinematics,
            spec.n_phi,
            spins_in=(spec.spin_in,),
            photon_helicities=(spec.photon_helicity,),
            settings=spec.quadrature,
        )
        work.result.grid_points = work.grid.grid_points
        work.result.plane_wave_rate = plane_wave_rate_integrated(
            work.grid, work.kinematics, spec.spin_in, spec.photon_helicity
        )


class ProjectionService:
    """Bessel-mode projection and its consistency checks"""

    @staticmethod
    def decompose_azimuth(work: PointWork) -> None:
        spec, result = work.spec, work.result
        decomposition = decompose_grid(work.grid, work.kinematics, spec.photon_helicity, spec.spin_in)
        work.decomposition = decomposition

        worst = 0.0
        for spin_out, coefficients in decomposition.coefficients.items():
            samples = work.grid.component(spec.spin_in, spin_out, spec.photon_helicity)
            mean_square = float(np.mean(np.abs(samples) ** 2))
            modal = sum(abs(c) ** 2 for c in coefficients.values())
            if mean_square > 0.0:
                worst = max(worst, abs(modal - mean_square) / mean_square)
        result.parseval_error = worst
        result.allowed_fraction = allowed_power_fraction(decomposition, spec.laser, spec.n_max)
        if result.allowed_fraction < selection_rule_floor(spec.laser):
            logger.warning(
                f"⚠️ Point {result.key}: only {result.allowed_fraction:.6f} of the modal power on allowed windings"
            )


class RateService:
    """Mode-resolved rates, weights and phases"""

    @staticmethod
    def assemble_rates(work: PointWork) -> None:
        result = work.result
        rates = vortex_rate(work.decomposition, work.kinematics)
        result.total_rate = float(sum(rates.values()))
        if result.total_rate <= 0.0:
            logger.debug(f"Point {result.key} emits nothing")
            return

        state = superposition_state(work.decomposition)
        result.modes = [
            ModeRow(ell=ell, rate=rates[ell], weight=abs(c) ** 2, phase=float(np.angle(c)))
            for ell, c in sorted(state.coefficients.items())
            if abs(c) ** 2 >= ROW_WEIGHT_FLOOR
        ]
