"""
Scan orchestrator implementation.

This module drives spectrum scans: it evaluates every (ω', θ) grid point of a
`ScanSpec` through a fixed sequence of steps and assembles the results into a
`SpectrumTable`.

Key Concepts:
- Each grid point runs the steps validate_kinematics → sample_amplitudes →
  decompose_azimuth → assemble_rates
- A failing step marks the point FAILED with its message; the scan continues
- Points are independent, so they are farmed out to a bounded process pool
- Results are checkpointed per point and assembled by grid index, so the table
  does not depend on the worker count, on scheduling or on interruptions
"""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .checkpoint import CheckpointStore
from .errors import PointEvaluationError, VortexNCSError
from .models import PointStatus, StepStatus
from .reports import band_merge_report
from .schemas import (
    BandMergeReport,
    PointResult,
    ScanSpec,
    SpectrumRow,
    SpectrumTable,
    table_metadata,
)
from .services import (
    AmplitudeService,
    KinematicsService,
    PointWork,
    ProjectionService,
    RateService,
)

logger = logging.getLogger(__name__)

POINT_STEPS = [
    {"name": "validate_kinematics", "action": KinematicsService.validate_kinematics},
    {"name": "sample_amplitudes", "action": AmplitudeService.sample_amplitudes},
    {"name": "decompose_azimuth", "action": ProjectionService.decompose_azimuth},
    {"name": "assemble_rates", "action": RateService.assemble_rates},
]


def _run_step(action, work: PointWork) -> None:
    """Run one step, lifting numerical rejections into the domain hierarchy."""
    try:
        action(work)
    except VortexNCSError:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise PointEvaluationError(exc) from exc


def evaluate_point(spec: ScanSpec, theta_index: int, omega_index: int) -> PointResult:
    """
    Run every step at one grid point.

    This is the unit of work shipped to worker processes, so it only depends
    on its arguments.
    """
    work = PointWork.at(spec, theta_index, omega_index, [step["name"] for step in POINT_STEPS])
    result = work.result

    for i, step_config in enumerate(POINT_STEPS):
        step = result.steps[i]
        try:
            _run_step(step_config["action"], work)
            step.status = StepStatus.COMPLETED
        except VortexNCSError as e:
            step.status = StepStatus.FAILED
            step.error_message = str(e)
            result.status = PointStatus.FAILED
            result.error_message = f"{step.name}: {e}"
            logger.error(f"❌ Step {step.name} failed at point {result.key}: {e}")
            return result

    result.status = PointStatus.COMPLETED
    return result


def assemble_table(spec: ScanSpec, results: list[PointResult]) -> SpectrumTable:
    """
    Flatten point results, in the given order, into spectrum rows.

    Completed points contribute one row per tabulated mode. Failed points and
    points under the emission floor contribute a single row without ℓ'.
    """
    peak = max((r.total_rate for r in results if r.status is PointStatus.COMPLETED), default=0.0)
    threshold = spec.emission_floor * peak

    rows = []
    for result in results:
        base = {"omega_ev": result.omega_ev, "theta_rad": result.theta_rad}
        if result.status is PointStatus.FAILED:
            rows.append(
                SpectrumRow(**base, rate=0.0, status=PointStatus.FAILED, note=result.error_message or "failed")
            )
        elif peak == 0.0 or result.total_rate <= threshold or not result.modes:
            rows.append(SpectrumRow(**base, rate=result.total_rate, status=PointStatus.BELOW_FLOOR))
        else:
            rows.extend(
                SpectrumRow(**base, ell=mode.ell, rate=mode.rate, weight=mode.weight, phase=mode.phase)
                for mode in result.modes
            )

    grid_points = max((r.grid_points for r in results), default=0)
    return SpectrumTable(metadata=table_metadata(spec, grid_points), rows=rows)


class ScanOrchestrator:
    """
    Orchestrates spectrum and intensity scans.

    The orchestrator owns the per-point step sequence:
    1. Validate kinematics (exact s, k'_⊥, light-front products)
    2. Sample amplitudes (plane-wave amplitudes on the azimuth ring)
    3. Decompose azimuth (Bessel-mode coefficients, Parseval and selection-rule checks)
    4. Assemble rates (mode-resolved rates, weights and phases)

    If a step fails the point is recorded as FAILED and the remaining points
    are still evaluated.

    Example flow:
    - Fresh scan: every point computed → checkpointed → assembled → checkpoints cleared
    - Resumed scan: checkpointed points restored → missing points computed → assembled
    """

    def __init__(self, workers: int = 1, checkpoint_root: Path | None = None):
        """
        Initialize the orchestrator.

        Args:
            workers: Number of worker processes; 1 evaluates in-process
            checkpoint_root: Directory holding per-spec checkpoint stores, or None to disable
        """
        if workers < 1:
            raise ValueError("workers must be at least 1")
        self.steps = POINT_STEPS
        self.workers = workers
        self.checkpoint_root = checkpoint_root

    async def execute_scan(self, spec: ScanSpec) -> SpectrumTable:
        """
        Evaluate every grid point of `spec` and assemble the table.

        Args:
            spec: A validated scan specification

        Returns:
            SpectrumTable: Rows sorted by (θ index, ω' index), whatever the scheduling
        """
        digest = spec.digest()
        keys = [(t, o) for t in range(len(spec.theta_rad)) for o in range(spec.omega_grid.count)]
        store = CheckpointStore(self.checkpoint_root, digest) if self.checkpoint_root else None

        results: dict[tuple[int, int], PointResult] = store.load_all() if store else {}
        if results:
            logger.info(f"💾 Restored {len(results)} checkpointed points of scan {digest[:12]}")

        pending = [key for key in keys if key not in results]
        logger.info(
            f"🚀 Starting scan {digest[:12]}: {len(pending)} of {len(keys)} points on {self.workers} worker(s)"
        )

        def record(result: PointResult) -> None:
            results[result.key] = result
            if store:
                store.save(result)
            if result.status is PointStatus.COMPLETED:
                logger.info(f"✅ Point {result.key} done at ω'={result.omega_ev:.6g} eV")

        if self.workers == 1:
            for theta_index, omega_index in pending:
                logger.debug(f"⚡ Evaluating point {(theta_index, omega_index)}")
                record(evaluate_point(spec, theta_index, omega_index))
        elif pending:
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [
                    loop.run_in_executor(pool, evaluate_point, spec, theta_index, omega_index)
                    for theta_index, omega_index in pending
                ]
                for future in asyncio.as_completed(futures):
                    record(await future)

        table = assemble_table(spec, [results[key] for key in keys])
        failed = len(table.failed_points())
        if store:
            store.clear()
        logger.info(f"🎉 Scan {digest[:12]} assembled: {len(table.rows)} rows, {failed} failed point(s)")
        return table

    async def execute_intensity_scan(
        self, spec: ScanSpec, ladder: list[tuple[float, ...]]
    ) -> tuple[list[SpectrumTable], BandMergeReport]:
        """
        Repeat the scan for every intensity set and compare the spectra.

        Args:
            spec: Scan specification whose intensities are replaced rung by rung
            ladder: Intensity sets a_0,j, one per scan

        Returns:
            The tables in ladder order and their band-merge report
        """
        if not ladder:
            raise ValueError("the intensity ladder is empty")
        tables = []
        for a0s in ladder:
            logger.info(f"🔄 Intensity set a0={tuple(a0s)}")
            tables.append(await self.execute_scan(spec.with_intensities(a0s)))
        return tables, band_merge_report(tables, spec.n_max)


def run_spectrum_scan(
    spec: ScanSpec, workers: int = 1, checkpoint_root: Path | None = None
) -> SpectrumTable:
    return asyncio.run(ScanOrchestrator(workers, checkpoint_root).execute_scan(spec))


def run_intensity_scan(
    spec: ScanSpec,
    ladder: list[tuple[float, ...]],
    workers: int = 1,
    checkpoint_root: Path | None = None,
) -> tuple[list[SpectrumTable], BandMergeReport]:
    return asyncio.run(ScanOrchestrator(workers, checkpoint_root).execute_intensity_scan(spec, ladder))
