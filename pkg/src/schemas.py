"""
Pydantic schemas for scan specifications, run configuration, scan results and reports
"""

import hashlib
import math
from pathlib import Path
from typing import Annotated, Literal

import numpy as np
import orjson
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from . import __version__
from .models import (
    ELECTRON_MASS_EV,
    ElectronState,
    LaserConfig,
    LaserMode,
    PointStatus,
    QuadratureSettings,
    StepStatus,
    check_unit_sign,
)
from .physcore import kinematic_edge
from .vortexproj import DEFAULT_AZIMUTHS, required_azimuths

DEFAULT_EMISSION_FLOOR = 1e-30


class OmegaGrid(BaseModel):
    """Uniform photon-energy grid"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    min_ev: float = Field(..., gt=0.0, description="Lowest photon energy ω' in eV")
    max_ev: float = Field(..., gt=0.0, description="Highest photon energy ω' in eV")
    count: int = Field(..., ge=1, description="Number of grid points")

    @model_validator(mode="after")
    def _ordered(self) -> "OmegaGrid":
        if self.max_ev < self.min_ev:
            raise ValueError("max_ev must not be below min_ev")
        if self.count == 1 and self.max_ev != self.min_ev:
            raise ValueError("a single-point grid needs min_ev == max_ev")
        return self

    def values(self) -> np.ndarray:
        return np.linspace(self.min_ev, self.max_ev, self.count)


class ScanSpec(BaseModel):
    """Everything that determines the numbers of a spectrum scan"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    laser: LaserConfig = Field(..., description="Multifrequency driver")
    electron_energy_ev: float = Field(..., gt=ELECTRON_MASS_EV, description="Electron energy ε")
    spin_in: int = Field(1, description="Initial electron helicity λ")
    photon_helicity: int = Field(-1, description="Emitted photon helicity Λ'")
    omega_grid: OmegaGrid = Field(..., description="Photon-energy grid")
    theta_rad: Annotated[tuple[float, ...], Field(min_length=1)] = Field(
        ..., description="Vortex cone angles θ in rad"
    )
    n_phi: int = Field(DEFAULT_AZIMUTHS, ge=4, description="Azimuth samples N_φ")
    n_max: int = Field(6, ge=1, description="Highest harmonic index checked by the selection rule")
    envelope: Literal["cos2", "flat"] = Field("cos2", description="Pulse envelope shape")
    quadrature: QuadratureSettings = Field(
        default_factory=QuadratureSettings, description="Phase-integral resolution"
    )
    emission_floor: float = Field(
        DEFAULT_EMISSION_FLOOR, ge=0.0, description="Points below this fraction of the scan peak are noise"
    )
    output_dir: str = Field("out", description="Directory receiving the scan artifacts")

    @field_validator("spin_in")
    @classmethod
    def _spin_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "spin_in")

    @field_validator("photon_helicity")
    @classmethod
    def _helicity_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "photon_helicity")

    @field_validator("theta_rad")
    @classmethod
    def _angles_in_range(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if any(not 0.0 < theta < math.pi / 2 for theta in value):
            raise ValueError("every θ must lie in (0, π/2)")
        return value

    @model_validator(mode="after")
    def _grid_below_edge(self) -> "ScanSpec":
        needed = required_azimuths(self.laser, self.n_max)
        if self.n_phi < needed:
            raise ValueError(f"n_phi={self.n_phi} cannot resolve windings up to N={self.n_max}; need {needed}")
        for theta in self.theta_rad:
            edge = kinematic_edge(theta, self.electron)
            if self.omega_grid.max_ev >= edge:
                raise ValueError(
                    f"omega_grid.max_ev={self.omega_grid.max_ev:.6g} eV is beyond the kinematic edge "
                    f"{edge:.6g} eV at θ={theta:.6g} rad"
                )
        return self

    @property
    def electron(self) -> ElectronState:
        return ElectronState.head_on(self.electron_energy_ev, self.spin_in)

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_grid.values()

    @property
    def n_points(self) -> int:
        return len(self.theta_rad) * self.omega_grid.count

    def with_intensities(self, a0s: tuple[float, ...] | list[float]) -> "ScanSpec":
        return self.model_copy(update={"laser": self.laser.with_intensities(a0s)})

    def echo(self) -> str:
        """Canonical single-line JSON of the spec."""
        return orjson.dumps(self.model_dump(mode="json"), option=orjson.OPT_SORT_KEYS).decode()

    def digest(self) -> str:
        """Content digest of everything that affects the numbers (not the output location)."""
        payload = self.model_dump(mode="json", exclude={"output_dir"})
        return hashlib.sha256(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS)).hexdigest()


# ============================================================================
# Per-point results
# ============================================================================


class PointStep(BaseModel):
    """Status of one pipeline step at one grid point"""

    name: str = Field(..., description="Name of the step")
    status: StepStatus = Field(StepStatus.PENDING, description="Current status of the step")
    error_message: str | None = Field(None, description="Error message if the step failed")


class ModeRow(BaseModel):
    ell: int = Field(..., description="Intrinsic OAM ℓ'")
    rate: float = Field(..., ge=0.0, description="d²W/dω'dθ summed over the final spin")
    weight: float = Field(..., ge=0.0, description="Normalized modal weight |ĉ_ℓ'|²")
    phase: float = Field(..., description="Phase of ĉ_ℓ' relative to the leading mode")


class PointResult(BaseModel):
    """Outcome of evaluating one (ω', θ) grid point"""

    theta_index: int
    omega_index: int
    omega_ev: float
    theta_rad: float
    status: PointStatus = PointStatus.PENDING
    steps: list[PointStep] = Field(default_factory=list)
    modes: list[ModeRow] = Field(default_factory=list)
    total_rate: float = Field(0.0, description="Rate summed over ℓ' and λ'")
    plane_wave_rate: float = Field(0.0, description="Azimuth-integrated plane-wave rate")
    parseval_error: float = Field(0.0, description="Largest relative Parseval mismatch over λ'")
    allowed_fraction: float = Field(1.0, description="Power share on selection-rule windings")
    grid_points: int = Field(0, description="Phase-grid points of the converged quadrature")
    error_message: str | None = None

    @property
    def key(self) -> tuple[int, int]:
        return (self.theta_index, self.omega_index)


# ============================================================================
# Spectrum tables
# ============================================================================

SPECTRUM_COLUMNS = ("omega_ev", "theta_rad", "ell", "rate", "weight", "phase", "status", "note")


class SpectrumRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_ev: float
    theta_rad: float
    ell: int | None = Field(None, description="None marks a point-level row without modal content")
    rate: float = Field(..., ge=0.0)
    weight: float = Field(0.0, ge=0.0)
    phase: float = 0.0
    status: PointStatus = PointStatus.COMPLETED
    note: str = "-"

    def to_tsv(self) -> str:
        cells = (
            repr(self.omega_ev),
            repr(self.theta_rad),
            "-" if self.ell is None else str(self.ell),
            repr(self.rate),
            repr(self.weight),
            repr(self.phase),
            self.status.value,
            " ".join(self.note.split()) or "-",
        )
        return "\t".join(cells)

    @classmethod
    def from_tsv(cls, line: str) -> "SpectrumRow":
        cells = line.rstrip("\n").split("\t")
        if len(cells) != len(SPECTRUM_COLUMNS):
            raise ValueError(f"expected {len(SPECTRUM_COLUMNS)} columns, got {len(cells)}")
        omega, theta, ell, rate, weight, phase, status, note = cells
        return cls(
            omega_ev=float(omega),
            theta_rad=float(theta),
            ell=None if ell == "-" else int(ell),
            rate=float(rate),
            weight=float(weight),
            phase=float(phase),
            status=PointStatus(status),
            note=note,
        )


class SpectrumTable(BaseModel):
    """Mode-resolved spectrum over every (ω', θ) of a scan"""

    metadata: dict[str, str] = Field(default_factory=dict)
    rows: list[SpectrumRow] = Field(default_factory=list)

    @property
    def spec(self) -> ScanSpec:
        return ScanSpec.model_validate_json(self.metadata["spec"])

    @property
    def thetas(self) -> list[float]:
        return sorted({row.theta_rad for row in self.rows})

    def rows_at(self, theta: float) -> list[SpectrumRow]:
        return [row for row in self.rows if row.theta_rad == theta]

    def failed_points(self) -> list[SpectrumRow]:
        return [row for row in self.rows if row.status is PointStatus.FAILED]

    def totals(self, theta: float) -> tuple[np.ndarray, np.ndarray]:
        """ω' grid and λ'-summed total rate at one angle."""
        summed: dict[float, float] = {}
        for row in self.rows_at(theta):
            summed[row.omega_ev] = summed.get(row.omega_ev, 0.0) + row.rate
        omegas = sorted(summed)
        return np.array(omegas), np.array([summed[omega] for omega in omegas])

    def modes_at(self, omega: float, theta: float) -> dict[int, complex]:
        """Normalized modal coefficients ĉ_ℓ' of one grid point."""
        return {
            row.ell: math.sqrt(row.weight) * complex(math.cos(row.phase), math.sin(row.phase))
            for row in self.rows_at(theta)
            if row.omega_ev == omega and row.ell is not None
        }

    def weights_at(self, omega: float, theta: float) -> dict[int, float]:
        return {ell: abs(c) ** 2 for ell, c in self.modes_at(omega, theta).items()}

    def format_tsv(self, theta: float) -> str:
        lines = [f"# {key}={value}" for key, value in self.metadata.items()]
        lines.append(f"# theta_rad={theta!r}")
        lines.append("\t".join(SPECTRUM_COLUMNS))
        lines.extend(row.to_tsv() for row in self.rows_at(theta))
        return "\n".join(lines) + "\n"

    def write(self, directory: Path, stem: str = "spectrum") -> list[Path]:
        """One UTF-8 TSV file per θ."""
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for index, theta in enumerate(self.thetas):
            path = directory / f"{stem}_theta{index:02d}.tsv"
            path.write_bytes(self.format_tsv(theta).encode("utf-8"))
            written.append(path)
        return written

    @classmethod
    def read(cls, paths: list[Path]) -> "SpectrumTable":
        """Reassemble a table from its per-θ files."""
        metadata: dict[str, str] = {}
        rows: list[SpectrumRow] = []
        for path in sorted(paths):
            for line in path.read_text(encoding="utf-8").splitlines():
                if line.startswith("# "):
                    key, _, value = line[2:].partition("=")
                    if key != "theta_rad":
                        metadata.setdefault(key, value)
                elif line and not line.startswith(SPECTRUM_COLUMNS[0]):
                    rows.append(SpectrumRow.from_tsv(line))
        return cls(metadata=metadata, rows=rows)


def table_metadata(spec: ScanSpec, grid_points: int) -> dict[str, str]:
    return {
        "code_version": __version__,
        "spec_digest": spec.digest(),
        "spec": spec.echo(),
        "n_phi": str(spec.n_phi),
        "max_grid_points": str(grid_points),
        "emission_floor": repr(spec.emission_floor),
    }


# ============================================================================
# Run configuration (TOML surface)
# ============================================================================


def _default_omega_grid() -> OmegaGrid:
    return OmegaGrid(min_ev=5.0e4, max_ev=5.0e6, count=200)


class OutputSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    directory: str = Field("out", description="Output directory for every artifact")
    emit_profiles: bool = Field(False, description="Write transverse profiles after a scan")
    emit_images: bool = Field(True, description="Write PGM images next to the raw profile grids")
    image_size: int = Field(256, ge=16, description="Side of the square profile images in pixels")


class ProfilePoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega_ev: float = Field(..., gt=0.0, description="Photon energy of the profile")
    theta_mrad: float = Field(..., gt=0.0, description="Cone angle of the profile in mrad")
    standalone: bool = Field(False, description="Evaluated on its own rather than read from the scan")


class RunConfig(BaseModel):
    """Validated content of a run configuration file"""

    model_config = ConfigDict(extra="forbid")

    electron_energy_ev: float = Field(..., gt=ELECTRON_MASS_EV, description="Electron energy ε")
    omega1_ev: float = Field(1.55, gt=0.0, description="Fundamental laser frequency ω_1")
    n_cycle: int = Field(10, ge=1, description="Envelope length in fundamental cycles")
    envelope: Literal["cos2", "flat"] = Field("cos2", description="Pulse envelope shape")
    modes: Annotated[list[LaserMode], Field(min_length=1)] = Field(..., description="Laser modes")
    spin_in: int = Field(1, description="Initial electron helicity λ")
    photon_helicity: int = Field(-1, description="Emitted photon helicity Λ'")
    theta_mrad: Annotated[list[float], Field(min_length=1)] = Field(
        default_factory=lambda: [2.0], description="Cone angles in mrad"
    )
    omega_grid: OmegaGrid = Field(default_factory=_default_omega_grid, description="Photon-energy grid")
    n_phi: int = Field(DEFAULT_AZIMUTHS, ge=4, description="Azimuth samples N_φ")
    n_max: int = Field(6, ge=1, description="Highest harmonic index checked by the selection rule")
    emission_floor: float = Field(DEFAULT_EMISSION_FLOOR, ge=0.0, description="Relative emission floor")
    workers: int | None = Field(None, ge=1, description="Worker processes; environment default when unset")
    strict: bool = Field(False, description="Exit with status 3 when any point fails")
    intensity_ladder: list[tuple[float, ...]] = Field(
        default_factory=list, description="Intensity sets a_0,j for the intensity scan"
    )
    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    profile_points: list[ProfilePoint] = Field(default_factory=list)

    @field_validator("spin_in")
    @classmethod
    def _spin_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "spin_in")

    @field_validator("photon_helicity")
    @classmethod
    def _helicity_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "photon_helicity")

    @field_validator("intensity_ladder")
    @classmethod
    def _ladder_nonnegative(cls, value: list[tuple[float, ...]]) -> list[tuple[float, ...]]:
        if any(a0 < 0.0 for rung in value for a0 in rung):
            raise ValueError("intensities must be nonnegative")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        for rung in self.intensity_ladder:
            if len(rung) != len(self.modes):
                raise ValueError(f"each ladder entry needs {len(self.modes)} intensities")
        try:
            self.to_scan_spec()
        except ValidationError as exc:
            raise ValueError(exc.errors()[0]["msg"].removeprefix("Value error, ")) from exc
        omegas = self.omega_grid.values()
        for point in self.profile_points:
            on_theta = any(math.isclose(point.theta_mrad, t, rel_tol=1e-12) for t in self.theta_mrad)
            on_omega = bool(np.any(np.isclose(omegas, point.omega_ev, rtol=1e-12, atol=0.0)))
            if not (on_theta and on_omega):
                point.standalone = True
        return self

    @property
    def laser(self) -> LaserConfig:
        return LaserConfig(omega1_ev=self.omega1_ev, modes=tuple(self.modes), n_cycle=self.n_cycle)

    def to_scan_spec(self) -> ScanSpec:
        return ScanSpec(
            laser=self.laser,
            electron_energy_ev=self.electron_energy_ev,
            spin_in=self.spin_in,
            photon_helicity=self.photon_helicity,
            omega_grid=self.omega_grid,
            theta_rad=tuple(t * 1e-3 for t in self.theta_mrad),
            n_phi=self.n_phi,
            n_max=self.n_max,
            envelope=self.envelope,
            quadrature=self.quadrature,
            emission_floor=self.emission_floor,
            output_dir=self.output.directory,
        )


# ============================================================================
# Reports
# ============================================================================


class PairOverlap(BaseModel):
    first: str = Field(..., description="Channel with the higher harmonic index")
    second: str = Field(..., description="Channel with the lower harmonic index")
    beta: float = Field(..., description="β_Σ at the free position of the higher harmonic")
    overlap_fraction: float = Field(..., ge=0.0, le=1.0)


class IntensityBand(BaseModel):
    a0s: tuple[float, ...]
    a0_squared_sum: float
    free_edge_ev: float = Field(..., description="First-harmonic position ω'(s=1) without dressing")
    leading_peak_ev: float | None = Field(None, description="Largest emission below the free edge")
    linewidth_fraction: float | None = Field(None, description="FWHM over peak energy of the leading feature")
    redshift_ratio: float | None = Field(None, description="Leading peak over that of the first intensity")
    predicted_ratio: float = Field(..., description="(1 + Σa_0²)_ref / (1 + Σa_0²)")
    predicted_ratio_angle: float = Field(..., description="Same scaling with γ²θ² added to both sides")
    deviation: float | None = None
    deviation_angle: float | None = None
    pair_overlaps: list[PairOverlap] = Field(default_factory=list)


class BandMergeReport(BaseModel):
    theta_rad: float
    tolerance: float
    bands: list[IntensityBand]
    redshift_monotonic: bool
    broadening_monotonic: bool
    scaling_consistent: bool
    scaling_consistent_angle: bool


class ApertureEntry(BaseModel):
    a0s: tuple[float, ...]
    a_eff: float
    gamma: float
    gamma_star: float
    mean_theta_rad: float | None = Field(None, description="Emission-weighted mean cone angle")
    scale_a_eff_rad: float = Field(..., description="a_eff / γ")
    scale_gamma_star_rad: float = Field(..., description="1 / γ*")
    ratio_a_eff: float | None = None
    ratio_gamma_star: float | None = None
    order_unity: bool = False


class ApertureReport(BaseModel):
    entries: list[ApertureEntry]
    broadening_monotonic: bool
