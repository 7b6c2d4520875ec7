"""
Data models for the vortex NCS simulator
"""

import math
from enum import Enum
from typing import Annotated, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ELECTRON_MASS_EV = 510_998.95


class PointStatus(str, Enum):
    PENDING = "pending"
    COMPLETED = "completed"
    FAILED = "failed"
    BELOW_FLOOR = "below_floor"


class StepStatus(str, Enum):
    PENDING = "pending"
    COMPLETED = "completed"
    FAILED = "failed"


class HelicityRelation(str, Enum):
    EQUAL = "equal"
    OPPOSITE = "opposite"


def check_unit_sign(value: int, name: str) -> int:
    if value not in (-1, 1):
        raise ValueError(f"{name} must be ±1")
    return value


class FourVector(BaseModel):
    """
    Contravariant four-vector (t, x, y, z) in eV, metric (+,-,-,-).

    Ultrarelativistic momenta lose their small light-front component t - z
    to cancellation, so it may be carried exactly in `lf_minus`.
    """

    model_config = ConfigDict(frozen=True)

    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    lf_minus: float | None = None

    @classmethod
    def from_lightfront(
        cls, plus: float, minus: float, x: float = 0.0, y: float = 0.0
    ) -> "FourVector":
        return cls(
            t=0.5 * (plus + minus), x=x, y=y, z=0.5 * (plus - minus), lf_minus=minus
        )

    @property
    def plus(self) -> float:
        return self.t + self.z

    @property
    def minus(self) -> float:
        return self.t - self.z if self.lf_minus is None else self.lf_minus

    @property
    def perp_squared(self) -> float:
        return self.x * self.x + self.y * self.y

    def dot(self, other: "FourVector") -> float:
        return (
            0.5 * (self.plus * other.minus + self.minus * other.plus)
            - self.x * other.x
            - self.y * other.y
        )

    def square(self) -> float:
        return self.plus * self.minus - self.perp_squared

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.t, self.x, self.y, self.z)


class ElectronState(BaseModel):
    model_config = ConfigDict(frozen=True)

    momentum: FourVector
    spin: int = Field(1, description="Helicity label λ = ±1")

    @field_validator("spin")
    @classmethod
    def _spin_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "spin")

    @classmethod
    def head_on(cls, energy_ev: float, spin: int = 1) -> "ElectronState":
        """Electron moving along +z with total energy `energy_ev`."""
        if energy_ev <= ELECTRON_MASS_EV:
            raise ValueError("electron energy must exceed the rest mass")
        p_z = math.sqrt((energy_ev - ELECTRON_MASS_EV) * (energy_ev + ELECTRON_MASS_EV))
        plus = energy_ev + p_z
        return cls(
            momentum=FourVector.from_lightfront(plus, ELECTRON_MASS_EV**2 / plus),
            spin=spin,
        )

    @property
    def energy(self) -> float:
        return self.momentum.t

    @property
    def gamma(self) -> float:
        return self.momentum.t / ELECTRON_MASS_EV

    @property
    def is_head_on(self) -> bool:
        return self.momentum.x == 0.0 and self.momentum.y == 0.0


class LaserMode(BaseModel):
    model_config = ConfigDict(frozen=True)

    nu: int = Field(..., ge=1, description="Harmonic ratio ν_j = ω_j/ω_1")
    a0: float = Field(..., ge=0.0, description="Normalized intensity a_0,j")
    helicity: int = Field(..., description="Helicity Λ_j = ±1")
    cep_rad: float = Field(0.0, description="Carrier-envelope phase")

    @field_validator("helicity")
    @classmethod
    def _helicity_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "helicity")


class LaserConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega1_ev: float = Field(1.55, gt=0.0, description="Fundamental frequency ω_1")
    modes: Annotated[tuple[LaserMode, ...], Field(min_length=1)]
    n_cycle: int = Field(10, ge=1, description="Envelope length in fundamental cycles")

    @model_validator(mode="after")
    def _commensurate_ladder(self) -> "LaserConfig":
        if self.modes[0].nu != 1:
            raise ValueError("the first mode must be the fundamental (ν_1 = 1)")
        nus = self.nus
        if any(b <= a for a, b in zip(nus, nus[1:])):
            raise ValueError("harmonic ratios ν_j must be strictly increasing")
        return self

    @property
    def nus(self) -> tuple[int, ...]:
        return tuple(mode.nu for mode in self.modes)

    @property
    def a0s(self) -> tuple[float, ...]:
        return tuple(mode.a0 for mode in self.modes)

    @property
    def helicities(self) -> tuple[int, ...]:
        return tuple(mode.helicity for mode in self.modes)

    @property
    def a0_squared_sum(self) -> float:
        return sum(a0 * a0 for a0 in self.a0s)

    @property
    def max_nu(self) -> int:
        return self.modes[-1].nu

    def with_intensities(self, a0s: tuple[float, ...] | list[float]) -> "LaserConfig":
        if len(a0s) != len(self.modes):
            raise ValueError(f"expected {len(self.modes)} intensities, got {len(a0s)}")
        modes = tuple(
            mode.model_copy(update={"a0": float(a0)}) for mode, a0 in zip(self.modes, a0s)
        )
        return self.model_copy(update={"modes": modes})


class QuadratureSettings(BaseModel):
    """Resolution and convergence control of the oscillatory phase integrals."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    points_per_cycle: int = Field(
        256, ge=16, description="Base grid points per cycle of the fastest carrier"
    )
    tolerance: float = Field(
        1e-6, gt=0.0, description="Relative change allowed between successive grid doublings"
    )
    max_refinements: int = Field(3, ge=1, description="Grid doublings before giving up")
    azimuth_chunk: int = Field(16, ge=1, description="Azimuths integrated per vectorized batch")
    phase_method: Literal["exact", "simpson"] = Field(
        "exact", description="How the cumulative field moments are obtained"
    )


class PhotonMode(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_ev: float = Field(..., gt=0.0)
    theta_rad: float = Field(..., gt=0.0, lt=math.pi / 2)
    helicity: int = -1

    @field_validator("helicity")
    @classmethod
    def _helicity_is_unit(cls, value: int) -> int:
        return check_unit_sign(value, "helicity")

    @property
    def k_perp(self) -> float:
        return self.omega_ev * math.sin(self.theta_rad)


class ChannelVector(BaseModel):
    """Photon-absorption multi-index n = (n_1, ..., n_N)."""

    model_config = ConfigDict(frozen=True)

    n: tuple[int, ...]

    @field_validator("n")
    @classmethod
    def _absorbs_at_least_one(cls, value: tuple[int, ...]) -> tuple[int, ...]:
        if any(n_j < 0 for n_j in value):
            raise ValueError("absorption indices must be nonnegative")
        if sum(value) < 1:
            raise ValueError("a channel absorbs at least one photon")
        return value

    def harmonic_index(self, config: LaserConfig) -> int:
        """N(n) = Σ ν_j n_j."""
        return sum(nu * n_j for nu, n_j in zip(config.nus, self.n, strict=True))

    def tam(self, config: LaserConfig) -> int:
        """m'(n) = Σ n_j Λ_j."""
        return sum(h * n_j for h, n_j in zip(config.helicities, self.n, strict=True))

    def __str__(self) -> str:
        return "(" + ",".join(str(n_j) for n_j in self.n) + ")"


class DegeneracyPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    first: ChannelVector
    second: ChannelVector
    delta_n: int
    delta_m: int


class ModePrediction(BaseModel):
    model_config = ConfigDict(frozen=True)

    photon_helicity: int
    initial_spin: int
    final_spin: int
    tam: int
    ell: int


class EmissionKinematics(BaseModel):
    """
    Scalar kinematics of one emission point (ω', θ).

    p' = p + s k_1 - k' is on-shell by construction; vector quantities that
    depend on the photon azimuth are produced by `photon_momentum` and
    `final_momentum`.
    """

    model_config = ConfigDict(frozen=True)

    electron: ElectronState
    omega1_ev: float
    omega_ev: float
    theta_rad: float
    s: float
    k1_dot_p: float
    k1_dot_pprime: float

    @property
    def k_perp(self) -> float:
        return self.omega_ev * math.sin(self.theta_rad)

    @property
    def photon_plus(self) -> float:
        return self.omega_ev * (1.0 + math.cos(self.theta_rad))

    @property
    def photon_minus(self) -> float:
        return 2.0 * self.omega_ev * math.sin(0.5 * self.theta_rad) ** 2

    def laser_momentum(self) -> FourVector:
        return FourVector.from_lightfront(0.0, 2.0 * self.omega1_ev)

    def photon_momentum(self, phi_k: float = 0.0) -> FourVector:
        return FourVector.from_lightfront(
            self.photon_plus,
            self.photon_minus,
            self.k_perp * math.cos(phi_k),
            self.k_perp * math.sin(phi_k),
        )

    def final_momentum(self, phi_k: float = 0.0) -> FourVector:
        p = self.electron.momentum
        return FourVector.from_lightfront(
            p.plus - self.photon_plus,
            p.minus + 2.0 * self.s * self.omega1_ev - self.photon_minus,
            p.x - self.k_perp * math.cos(phi_k),
            p.y - self.k_perp * math.sin(phi_k),
        )
