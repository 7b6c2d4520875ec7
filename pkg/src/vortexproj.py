"""
Bessel-mode projection of plane-wave amplitudes.

A Bessel photon |k'_z, k'_⊥, m', Λ'⟩ is a coherent azimuthal superposition of
plane waves, so its amplitude is the azimuthal Fourier coefficient

    c_m' = (-i)^{m'} (1/N_φ) Σ_j A(φ_j) e^{-i m' φ_j}

of the plane-wave amplitude sampled on a uniform grid. OAM labels follow
ℓ' = m' - Λ' where m' is the winding including the spin change.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import orjson
from numpy.typing import ArrayLike, NDArray
from scipy import fft
from scipy.special import jnp_zeros, jv

from .channelplanner import enumerate_channels, tam_of_channel
from .errors import AliasingError, NoEmissionError
from .laserfield import ArrayC, ArrayR
from .models import EmissionKinematics, LaserConfig
from .volkovamp import AmplitudeGrid, rate_prefactor

logger = logging.getLogger(__name__)

DEFAULT_AZIMUTHS = 64
ALIASING_BAND = 0.1
ALIASING_THRESHOLD = 1e-8

# (-i)^m for m mod 4
_MINUS_I_POWERS = np.array([1.0, -1j, -1.0, 1j])


def required_azimuths(config: LaserConfig, n_max: int) -> int:
    """Smallest N_φ = 2 m'_max + 1 resolving every winding up to N_max plus a spin margin."""
    max_winding = n_max * max(abs(h) for h in config.helicities) + 2
    return 2 * max_winding + 1


def azimuthal_decompose(samples: ArrayLike, max_winding: int | None = None) -> dict[int, complex]:
    """
    Coefficients c_m' for m' in [-N_φ/2, N_φ/2) of samples on a uniform grid
    starting at φ = 0.
    """
    samples = np.asarray(samples, dtype=complex)
    n_phi = samples.size
    if max_winding is not None and n_phi < 2 * max_winding + 1:
        raise ValueError(f"N_φ={n_phi} cannot resolve windings up to {max_winding}")

    windings = fft.fftfreq(n_phi, d=1.0 / n_phi).astype(int)
    coefficients = fft.fft(samples) / n_phi * _MINUS_I_POWERS[windings % 4]

    power = np.abs(coefficients) ** 2
    total = float(power.sum())
    edge = np.abs(windings) >= (0.5 - 0.5 * ALIASING_BAND) * n_phi
    if total > 0.0 and float(power[edge].sum()) > ALIASING_THRESHOLD * total:
        raise AliasingError(f"increase N_φ (currently {n_phi})")

    order = np.argsort(windings)
    return {int(windings[i]): complex(coefficients[i]) for i in order}


@dataclass(frozen=True)
class VortexDecomposition:
    """Winding coefficients per final spin at one (ω', θ, Λ', λ)."""

    omega_ev: float
    theta_rad: float
    photon_helicity: int
    spin_in: int
    coefficients: dict[int, dict[int, complex]]  # spin_out -> m' -> c

    def ell_coefficients(self, spin_out: int) -> dict[int, complex]:
        return {m - self.photon_helicity: c for m, c in self.coefficients[spin_out].items()}

    def ell_power(self, spin_out: int | None = None) -> dict[int, float]:
        """|c_ℓ'|², summed over the final spin unless one is given."""
        spins = self.coefficients if spin_out is None else (spin_out,)
        power: dict[int, float] = {}
        for spin in spins:
            for ell, c in self.ell_coefficients(spin).items():
                power[ell] = power.get(ell, 0.0) + abs(c) ** 2
        return dict(sorted(power.items()))

    @property
    def total_power(self) -> float:
        return sum(self.ell_power().values())


def decompose_grid(
    grid: AmplitudeGrid,
    kinematics: EmissionKinematics,
    photon_helicity: int,
    spin_in: int,
    max_winding: int | None = None,
) -> VortexDecomposition:
    coefficients = {}
    for (lam, lam_out, helicity), values in grid.values.items():
        if lam == spin_in and helicity == photon_helicity:
            coefficients[lam_out] = azimuthal_decompose(values, max_winding)
    return VortexDecomposition(
        omega_ev=kinematics.omega_ev,
        theta_rad=kinematics.theta_rad,
        photon_helicity=photon_helicity,
        spin_in=spin_in,
        coefficients=coefficients,
    )


def vortex_rate(
    decomposition: VortexDecomposition,
    kinematics: EmissionKinematics,
    spin_out: int | None = None,
) -> dict[int, float]:
    """d²W/dω'dθ per OAM mode ℓ'."""
    if kinematics.k_perp <= 0.0:
        raise ValueError("k'_⊥ must be positive")
    prefactor = rate_prefactor(kinematics)
    return {ell: prefactor * p for ell, p in decomposition.ell_power(spin_out).items()}


def allowed_windings(config: LaserConfig, n_max: int, spin_in: int, spin_out: int) -> set[int]:
    """TAM values m' reachable by some channel with N(n) ≤ n_max."""
    return {
        tam_of_channel(channel, config, spin_in, spin_out, 1).tam
        for channel in enumerate_channels(config, n_max)
    }


def allowed_power_fraction(
    decomposition: VortexDecomposition, config: LaserConfig, n_max: int
) -> float:
    """Share of the modal power on windings permitted by the selection rule."""
    total = allowed = 0.0
    for spin_out, coefficients in decomposition.coefficients.items():
        permitted = allowed_windings(config, n_max, decomposition.spin_in, spin_out)
        for m, c in coefficients.items():
            total += abs(c) ** 2
            if m in permitted:
                allowed += abs(c) ** 2
    return allowed / total if total > 0.0 else 1.0


# Measured lower bounds on allowed_power_fraction, by number of colours. Channels with
# some n_j < 0 (absorb one colour, emit another) reach windings no n ≥ 0 channel does.
SELECTION_RULE_FLOORS = {1: 1.0 - 1e-4, 2: 1.0 - 2e-3}
MULTICOLOR_SELECTION_RULE_FLOOR = 0.95


def selection_rule_floor(config: LaserConfig) -> float:
    """Smallest allowed power share expected for this driver."""
    return SELECTION_RULE_FLOORS.get(len(config.modes), MULTICOLOR_SELECTION_RULE_FLOOR)


def wrap_phase(angle: float) -> float:
    """Map an angle into (-π, π]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def fringe_visibility(c1: complex, c2: complex) -> float:
    return 2.0 * abs(c1 * c2) / (abs(c1) ** 2 + abs(c2) ** 2)


@dataclass(frozen=True)
class ModePair:
    ell_low: int
    ell_high: int
    delta_ell: int
    delta: float
    visibility: float


@dataclass(frozen=True)
class SuperpositionState:
    """Normalized OAM superposition with its largest coefficient real and positive."""

    coefficients: dict[int, complex]
    pairs: list[ModePair] = field(default_factory=list)

    @property
    def weights(self) -> dict[int, float]:
        return {ell: abs(c) ** 2 for ell, c in self.coefficients.items()}

    def dominant(self, count: int = 1) -> list[int]:
        ranked = sorted(self.coefficients, key=lambda ell: abs(self.coefficients[ell]), reverse=True)
        return ranked[:count]


def superposition_state(
    decomposition: VortexDecomposition,
    floor: float = 0.0,
    pair_threshold: float = 1e-3,
) -> SuperpositionState:
    """
    Normalized modal state. Weights are the spin-summed powers; phases come
    from the no-flip coefficients.

    `pair_threshold` selects which modes enter the pairwise interference report.
    """
    power = decomposition.ell_power()
    total = sum(power.values())
    if total <= floor or total == 0.0:
        raise NoEmissionError()

    phases = decomposition.ell_coefficients(decomposition.spin_in)
    raw = {
        ell: math.sqrt(p / total) * np.exp(1j * np.angle(phases.get(ell, 1.0)))
        for ell, p in power.items()
        if p > 0.0
    }
    lead = max(raw, key=lambda ell: abs(raw[ell]))
    rotation = np.exp(-1j * np.angle(raw[lead]))
    coefficients = {ell: complex(c * rotation) for ell, c in raw.items()}
    coefficients[lead] = complex(abs(coefficients[lead]), 0.0)

    strong = [ell for ell in sorted(coefficients) if abs(coefficients[ell]) ** 2 >= pair_threshold]
    pairs = []
    for i, low in enumerate(strong):
        for high in strong[i + 1 :]:
            c1, c2 = coefficients[low], coefficients[high]
            pairs.append(
                ModePair(
                    ell_low=low,
                    ell_high=high,
                    delta_ell=high - low,
                    delta=wrap_phase(float(np.angle(c2) - np.angle(c1))),
                    visibility=fringe_visibility(c1, c2),
                )
            )
    return SuperpositionState(coefficients=coefficients, pairs=pairs)


def azimuthal_factor(delta_ell: int, delta: float, phi: ArrayLike) -> NDArray[np.float64]:
    """F(φ) = 1 + cos(Δℓ' φ + δ)."""
    if delta_ell == 0:
        warnings.warn("Δℓ'=0 gives a constant azimuthal factor", stacklevel=2)
    return 1.0 + np.cos(delta_ell * np.asarray(phi, dtype=float) + delta)


# ============================================================================
# Transverse profiles
# ============================================================================


def bessel_j(order: int, x: ArrayLike) -> NDArray[np.float64]:
    """J_n(x) for any integer n, with J_{-n} = (-1)^n J_n."""
    value = jv(abs(order), np.asarray(x, dtype=float))
    return -value if order < 0 and order % 2 else value


def first_ring_radius(ell: int, k_perp: float) -> float:
    """Radius of the innermost intensity maximum of J_ℓ(k_⊥ r)."""
    return float(jnp_zeros(abs(ell), 1)[0]) / k_perp


@dataclass(frozen=True)
class ProfileGrid:
    n_r: int = 256
    n_phi: int = 256
    ring_factor: float = 3.0


@dataclass(frozen=True)
class TransverseProfile:
    r: ArrayR
    phi: ArrayR
    field: ArrayC  # (r, φ)
    k_perp: float
    modes: dict[int, complex]

    @property
    def intensity(self) -> ArrayR:
        return np.abs(self.field) ** 2

    @property
    def phase(self) -> ArrayR:
        return np.angle(self.field)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def dominant_ring(self) -> int:
        """Radial index of the brightest azimuthally averaged ring."""
        return int(np.argmax(self.intensity.mean(axis=1)))

    def ring_intensity(self, index: int | None = None) -> ArrayR:
        return self.intensity[self.dominant_ring() if index is None else index]

    def phase_winding(self, index: int | None = None) -> int:
        """Net number of 2π phase turns around a ring."""
        ring = self.field[self.dominant_ring() if index is None else index]
        steps = np.angle(np.roll(ring, -1) / ring)
        return int(round(float(steps.sum()) / (2.0 * math.pi)))

    def cartesian(self, size: int = 256) -> ArrayC:
        """Ψ on a size × size square of half-width r_max."""
        axis = np.linspace(-self.r_max, self.r_max, size)
        x, y = np.meshgrid(axis, axis)
        return synthesize(self.modes, self.k_perp, np.hypot(x, y), np.arctan2(y, x))


def synthesize(
    modes: dict[int, complex], k_perp: float, r: ArrayLike, phi: ArrayLike
) -> ArrayC:
    """Ψ(r, φ) = Σ ĉ_ℓ (-i)^ℓ J_ℓ(k_⊥ r) e^{iℓφ}."""
    r, phi = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(phi, dtype=float))
    psi = np.zeros(r.shape, dtype=complex)
    for ell, c in modes.items():
        psi += c * _MINUS_I_POWERS[ell % 4] * bessel_j(ell, k_perp * r) * np.exp(1j * ell * phi)
    return psi


def transverse_profile(
    modes: dict[int, complex], k_perp: float, grid: ProfileGrid | None = None
) -> TransverseProfile:
    grid = grid or ProfileGrid()
    if not modes:
        raise ValueError("at least one mode is required")
    if k_perp <= 0.0:
        raise ValueError("k'_⊥ must be positive")
    widest = max(modes, key=abs)
    r_max = grid.ring_factor * first_ring_radius(widest, k_perp)
    r = np.linspace(0.0, r_max, grid.n_r)
    phi = 2.0 * math.pi * np.arange(grid.n_phi) / grid.n_phi
    field_values = synthesize(modes, k_perp, r[:, None], phi[None, :])
    return TransverseProfile(r=r, phi=phi, field=field_values, k_perp=k_perp, modes=dict(modes))


def count_azimuthal_minima(values: ArrayLike, flatness: float = 1e-9) -> int:
    """Local minima of a periodic sequence; an azimuthally flat ring has none."""
    values = np.asarray(values, dtype=float)
    peak = float(values.max())
    if peak <= 0.0 or (peak - float(values.min())) <= flatness * peak:
        return 0
    previous, following = np.roll(values, 1), np.roll(values, -1)
    return int(np.count_nonzero((values <= previous) & (values < following)))


# ============================================================================
# Export
# ============================================================================


def _pgm_bytes(levels: NDArray[np.uint8]) -> bytes:
    height, width = levels.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + levels.tobytes()


def intensity_levels(intensity: ArrayR) -> NDArray[np.uint8]:
    peak = float(intensity.max())
    scaled = intensity / peak if peak > 0.0 else intensity
    return np.round(scaled * 255.0).astype(np.uint8)


def phase_levels(phase: ArrayR) -> NDArray[np.uint8]:
    """(-π, π] mapped linearly onto 0-255."""
    return np.round((phase + math.pi) / (2.0 * math.pi) * 255.0).astype(np.uint8)


def export_profile(
    profile: TransverseProfile,
    directory: Path,
    stem: str,
    image_size: int = 256,
    images: bool = True,
) -> list[Path]:
    """
    Write the raw polar grids as little-endian float64, optionally intensity
    and phase graymaps of the Cartesian image, and a JSON sidecar describing them.
    """
    directory.mkdir(parents=True, exist_ok=True)
    outputs = {
        f"{stem}_intensity.f64": profile.intensity.astype("<f8").tobytes(),
        f"{stem}_phase.f64": profile.phase.astype("<f8").tobytes(),
    }
    if images:
        image = profile.cartesian(image_size)
        outputs[f"{stem}_intensity.pgm"] = _pgm_bytes(intensity_levels(np.abs(image) ** 2))
        outputs[f"{stem}_phase.pgm"] = _pgm_bytes(phase_levels(np.angle(image)))
    sidecar = {
        "grid": "polar",
        "layout": "row-major (r, phi)",
        "n_r": int(profile.r.size),
        "n_phi": int(profile.phi.size),
        "r_max_inv_ev": profile.r_max,
        "r_max_k_perp": profile.r_max * profile.k_perp,
        "k_perp_ev": profile.k_perp,
        "image_size": image_size if images else None,
        "modes": [
            {"ell": ell, "re": c.real, "im": c.imag} for ell, c in sorted(profile.modes.items())
        ],
        "files": sorted(outputs),
    }
    outputs[f"{stem}.json"] = orjson.dumps(sidecar, option=orjson.OPT_SORT_KEYS | orjson.OPT_INDENT_2)

    written = []
    for name, payload in outputs.items():
        path = directory / name
        path.write_bytes(payload)
        written.append(path)
    logger.info(f"🖼️  Wrote profile {stem} ({len(profile.modes)} modes)")
    return written
