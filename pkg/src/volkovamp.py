"""
Spin- and helicity-resolved plane-wave emission amplitude.

The Volkov current between p and p' reduces to four phase-weighted moments
of the field,

    B_0 = ∫ e^{iΦ},  B_{j,±} = a_0,j ∫ g e^{±i(ν_j φ + ψ_j)} e^{iΦ},  B_2 = ∫ Σ_j |a_j|² e^{iΦ},

contracted with spinor coefficients. B_0 does not converge on its own and is
replaced by the boundary-free combination that follows from
d/dφ e^{iΦ} = iΦ' e^{iΦ}:

    s B_0 + α·B_a + β_q B_2 = 0.

Conventions: Dirac representation, metric (+,-,-,-), helicity spinors with the
Jacob-Wick phase. The final spinor carries an extra e^{i(λ'-λ)φ'/2} with φ' its
azimuth, so that an amplitude of total winding w obeys w = Σ n_j Λ_j + λ - λ'.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.constants import fine_structure
from scipy.integrate import simpson

from .errors import QuadratureError
from .laserfield import (
    ArrayC,
    ArrayR,
    PhaseCoefficients,
    PhaseIntegrals,
    PulseField,
    phase_coefficients,
)
from .models import (
    ELECTRON_MASS_EV,
    EmissionKinematics,
    FourVector,
    QuadratureSettings,
)

logger = logging.getLogger(__name__)

SPINS = (1, -1)
HELICITIES = (1, -1)

# ============================================================================
# Dirac algebra
# ============================================================================

_I2 = np.eye(2, dtype=complex)
_SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
_Z2 = np.zeros((2, 2), dtype=complex)

GAMMA = np.array(
    [np.block([[_I2, _Z2], [_Z2, -_I2]])]
    + [np.block([[_Z2, sigma], [-sigma, _Z2]]) for sigma in _SIGMA]
)
METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def slash(vector: ArrayLike) -> NDArray[np.complex128]:
    """γ^μ v_μ for a contravariant (t, x, y, z) vector."""
    covariant = METRIC @ np.asarray(vector, dtype=complex)
    return np.einsum("m,mab->ab", covariant, GAMMA)


def minkowski(a: ArrayLike, b: ArrayLike) -> complex:
    return complex(np.asarray(a) @ METRIC @ np.asarray(b))


def two_spinor(helicity: int, theta: float, phi: float) -> NDArray[np.complex128]:
    """Jacob-Wick helicity eigenstate of σ·n for the direction (θ, φ)."""
    c, s = math.cos(0.5 * theta), math.sin(0.5 * theta)
    if helicity == 1:
        return np.array([c, np.exp(1j * phi) * s])
    return np.array([-np.exp(-1j * phi) * s, c])


def helicity_spinor(momentum: FourVector, helicity: int, phase: float = 0.0) -> NDArray[np.complex128]:
    """
    Positive-energy spinor normalized to ū u = 2m, times e^{i·phase}.
    """
    energy = momentum.t
    p_abs = math.sqrt(momentum.perp_squared + momentum.z * momentum.z)
    theta = math.atan2(math.sqrt(momentum.perp_squared), momentum.z)
    phi = math.atan2(momentum.y, momentum.x)
    chi = two_spinor(helicity, theta, phi)
    root = math.sqrt(energy + ELECTRON_MASS_EV)
    spinor = np.concatenate([root * chi, helicity * p_abs / root * chi])
    return spinor * np.exp(1j * phase)


def dirac_bar(spinor: NDArray[np.complex128]) -> NDArray[np.complex128]:
    return spinor.conj() @ GAMMA[0]


def photon_polarization(theta: float, phi: float, helicity: int) -> NDArray[np.complex128]:
    """ε'_Λ' = (x̂_θφ + iΛ' ŷ_φ)/√2 as a contravariant four-vector with ε^0 = 0."""
    e_theta = np.array([math.cos(theta) * math.cos(phi), math.cos(theta) * math.sin(phi), -math.sin(theta)])
    e_phi = np.array([-math.sin(phi), math.cos(phi), 0.0])
    spatial = (e_theta + 1j * helicity * e_phi) / math.sqrt(2.0)
    return np.concatenate([[0.0], spatial])


def final_spinor_phase(spin_in: int, spin_out: int, phi_k: float) -> float:
    return 0.5 * (spin_out - spin_in) * (phi_k + math.pi)


# ============================================================================
# Reduced integrals
# ============================================================================


@dataclass(frozen=True)
class ReducedIntegrals:
    """Moments of the emission integrand at a batch of photon azimuths."""

    phi_k: ArrayR
    b0: ArrayC
    b_plus: ArrayC  # (mode, azimuth)
    b_minus: ArrayC
    b2: ArrayC
    helicities: tuple[int, ...]
    grid_points: int

    @property
    def bx(self) -> ArrayC:
        """∫ a_x e^{iΦ}."""
        return np.sum(self.b_plus + self.b_minus, axis=0) / 2.0

    @property
    def by(self) -> ArrayC:
        """∫ a_y e^{iΦ}."""
        weights = np.asarray(self.helicities, dtype=float)[:, None]
        return np.sum(weights * (self.b_plus - self.b_minus), axis=0) / 2j


@lru_cache(maxsize=16)
def _phase_integrals(field: PulseField, points_per_cycle: int, method: str) -> PhaseIntegrals:
    return PhaseIntegrals.compute(field, points_per_cycle, method)


def points_per_cycle(field: PulseField, s: float, settings: QuadratureSettings) -> int:
    """Base resolution 256·max(ν)·(1 + s/10), rounded up to a multiple of 64."""
    raw = settings.points_per_cycle * field.config.max_nu * (1.0 + s / 10.0)
    return int(math.ceil(raw / 64.0)) * 64


def _moments(
    field: PulseField,
    integrals: PhaseIntegrals,
    coefficients: list[PhaseCoefficients],
) -> tuple[ArrayC, ArrayC, ArrayC]:
    """Simpson moments for one batch of azimuths at one grid resolution."""
    phi = integrals.phi
    spacing = phi[1] - phi[0]
    s = np.array([c.s for c in coefficients])[:, None]
    alpha_x = np.array([c.alpha_x for c in coefficients])[:, None]
    alpha_y = np.array([c.alpha_y for c in coefficients])[:, None]
    beta_q = np.array([c.beta_q for c in coefficients])[:, None]
    phase = s * phi + alpha_x * integrals.total_x + alpha_y * integrals.total_y + beta_q * integrals.second
    weight = np.exp(1j * phase)

    # closed support: the flat envelope keeps its edge value on the grid ends
    envelope = field.envelope_series(phi)
    b_plus, b_minus = [], []
    for mode in field.config.modes:
        carrier = mode.a0 * np.exp(1j * (mode.nu * phi + mode.cep_rad))
        b_plus.append(simpson(envelope * carrier * weight, dx=spacing, axis=-1))
        b_minus.append(simpson(envelope * carrier.conj() * weight, dx=spacing, axis=-1))
    b2 = simpson(field.intensity_series(phi) * weight, dx=spacing, axis=-1)
    return np.array(b_plus), np.array(b_minus), b2


def _batched(
    field: PulseField,
    kinematics: EmissionKinematics,
    phi_k: ArrayR,
    per_cycle: int,
    settings: QuadratureSettings,
) -> tuple[ArrayC, ArrayC, ArrayC]:
    integrals = _phase_integrals(field, per_cycle, settings.phase_method)
    b_plus = np.empty((len(field.config.modes), phi_k.size), dtype=complex)
    b_minus = np.empty_like(b_plus)
    b2 = np.empty(phi_k.size, dtype=complex)
    for start in range(0, phi_k.size, settings.azimuth_chunk):
        chunk = slice(start, start + settings.azimuth_chunk)
        coefficients = [phase_coefficients(kinematics, float(p)) for p in phi_k[chunk]]
        bp, bm, bb = _moments(field, integrals, coefficients)
        b_plus[:, chunk], b_minus[:, chunk], b2[chunk] = bp, bm, bb
    return b_plus, b_minus, b2


def _relative_change(old: list[ArrayC], new: list[ArrayC]) -> float:
    scale = max(float(np.max(np.abs(x))) for x in new)
    if scale == 0.0:
        return 0.0
    return max(float(np.max(np.abs(a - b))) for a, b in zip(old, new)) / scale


def reduced_integrals(
    field: PulseField,
    kinematics: EmissionKinematics,
    phi_k: ArrayLike,
    settings: QuadratureSettings | None = None,
) -> ReducedIntegrals:
    """
    Moments at the azimuths `phi_k`, refined by grid doubling until B_2 and
    B_{j,±} change by less than `settings.tolerance` relative to their largest
    magnitude.
    """
    settings = settings or QuadratureSettings()
    if kinematics.s <= 0.0:
        raise ValueError("s must be positive")
    phi_k = np.atleast_1d(np.asarray(phi_k, dtype=float))

    per_cycle = points_per_cycle(field, kinematics.s, settings)
    previous = _batched(field, kinematics, phi_k, per_cycle, settings)
    history = []
    for _ in range(settings.max_refinements):
        per_cycle *= 2
        current = _batched(field, kinematics, phi_k, per_cycle, settings)
        change = _relative_change(
            [previous[0], previous[1], previous[2]], [current[0], current[1], current[2]]
        )
        history.append(change)
        if change < settings.tolerance:
            break
        logger.debug(f"🔄 Refining phase grid to {per_cycle} points per cycle (Δ={change:.2e})")
        previous = current
    else:
        raise QuadratureError(
            "quadrature failure",
            {
                "omega_ev": kinematics.omega_ev,
                "theta_rad": kinematics.theta_rad,
                "points_per_cycle": per_cycle,
                "relative_changes": [float(f"{c:.3e}") for c in history],
            },
        )

    b_plus, b_minus, b2 = current
    integrals = ReducedIntegrals(
        phi_k=phi_k,
        b0=np.zeros(phi_k.size, dtype=complex),
        b_plus=b_plus,
        b_minus=b_minus,
        b2=b2,
        helicities=field.config.helicities,
        grid_points=per_cycle * field.n_cycle + 1,
    )
    coefficients = [phase_coefficients(kinematics, float(p)) for p in phi_k]
    alpha_x = np.array([c.alpha_x for c in coefficients])
    alpha_y = np.array([c.alpha_y for c in coefficients])
    beta_q = coefficients[0].beta_q
    b0 = -(alpha_x * integrals.bx + alpha_y * integrals.by + beta_q * b2) / kinematics.s
    return replace(integrals, b0=b0)


def b0_adiabatic(
    field: PulseField,
    kinematics: EmissionKinematics,
    phi_k: float,
    settings: QuadratureSettings | None = None,
    switch_rate: float = 1e-3,
) -> complex:
    """
    ∫ e^{iΦ} with the field-free tails damped by e^{-ε|φ - edge|}: Simpson over
    the pulse plus the analytic tails, extrapolated to ε → 0 by one Richardson
    step.
    """
    settings = settings or QuadratureSettings()
    per_cycle = points_per_cycle(field, kinematics.s, settings) * 2 ** settings.max_refinements
    integrals = _phase_integrals(field, per_cycle, settings.phase_method)
    coefficients = phase_coefficients(kinematics, phi_k)
    phase = integrals.phase(coefficients)
    inner = simpson(np.exp(1j * phase), dx=integrals.phi[1] - integrals.phi[0])
    s = kinematics.s

    def damped(eps: float) -> complex:
        return (
            inner
            + np.exp(1j * phase[-1]) / (eps - 1j * s)
            + np.exp(1j * phase[0]) / (eps + 1j * s)
        )

    eps = switch_rate * s
    return complex(2.0 * damped(0.5 * eps) - damped(eps))


# ============================================================================
# Amplitude assembly
# ============================================================================


@dataclass(frozen=True)
class AmplitudeSample:
    value: complex
    omega_ev: float
    theta_rad: float
    phi_k: float
    spin_in: int
    spin_out: int
    photon_helicity: int


@dataclass(frozen=True)
class SpinorCoefficients:
    """C_X of M = C_0 B_0 + C_2 B_2 - m (C_x B_x + C_y B_y) for one azimuth."""

    c0: complex
    c2: complex
    cx: complex
    cy: complex

    def contract(self, b0: complex, b2: complex, bx: complex, by: complex) -> complex:
        return self.c0 * b0 + self.c2 * b2 - ELECTRON_MASS_EV * (self.cx * bx + self.cy * by)


def spinor_coefficients(
    kinematics: EmissionKinematics,
    phi_k: float,
    spin_in: int,
    spin_out: int,
    photon_helicity: int,
    gauge_zeta: float = 0.0,
) -> SpinorCoefficients:
    initial = helicity_spinor(kinematics.electron.momentum, spin_in)
    final = helicity_spinor(
        kinematics.final_momentum(phi_k),
        spin_out,
        phase=final_spinor_phase(spin_in, spin_out, phi_k),
    )
    bar_final = dirac_bar(final)

    k1 = np.array(kinematics.laser_momentum().as_tuple())
    photon = kinematics.photon_momentum(phi_k)
    polarization = photon_polarization(kinematics.theta_rad, phi_k, photon_helicity)
    eps_conj = polarization.conj() + gauge_zeta * np.array(photon.as_tuple())

    k1p, k1pp = kinematics.k1_dot_p, kinematics.k1_dot_pprime
    eps_slash = slash(eps_conj)
    k1_slash = slash(k1)
    c2 = ELECTRON_MASS_EV**2 * minkowski(k1, eps_conj) / (2.0 * k1p * k1pp)

    def bilinear(matrix):
        return complex(bar_final @ matrix @ initial)

    def gamma_vertex(i):
        return GAMMA[i] @ k1_slash @ eps_slash / (2.0 * k1pp) + eps_slash @ k1_slash @ GAMMA[i] / (2.0 * k1p)

    return SpinorCoefficients(
        c0=bilinear(eps_slash),
        c2=c2 * bilinear(k1_slash),
        cx=bilinear(gamma_vertex(1)),
        cy=bilinear(gamma_vertex(2)),
    )


def plane_wave_amplitude(
    field: PulseField,
    kinematics: EmissionKinematics,
    phi_k: float,
    spin_in: int,
    spin_out: int,
    photon_helicity: int,
    settings: QuadratureSettings | None = None,
    gauge_zeta: float = 0.0,
    integrals: ReducedIntegrals | None = None,
) -> AmplitudeSample:
    """
    Emission amplitude at one azimuth. `gauge_zeta` adds ζk' to the photon
    polarization for gauge checks.
    """
    if integrals is None:
        integrals = reduced_integrals(field, kinematics, [phi_k], settings)
    coefficients = spinor_coefficients(kinematics, phi_k, spin_in, spin_out, photon_helicity, gauge_zeta)
    value = coefficients.contract(
        integrals.b0[0], integrals.b2[0], integrals.bx[0], integrals.by[0]
    )
    return AmplitudeSample(
        value=value,
        omega_ev=kinematics.omega_ev,
        theta_rad=kinematics.theta_rad,
        phi_k=phi_k,
        spin_in=spin_in,
        spin_out=spin_out,
        photon_helicity=photon_helicity,
    )


@dataclass(frozen=True)
class AmplitudeGrid:
    """Amplitudes on a uniform azimuth grid for every (λ, λ', Λ')."""

    phi_k: ArrayR
    values: dict[tuple[int, int, int], ArrayC]
    grid_points: int

    def component(self, spin_in: int, spin_out: int, photon_helicity: int) -> ArrayC:
        return self.values[(spin_in, spin_out, photon_helicity)]


def azimuth_grid(n_phi: int) -> ArrayR:
    return 2.0 * math.pi * np.arange(n_phi) / n_phi


def amplitude_grid(
    field: PulseField,
    kinematics: EmissionKinematics,
    n_phi: int,
    spins_in: tuple[int, ...] = SPINS,
    photon_helicities: tuple[int, ...] = HELICITIES,
    settings: QuadratureSettings | None = None,
) -> AmplitudeGrid:
    phi_k = azimuth_grid(n_phi)
    integrals = reduced_integrals(field, kinematics, phi_k, settings)
    bx, by = integrals.bx, integrals.by

    values: dict[tuple[int, int, int], ArrayC] = {}
    for spin_in in spins_in:
        for spin_out in SPINS:
            for helicity in photon_helicities:
                column = np.empty(n_phi, dtype=complex)
                for i, phi in enumerate(phi_k):
                    coefficients = spinor_coefficients(kinematics, float(phi), spin_in, spin_out, helicity)
                    column[i] = coefficients.contract(integrals.b0[i], integrals.b2[i], bx[i], by[i])
                values[(spin_in, spin_out, helicity)] = column
    return AmplitudeGrid(phi_k=phi_k, values=values, grid_points=integrals.grid_points)


def rate_prefactor(kinematics: EmissionKinematics) -> float:
    """(e²/4π) k'_⊥ / ((k_1·p)(k_1·p'))."""
    return fine_structure * kinematics.k_perp / (kinematics.k1_dot_p * kinematics.k1_dot_pprime)


def plane_wave_rate(sample: AmplitudeSample, kinematics: EmissionKinematics) -> float:
    """Differential rate per unit azimuth, d³W/dω'dθdφ_k'."""
    return rate_prefactor(kinematics) * abs(sample.value) ** 2 / (2.0 * math.pi)


def plane_wave_rate_integrated(
    grid: AmplitudeGrid, kinematics: EmissionKinematics, spin_in: int, photon_helicity: int
) -> float:
    """Azimuth integral of the λ'-summed plane-wave rate (periodic trapezoid rule)."""
    power = sum(
        float(np.mean(np.abs(grid.component(spin_in, spin_out, photon_helicity)) ** 2))
        for spin_out in SPINS
    )
    return rate_prefactor(kinematics) * power
