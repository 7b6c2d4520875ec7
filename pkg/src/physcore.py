"""
Exact head-on kinematics for nonlinear Compton scattering.

All energies and momenta are in eV (ħ = c = 1). The laser propagates along -z
with k_1 = ω_1(1, 0, 0, -1); the electron moves along +z. Scalar products are
evaluated in light-front components so that the tiny p^- of a GeV electron
is never obtained by cancellation.
"""

import math

from scipy.optimize import brentq

from .errors import KinematicEdgeError
from .models import (
    ELECTRON_MASS_EV,
    ChannelVector,
    ElectronState,
    EmissionKinematics,
    LaserConfig,
)


def _require_head_on(electron: ElectronState) -> None:
    if not electron.is_head_on:
        raise ValueError("initial electron must have zero transverse momentum")


def _direction_dot(electron: ElectronState, theta: float) -> float:
    """p·n for the null direction n = (1, sinθ cosφ, sinθ sinφ, cosθ)."""
    p = electron.momentum
    return 0.5 * ((1.0 + math.cos(theta)) * p.minus + 2.0 * math.sin(0.5 * theta) ** 2 * p.plus)


def lightfront_s(
    omega: float, theta: float, electron: ElectronState, omega1: float
) -> float:
    """
    Light-front momentum fraction s = (k'·p) / (k_1·p - k_1·k') fixed by
    p + s k_1 = p' + k' with p' on-shell.
    """
    _require_head_on(electron)
    if omega < 0.0:
        raise ValueError("photon energy must be nonnegative")
    p_plus = electron.momentum.plus
    photon_plus = omega * (1.0 + math.cos(theta))
    denominator = omega1 * (p_plus - photon_plus)
    if denominator <= 0.0:
        raise KinematicEdgeError(
            f"beyond kinematic edge: ω'={omega:.6g} eV at θ={theta:.6g} rad"
        )
    return omega * _direction_dot(electron, theta) / denominator


def photon_energy(s: float, theta: float, electron: ElectronState, omega1: float) -> float:
    """Inverse of `lightfront_s` at fixed angle."""
    _require_head_on(electron)
    if s < 0.0:
        raise ValueError("s must be nonnegative")
    k1_dot_p = omega1 * electron.momentum.plus
    return s * k1_dot_p / (_direction_dot(electron, theta) + s * omega1 * (1.0 + math.cos(theta)))


def kinematic_edge(theta: float, electron: ElectronState) -> float:
    """Photon energy at which k_1·p' reaches zero (s → ∞)."""
    _require_head_on(electron)
    return electron.momentum.plus / (1.0 + math.cos(theta))


def emission_kinematics(
    omega: float, theta: float, electron: ElectronState, omega1: float
) -> EmissionKinematics:
    s = lightfront_s(omega, theta, electron, omega1)
    p_plus = electron.momentum.plus
    return EmissionKinematics(
        electron=electron,
        omega1_ev=omega1,
        omega_ev=omega,
        theta_rad=theta,
        s=s,
        k1_dot_p=omega1 * p_plus,
        k1_dot_pprime=omega1 * (p_plus - omega * (1.0 + math.cos(theta))),
    )


def effective_mass(config: LaserConfig) -> float:
    """Laser-dressed mass m* = m_e √(1 + Σ a_0,j²)."""
    return ELECTRON_MASS_EV * math.sqrt(1.0 + config.a0_squared_sum)


def gamma_star(electron: ElectronState, config: LaserConfig) -> float:
    return electron.energy / effective_mass(config)


def ponderomotive_shift(
    electron: ElectronState, scattered: ElectronState, config: LaserConfig
) -> float:
    """
    β_Σ = Σ_j (1/(2 k_1·p) - 1/(2 k_1·p')) m_e² a_0,j².

    Negative whenever the scattered electron has lost light-front momentum.
    """
    k1_dot_p = config.omega1_ev * electron.momentum.plus
    k1_dot_pprime = config.omega1_ev * scattered.momentum.plus
    return (
        0.5
        * ELECTRON_MASS_EV**2
        * config.a0_squared_sum
        * (k1_dot_pprime - k1_dot_p)
        / (k1_dot_p * k1_dot_pprime)
    )


def beta_sigma(kinematics: EmissionKinematics, config: LaserConfig) -> float:
    """β_Σ at an emission point, with k_1·p - k_1·p' = k_1·k' taken exactly."""
    k1_dot_k = kinematics.omega1_ev * kinematics.photon_plus
    return (
        -0.5
        * ELECTRON_MASS_EV**2
        * config.a0_squared_sum
        * k1_dot_k
        / (kinematics.k1_dot_p * kinematics.k1_dot_pprime)
    )


def channel_support(
    channel: ChannelVector, beta: float, config: LaserConfig
) -> tuple[float, float]:
    """Spectral support N(n) + β_Σ ≲ s ≲ N(n) of a channel."""
    if beta > 0.0:
        raise ValueError("β_Σ must be nonpositive")
    harmonic = channel.harmonic_index(config)
    return (harmonic + beta, float(harmonic))


def harmonic_energy(
    harmonic: float, theta: float, electron: ElectronState, config: LaserConfig
) -> float:
    """
    Photon energy of the dressed harmonic, i.e. the root of s = N + β_Σ(ω'(s)).

    Marks where the emission of a channel with N(n) = `harmonic` peaks when the
    pulse centre dominates.
    """
    omega1 = config.omega1_ev

    def mismatch(s: float) -> float:
        kin = emission_kinematics(photon_energy(s, theta, electron, omega1), theta, electron, omega1)
        return s - harmonic - beta_sigma(kin, config)

    if config.a0_squared_sum == 0.0:
        return photon_energy(harmonic, theta, electron, omega1)
    s_star = brentq(mismatch, 1e-9 * harmonic, harmonic, xtol=1e-14, rtol=1e-13)
    return photon_energy(s_star, theta, electron, omega1)
