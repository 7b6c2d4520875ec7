"""
Multifrequency circularly polarized laser pulse.

The dimensionless vector potential is

    a(φ) = Σ_j a_0,j g(φ) (cos(ν_j φ + ψ_j), Λ_j sin(ν_j φ + ψ_j))

with φ the phase of the fundamental, ψ_j a per-mode carrier-envelope phase
and g the envelope. The cos² envelope g_j(ν_j φ) = cos²(φ/(2 N_cycle)) is
shared by every mode, so a(φ), the ponderomotive intensity Σ_j |a_j(φ)|² and
all their antiderivatives are finite trigonometric sums. `TrigSeries`
carries those sums and gives the Volkov phase in closed form.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import cumulative_simpson
from scipy.optimize import brentq

from .models import ELECTRON_MASS_EV, EmissionKinematics, LaserConfig

logger = logging.getLogger(__name__)

ArrayR = NDArray[np.float64]
ArrayC = NDArray[np.complex128]

Envelope = Literal["cos2", "flat"]
IntegralMethod = Literal["exact", "simpson"]

DEFAULT_POINTS_PER_CYCLE = 256

_FREQ_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class TrigSeries:
    """f(φ) = Σ_k amp_k cos(freq_k φ + phase_k)."""

    amp: ArrayR
    freq: ArrayR
    phase: ArrayR

    @classmethod
    def cosine(cls, amp: float, freq: float, phase: float = 0.0) -> "TrigSeries":
        return cls(np.array([amp], float), np.array([freq], float), np.array([phase], float))

    @classmethod
    def sine(cls, amp: float, freq: float, phase: float = 0.0) -> "TrigSeries":
        return cls.cosine(amp, freq, phase - 0.5 * math.pi)

    @classmethod
    def zero(cls) -> "TrigSeries":
        return cls(np.zeros(0), np.zeros(0), np.zeros(0))

    def __len__(self) -> int:
        return self.amp.size

    def __add__(self, other: "TrigSeries") -> "TrigSeries":
        return TrigSeries(
            np.concatenate([self.amp, other.amp]),
            np.concatenate([self.freq, other.freq]),
            np.concatenate([self.phase, other.phase]),
        ).simplified()

    def __mul__(self, other: "TrigSeries | float") -> "TrigSeries":
        if not isinstance(other, TrigSeries):
            return TrigSeries(self.amp * float(other), self.freq, self.phase)
        amp = 0.5 * np.multiply.outer(self.amp, other.amp).ravel()
        f_sum = np.add.outer(self.freq, other.freq).ravel()
        f_diff = np.subtract.outer(self.freq, other.freq).ravel()
        p_sum = np.add.outer(self.phase, other.phase).ravel()
        p_diff = np.subtract.outer(self.phase, other.phase).ravel()
        return TrigSeries(
            np.concatenate([amp, amp]),
            np.concatenate([f_sum, f_diff]),
            np.concatenate([p_sum, p_diff]),
        ).simplified()

    __rmul__ = __mul__

    def simplified(self) -> "TrigSeries":
        """Merge terms of equal |frequency| and drop vanishing ones."""
        if len(self) == 0:
            return self
        flip = self.freq < 0.0
        freq = np.where(flip, -self.freq, self.freq)
        phase = np.where(flip, -self.phase, self.phase)
        phasor = self.amp * np.exp(1j * phase)
        keys = np.round(freq, _FREQ_DECIMALS)

        merged: dict[float, complex] = {}
        representative: dict[float, float] = {}
        for key, f, z in zip(keys.tolist(), freq.tolist(), phasor.tolist()):
            merged[key] = merged.get(key, 0.0) + z
            representative.setdefault(key, 0.0 if key == 0.0 else f)

        amps, freqs, phases = [], [], []
        scale = float(np.max(np.abs(self.amp)))
        for key in sorted(merged):
            z = merged[key]
            if key == 0.0:
                z = complex(z.real, 0.0)
            if abs(z) <= 1e-15 * scale:
                continue
            amps.append(abs(z))
            freqs.append(representative[key])
            phases.append(math.atan2(z.imag, z.real))
        return TrigSeries(np.array(amps), np.array(freqs), np.array(phases))

    def __call__(self, phi: ArrayLike) -> ArrayR:
        phi = np.asarray(phi, dtype=float)
        if len(self) == 0:
            return np.zeros_like(phi)
        return np.cos(np.multiply.outer(phi, self.freq) + self.phase) @ self.amp

    def antiderivative(self, phi: ArrayLike, origin: float) -> ArrayR:
        """∫_origin^φ f(φ̃) dφ̃, exact."""
        phi = np.asarray(phi, dtype=float)
        if len(self) == 0:
            return np.zeros_like(phi)
        oscillating = self.freq != 0.0
        f = np.where(oscillating, self.freq, 1.0)
        upper = np.sin(np.multiply.outer(phi, f) + self.phase)
        lower = np.sin(origin * f + self.phase)
        swing = (upper - lower) / f
        drift = np.multiply.outer(phi - origin, np.cos(self.phase))
        return np.where(oscillating, swing, drift) @ self.amp


@dataclass(frozen=True)
class PulseField:
    """Plane-wave pulse on the support |φ| ≤ π N_cycle of the fundamental phase."""

    config: LaserConfig
    envelope: Envelope = "cos2"

    def __post_init__(self):
        if self.envelope not in ("cos2", "flat"):
            raise ValueError(f"unknown envelope {self.envelope!r}")
        _, hi = self.support
        for mode in self.config.modes:
            # g_j evaluated at its own phase φ_j = ν_j φ must close at the common edge
            edge = math.cos(mode.nu * hi / (2.0 * mode.nu * self.config.n_cycle)) ** 2
            if self.envelope == "cos2" and edge > 1e-12:
                raise ValueError(f"envelope of mode ν={mode.nu} does not close at the support edge")

    @property
    def n_cycle(self) -> int:
        return self.config.n_cycle

    @property
    def support(self) -> tuple[float, float]:
        half = math.pi * self.config.n_cycle
        return (-half, half)

    @property
    def origin(self) -> float:
        return self.support[0]

    @cached_property
    def envelope_series(self) -> TrigSeries:
        if self.envelope == "flat":
            return TrigSeries.cosine(1.0, 0.0)
        # cos²(φ/(2N)) = (1 + cos(φ/N)) / 2
        return TrigSeries.cosine(0.5, 0.0) + TrigSeries.cosine(0.5, 1.0 / self.n_cycle)

    @cached_property
    def mode_series(self) -> list[tuple[TrigSeries, TrigSeries]]:
        """(a_x, a_y) of every mode as trigonometric sums."""
        series = []
        for mode in self.config.modes:
            carrier_x = TrigSeries.cosine(mode.a0, mode.nu, mode.cep_rad)
            carrier_y = TrigSeries.sine(mode.a0 * mode.helicity, mode.nu, mode.cep_rad)
            series.append((self.envelope_series * carrier_x, self.envelope_series * carrier_y))
        return series

    @cached_property
    def intensity_series(self) -> TrigSeries:
        """
        Ponderomotive intensity Σ_j |a_j(φ)|². Beat terms a_i·a_j between
        different colours are left out: they oscillate at (ν_i ± ν_j) without
        carrying angular momentum, and the dressing β_Σ is built from Σ_j a_0,j².
        """
        return sum((x * x + y * y for x, y in self.mode_series), TrigSeries.zero())

    def inside(self, phi: ArrayLike) -> NDArray[np.bool_]:
        lo, hi = self.support
        phi = np.asarray(phi, dtype=float)
        return (phi > lo) & (phi < hi)

    def envelope_at(self, phi: ArrayLike) -> ArrayR:
        return np.where(self.inside(phi), self.envelope_series(phi), 0.0)

    def vector_potential(self, phi: ArrayLike) -> tuple[ArrayR, ArrayR]:
        mask = self.inside(phi)
        a_x = sum(x(phi) for x, _ in self.mode_series)
        a_y = sum(y(phi) for _, y in self.mode_series)
        return np.where(mask, a_x, 0.0), np.where(mask, a_y, 0.0)

    def intensity(self, phi: ArrayLike) -> ArrayR:
        """Σ_j |a_j(φ)|², zero outside the support."""
        return np.where(self.inside(phi), self.intensity_series(phi), 0.0)

    def carrier(self, mode_index: int, sign: int, phi: ArrayLike) -> ArrayC:
        """g(φ) e^{±i(ν_j φ + ψ_j)}, zero outside the support."""
        mode = self.config.modes[mode_index]
        phi = np.asarray(phi, dtype=float)
        return self.envelope_at(phi) * np.exp(sign * 1j * (mode.nu * phi + mode.cep_rad))

    def default_points_per_cycle(self) -> int:
        return DEFAULT_POINTS_PER_CYCLE * self.config.max_nu

    def grid(self, points_per_cycle: int | None = None) -> ArrayR:
        """Uniform grid over the support with an even number of intervals."""
        per_cycle = points_per_cycle or self.default_points_per_cycle()
        intervals = per_cycle * self.n_cycle
        intervals += intervals % 2
        lo, hi = self.support
        return np.linspace(lo, hi, intervals + 1)

    def cycle_averaged_intensity(self, center: float = 0.0) -> float:
        """⟨Σ_j |a_j|²⟩ over one fundamental period centred on `center`."""
        lo, hi = center - math.pi, center + math.pi
        series = self.intensity_series
        return float(
            (series.antiderivative(hi, self.origin) - series.antiderivative(lo, self.origin))
            / (2.0 * math.pi)
        )


def vector_potential(field: PulseField, phi: ArrayLike) -> tuple[ArrayR, ArrayR]:
    return field.vector_potential(phi)


@dataclass(frozen=True)
class PhaseCoefficients:
    """Φ(φ) = s φ + α_x I_x(φ) + α_y I_y(φ) + β_q I_2(φ)."""

    s: float
    alpha_x: float
    alpha_y: float
    beta_q: float


def phase_coefficients(kinematics: EmissionKinematics, phi_k: float) -> PhaseCoefficients:
    coupling = ELECTRON_MASS_EV * kinematics.k_perp / kinematics.k1_dot_pprime
    # (m²/2)(1/k_1p' - 1/k_1p) with k_1p - k_1p' = k_1k' taken exactly
    beta_q = (
        0.5
        * ELECTRON_MASS_EV**2
        * kinematics.omega1_ev
        * kinematics.photon_plus
        / (kinematics.k1_dot_p * kinematics.k1_dot_pprime)
    )
    return PhaseCoefficients(
        s=kinematics.s,
        alpha_x=coupling * math.cos(phi_k),
        alpha_y=coupling * math.sin(phi_k),
        beta_q=beta_q,
    )


@dataclass(frozen=True)
class PhaseIntegrals:
    """
    Cumulative moments of the field on a uniform grid, all measured from the
    leading support edge: per-mode ∫a_x, ∫a_y and the total ∫Σ_j |a_j|².
    """

    phi: ArrayR
    first_x: ArrayR
    first_y: ArrayR
    second: ArrayR
    method: IntegralMethod

    @classmethod
    def compute(
        cls,
        field: PulseField,
        points_per_cycle: int | None = None,
        method: IntegralMethod = "exact",
    ) -> "PhaseIntegrals":
        phi = field.grid(points_per_cycle)
        if method == "exact":
            origin = field.origin
            first_x = np.array([x.antiderivative(phi, origin) for x, _ in field.mode_series])
            first_y = np.array([y.antiderivative(phi, origin) for _, y in field.mode_series])
            second = field.intensity_series.antiderivative(phi, origin)
        elif method == "simpson":
            mask = field.inside(phi)
            first_x = np.array(
                [cumulative_simpson(np.where(mask, x(phi), 0.0), x=phi, initial=0.0) for x, _ in field.mode_series]
            )
            first_y = np.array(
                [cumulative_simpson(np.where(mask, y(phi), 0.0), x=phi, initial=0.0) for _, y in field.mode_series]
            )
            second = cumulative_simpson(field.intensity(phi), x=phi, initial=0.0)
        else:
            raise ValueError(f"unknown integration method {method!r}")
        return cls(phi=phi, first_x=first_x, first_y=first_y, second=second, method=method)

    @property
    def total_x(self) -> ArrayR:
        return self.first_x.sum(axis=0)

    @property
    def total_y(self) -> ArrayR:
        return self.first_y.sum(axis=0)

    def phase(self, coefficients: PhaseCoefficients) -> ArrayR:
        return (
            coefficients.s * self.phi
            + coefficients.alpha_x * self.total_x
            + coefficients.alpha_y * self.total_y
            + coefficients.beta_q * self.second
        )


def volkov_phase(
    field: PulseField, kinematics: EmissionKinematics, phi_k: float, phi: ArrayLike
) -> ArrayR:
    """
    Volkov exponent Φ(φ) at arbitrary phases; the moments freeze beyond the
    support so Φ is linear with slope s outside the pulse.
    """
    coefficients = phase_coefficients(kinematics, phi_k)
    phi = np.asarray(phi, dtype=float)
    lo, hi = field.support
    clipped = np.clip(phi, lo, hi)
    a_x = sum((x for x, _ in field.mode_series), TrigSeries.zero())
    a_y = sum((y for _, y in field.mode_series), TrigSeries.zero())
    return (
        coefficients.s * phi
        + coefficients.alpha_x * a_x.antiderivative(clipped, lo)
        + coefficients.alpha_y * a_y.antiderivative(clipped, lo)
        + coefficients.beta_q * field.intensity_series.antiderivative(clipped, lo)
    )


def volkov_phase_derivative(
    field: PulseField, kinematics: EmissionKinematics, phi_k: float, phi: ArrayLike
) -> ArrayR:
    """Φ'(φ) = s + α·a(φ) + β_q Σ_j |a_j(φ)|²."""
    coefficients = phase_coefficients(kinematics, phi_k)
    a_x, a_y = field.vector_potential(phi)
    return (
        coefficients.s
        + coefficients.alpha_x * a_x
        + coefficients.alpha_y * a_y
        + coefficients.beta_q * field.intensity(phi)
    )


def ponderomotive_slope(
    field: PulseField, kinematics: EmissionKinematics, center: float = 0.0
) -> float:
    """Cycle-averaged slope of the intensity term of Φ, which equals -β_Σ for a flat pulse."""
    beta_q = phase_coefficients(kinematics, 0.0).beta_q
    return beta_q * field.cycle_averaged_intensity(center)


def stationary_points(
    field: PulseField,
    kinematics: EmissionKinematics,
    phi_k: float,
    harmonic: float = 0.0,
    samples_per_cycle: int = 64,
) -> ArrayR:
    """
    Phases inside the pulse where Φ'(φ) = `harmonic`, i.e. where the emission
    of that harmonic is classically allowed.
    """

    def detuning(phi):
        return volkov_phase_derivative(field, kinematics, phi_k, phi) - harmonic

    lo, hi = field.support
    count = samples_per_cycle * field.config.max_nu * field.n_cycle
    phi = np.linspace(lo, hi, count + 1)[1:-1]
    values = detuning(phi)
    brackets = np.flatnonzero(np.sign(values[:-1]) * np.sign(values[1:]) < 0)
    roots = [
        brentq(lambda x: float(detuning(x)), phi[i], phi[i + 1], xtol=1e-13)
        for i in brackets
    ]
    roots.extend(phi[values == 0.0].tolist())
    return np.sort(np.array(roots, dtype=float))
