import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import KinematicEdgeError
from src.models import ELECTRON_MASS_EV, ChannelVector, ElectronState, FourVector, LaserConfig, LaserMode
from src.physcore import (
    beta_sigma,
    channel_support,
    effective_mass,
    emission_kinematics,
    gamma_star,
    harmonic_energy,
    kinematic_edge,
    lightfront_s,
    photon_energy,
    ponderomotive_shift,
)

from .conftest import OMEGA1, THETA

ELECTRON = ElectronState.head_on(1.0e9)


def test_second_harmonic_energy_at_two_mrad(electron):
    assert photon_energy(2.0, THETA, electron, OMEGA1) == pytest.approx(2.9016e6, rel=1e-4)


def test_head_on_electron_keeps_small_lightfront_component_exact(electron):
    assert electron.momentum.minus == pytest.approx(ELECTRON_MASS_EV**2 / electron.momentum.plus, rel=1e-15)
    assert electron.momentum.square() == pytest.approx(ELECTRON_MASS_EV**2, rel=1e-12)


def test_photon_beyond_edge_is_rejected(electron):
    edge = kinematic_edge(THETA, electron)
    with pytest.raises(KinematicEdgeError):
        lightfront_s(1.01 * edge, THETA, electron, OMEGA1)


def test_transverse_electron_is_rejected():
    electron = ElectronState(momentum=FourVector(t=1.0e9, x=1.0e3, z=0.999e9))
    with pytest.raises(ValueError, match="transverse"):
        lightfront_s(1.0e6, THETA, electron, OMEGA1)


def test_zero_photon_energy_has_zero_s(electron):
    assert lightfront_s(0.0, THETA, electron, OMEGA1) == 0.0


@given(
    omega_fraction=st.floats(min_value=1e-6, max_value=0.5),
    theta=st.floats(min_value=1e-4, max_value=0.05),
)
def test_s_and_photon_energy_are_inverse(omega_fraction, theta):
    omega = omega_fraction * kinematic_edge(theta, ELECTRON)
    s = lightfront_s(omega, theta, ELECTRON, OMEGA1)
    assert photon_energy(s, theta, ELECTRON, OMEGA1) == pytest.approx(omega, rel=1e-10)


@given(
    omega_fraction=st.floats(min_value=1e-6, max_value=0.5),
    theta=st.floats(min_value=1e-4, max_value=0.05),
    phi_k=st.floats(min_value=0.0, max_value=2 * math.pi),
)
def test_final_electron_is_on_shell(omega_fraction, theta, phi_k):
    omega = omega_fraction * kinematic_edge(theta, ELECTRON)
    kin = emission_kinematics(omega, theta, ELECTRON, OMEGA1)
    assert kin.final_momentum(phi_k).square() == pytest.approx(ELECTRON_MASS_EV**2, rel=1e-9)
    assert kin.photon_momentum(phi_k).square() == pytest.approx(0.0, abs=1e-6 * omega**2)


@given(theta=st.floats(min_value=1e-4, max_value=0.05), s=st.floats(min_value=0.1, max_value=20.0))
def test_photon_energy_grows_with_s(theta, s):
    assert photon_energy(s, theta, ELECTRON, OMEGA1) < photon_energy(s + 0.1, theta, ELECTRON, OMEGA1)


def test_effective_mass_and_gamma_star(electron, two_color):
    assert effective_mass(two_color) == pytest.approx(ELECTRON_MASS_EV * math.sqrt(3.69), rel=1e-12)
    assert electron.gamma == pytest.approx(1956.95, rel=1e-5)
    assert gamma_star(electron, two_color) == pytest.approx(electron.gamma / math.sqrt(3.69), rel=1e-12)


def test_beta_sigma_matches_scattered_electron_form(electron, two_color):
    omega = photon_energy(2.0, THETA, electron, OMEGA1)
    kin = emission_kinematics(omega, THETA, electron, OMEGA1)
    beta = beta_sigma(kin, two_color)
    scattered = ElectronState(momentum=kin.final_momentum(0.0))
    assert -0.34 < beta < -0.32
    assert ponderomotive_shift(electron, scattered, two_color) == pytest.approx(beta, rel=1e-9)


def test_beta_sigma_vanishes_without_field(electron):
    dark = LaserConfig(modes=(LaserMode(nu=1, a0=0.0, helicity=1),))
    kin = emission_kinematics(1.0e6, THETA, electron, OMEGA1)
    assert beta_sigma(kin, dark) == 0.0


@given(a0=st.floats(min_value=0.01, max_value=3.0))
def test_beta_sigma_is_negative_and_scales_with_intensity(a0):
    config = LaserConfig(modes=(LaserMode(nu=1, a0=a0, helicity=1),))
    stronger = config.with_intensities((2.0 * a0,))
    kin = emission_kinematics(1.0e6, THETA, ELECTRON, OMEGA1)
    beta = beta_sigma(kin, config)
    assert beta < 0.0
    assert beta_sigma(kin, stronger) == pytest.approx(4.0 * beta, rel=1e-12)


def test_channel_support_interval(two_color):
    assert channel_support(ChannelVector(n=(3, 0)), -0.3, two_color) == pytest.approx((2.7, 3.0))
    assert channel_support(ChannelVector(n=(0, 1)), -0.3, two_color) == pytest.approx((1.7, 2.0))


def test_channel_support_rejects_positive_beta(two_color):
    with pytest.raises(ValueError):
        channel_support(ChannelVector(n=(1, 0)), 0.1, two_color)


def test_support_widens_with_intensity(electron, single_color):
    kin = emission_kinematics(1.0e6, THETA, electron, OMEGA1)
    channel = ChannelVector(n=(2,))
    weak = channel_support(channel, beta_sigma(kin, single_color), single_color)
    strong_config = single_color.with_intensities((2.6,))
    strong = channel_support(channel, beta_sigma(kin, strong_config), strong_config)
    assert strong[0] < weak[0] < weak[1] == strong[1]


def test_dressed_harmonic_solves_the_shift_equation(electron, single_color):
    omega = harmonic_energy(1.0, THETA, electron, single_color)
    kin = emission_kinematics(omega, THETA, electron, OMEGA1)
    assert kin.s == pytest.approx(1.0 + beta_sigma(kin, single_color), abs=1e-9)
    assert omega < photon_energy(1.0, THETA, electron, OMEGA1)


def test_dressed_harmonic_without_field_is_free_harmonic(electron):
    dark = LaserConfig(modes=(LaserMode(nu=1, a0=0.0, helicity=1),))
    assert harmonic_energy(2.0, THETA, electron, dark) == photon_energy(2.0, THETA, electron, OMEGA1)
