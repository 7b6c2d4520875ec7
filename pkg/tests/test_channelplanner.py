import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.channelplanner import (
    adjacent_pairs,
    channel_atlas,
    degenerate_pairs,
    delta_ell_rule,
    enumerate_channels,
    format_atlas_tsv,
    generator_steps,
    helicity_relation,
    overlap_fraction,
    overlap_test,
    tam_of_channel,
)
from src.errors import TwoColorRuleError
from src.models import ChannelVector, HelicityRelation, LaserConfig, LaserMode
from src.physcore import beta_sigma, emission_kinematics, photon_energy

from .conftest import OMEGA1, THETA


def two_color_config(nu: int, opposite: bool = False) -> LaserConfig:
    return LaserConfig(
        modes=(
            LaserMode(nu=1, a0=1.3, helicity=1),
            LaserMode(nu=nu, a0=1.0, helicity=-1 if opposite else 1),
        )
    )


THREE_COLOR = LaserConfig(
    modes=(
        LaserMode(nu=1, a0=1.4, helicity=1),
        LaserMode(nu=2, a0=1.2, helicity=1),
        LaserMode(nu=3, a0=1.0, helicity=1),
    )
)


def brute_force(nus: tuple[int, ...], n_max: int) -> set[tuple[int, ...]]:
    ranges = [range(n_max // nu + 1) for nu in nus]
    return {
        n
        for n in itertools.product(*ranges)
        if 1 <= sum(nu * n_j for nu, n_j in zip(nus, n)) <= n_max
    }


def test_single_color_channels_are_the_harmonics(single_color):
    assert [ch.n for ch in enumerate_channels(single_color, 3)] == [(1,), (2,), (3,)]


def test_two_color_channels_are_sorted_by_harmonic(two_color):
    assert [ch.n for ch in enumerate_channels(two_color, 2)] == [(1, 0), (0, 1), (2, 0)]


def test_three_color_channels_up_to_three():
    channels = {ch.n for ch in enumerate_channels(THREE_COLOR, 3)}
    assert channels == {(1, 0, 0), (2, 0, 0), (0, 1, 0), (3, 0, 0), (1, 1, 0), (0, 0, 1)}


@pytest.mark.parametrize("nu", [2, 3, 5])
@pytest.mark.parametrize("n_max", [1, 4, 9, 20])
def test_enumeration_matches_brute_force(nu, n_max):
    config = two_color_config(nu)
    assert {ch.n for ch in enumerate_channels(config, n_max)} == brute_force(config.nus, n_max)


def test_enumeration_requires_positive_limit(two_color):
    with pytest.raises(ValueError):
        enumerate_channels(two_color, 0)


def test_second_harmonic_pair_for_nu_two(two_color):
    pairs = degenerate_pairs(two_color, 2)
    assert len(pairs) == 1
    pair = pairs[0]
    assert (pair.first.n, pair.second.n) == ((2, 0), (0, 1))
    assert pair.delta_n == 0
    assert pair.delta_m == 1


def test_third_harmonic_pair_for_nu_three():
    pairs = degenerate_pairs(two_color_config(3), 3)
    assert [(p.first.n, p.second.n) for p in pairs] == [((3, 0), (0, 1))]
    assert pairs[0].delta_m == 2


def test_three_color_degeneracies():
    pairs = degenerate_pairs(THREE_COLOR, 3)
    assert len(pairs) == 4
    assert {(p.first.n, p.second.n) for p in pairs} == {
        ((2, 0, 0), (0, 1, 0)),
        ((3, 0, 0), (1, 1, 0)),
        ((3, 0, 0), (0, 0, 1)),
        ((1, 1, 0), (0, 0, 1)),
    }


def test_adjacent_pairs_differ_by_one_harmonic(two_color):
    pairs = adjacent_pairs(two_color, 3)
    assert pairs
    assert all(pair.delta_n == 1 for pair in pairs)


def test_helicity_relation(two_color):
    assert helicity_relation(two_color) is HelicityRelation.EQUAL
    assert helicity_relation(two_color_config(2, opposite=True)) is HelicityRelation.OPPOSITE
    with pytest.raises(TwoColorRuleError):
        helicity_relation(THREE_COLOR)


@pytest.mark.parametrize(
    ("nu", "relation", "expected"),
    [(2, "equal", 1), (3, "equal", 2), (2, "opposite", 3), (4, HelicityRelation.OPPOSITE, 5)],
)
def test_delta_ell_rule(nu, relation, expected):
    assert delta_ell_rule(nu, relation) == expected


def test_delta_ell_rule_needs_a_second_color():
    with pytest.raises(TwoColorRuleError):
        delta_ell_rule(1, "equal")
    with pytest.raises(ValueError):
        delta_ell_rule(0, "opposite")


@given(
    nu=st.integers(min_value=2, max_value=5),
    opposite=st.booleans(),
    n_max=st.integers(min_value=2, max_value=12),
)
def test_every_degenerate_pair_obeys_the_rule(nu, opposite, n_max):
    config = two_color_config(nu, opposite)
    rule = delta_ell_rule(nu, helicity_relation(config))
    for pair in degenerate_pairs(config, n_max):
        k = generator_steps(pair, nu)
        assert k is not None
        assert abs(pair.delta_m) == k * rule


def test_generator_steps_rejects_unconnected_pairs(two_color):
    pair = adjacent_pairs(two_color, 2)[0]
    assert generator_steps(pair, 2) is None


@pytest.mark.parametrize(
    ("spin_in", "spin_out", "photon_helicity", "tam", "ell"),
    [(1, 1, -1, 1, 2), (1, 1, 1, 1, 0), (1, -1, -1, 3, 4), (-1, 1, 1, -1, -2)],
)
def test_tam_of_fundamental(single_color, spin_in, spin_out, photon_helicity, tam, ell):
    prediction = tam_of_channel(ChannelVector(n=(1,)), single_color, spin_in, spin_out, photon_helicity)
    assert (prediction.tam, prediction.ell) == (tam, ell)


def test_degenerate_second_harmonic_modes(two_color):
    ells = {tam_of_channel(ChannelVector(n=n), two_color, 1, 1, -1).ell for n in [(2, 0), (0, 1)]}
    assert ells == {3, 2}


def test_overlap_test():
    config = LaserConfig(modes=(LaserMode(nu=1, a0=1.3, helicity=1),))
    pair = adjacent_pairs(config, 2)[0]
    assert not overlap_test(pair, -0.2)
    assert overlap_test(pair, -1.0)
    assert overlap_test(pair, -0.96)
    assert not overlap_test(pair, -0.9)


def test_degenerate_pairs_always_overlap(two_color):
    pair = degenerate_pairs(two_color, 2)[0]
    assert overlap_test(pair, 0.0)
    assert overlap_fraction(pair, 0.0) == 1.0


def test_overlap_fraction(single_color):
    pair = adjacent_pairs(single_color, 2)[0]
    assert overlap_fraction(pair, -0.5) == 0.0
    assert overlap_fraction(pair, -2.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        overlap_fraction(pair, 0.5)


def test_adjacent_single_color_harmonics_stay_separate_at_two_mrad(electron, single_color):
    omega = photon_energy(2.0, THETA, electron, OMEGA1)
    beta = beta_sigma(emission_kinematics(omega, THETA, electron, OMEGA1), single_color)
    assert all(not overlap_test(pair, beta) for pair in adjacent_pairs(single_color, 3))


def test_atlas_marks_degenerate_channels(electron, two_color):
    rows = {row["channel"]: row for row in channel_atlas(two_color, 3, electron, THETA)}
    assert rows["(2,0)"]["degenerate_with"] == "(0,1)"
    assert rows["(0,1)"]["degenerate_with"] == "(2,0)"
    assert rows["(1,0)"]["degenerate_with"] == "-"
    assert rows["(2,0)"]["ell_minus"] == 3
    assert rows["(0,1)"]["ell_minus"] == 2
    assert rows["(2,0)"]["s_hi"] == 2.0
    assert rows["(2,0)"]["s_lo"] < 2.0


def test_atlas_tsv_layout(electron, two_color):
    text = format_atlas_tsv(channel_atlas(two_color, 2, electron, THETA), {"n_max": "2"})
    lines = text.splitlines()
    assert lines[0] == "# n_max=2"
    assert lines[1].split("\t")[0] == "channel"
    assert len(lines) == 2 + 3
