"""
Multiphoton channel bookkeeping: enumeration, exact degeneracies, the
two-colour OAM separation rule and the TAM/OAM selection rule.
"""

import itertools
import logging
from collections.abc import Iterable

from .errors import TwoColorRuleError
from .models import (
    ChannelVector,
    DegeneracyPair,
    ElectronState,
    HelicityRelation,
    LaserConfig,
    ModePrediction,
)
from .physcore import beta_sigma, channel_support, emission_kinematics, photon_energy

logger = logging.getLogger(__name__)

DEFAULT_OVERLAP_TOLERANCE = 0.05


def _vectors(nus: tuple[int, ...], limit: int) -> Iterable[tuple[int, ...]]:
    """All nonnegative index vectors with Σ ν_j n_j ≤ limit."""
    if not nus:
        yield ()
        return
    head, *tail = nus
    for n_head in range(limit // head + 1):
        for rest in _vectors(tuple(tail), limit - head * n_head):
            yield (n_head, *rest)


def enumerate_channels(config: LaserConfig, n_max: int) -> list[ChannelVector]:
    """Every channel with 1 ≤ N(n) ≤ n_max, sorted by (N(n), n)."""
    if n_max < 1:
        raise ValueError("N_max must be at least 1")
    channels = [ChannelVector(n=n) for n in _vectors(config.nus, n_max) if sum(n) >= 1]
    return sorted(channels, key=lambda ch: (ch.harmonic_index(config), ch.n))


def make_pair(
    first: ChannelVector, second: ChannelVector, config: LaserConfig
) -> DegeneracyPair:
    return DegeneracyPair(
        first=first,
        second=second,
        delta_n=first.harmonic_index(config) - second.harmonic_index(config),
        delta_m=first.tam(config) - second.tam(config),
    )


def degenerate_pairs(config: LaserConfig, n_max: int) -> list[DegeneracyPair]:
    """
    Unordered pairs of distinct channels sharing N(n).

    Within a pair the channel drawing more photons from the lower modes comes
    first, e.g. ((2,0), (0,1)).
    """
    by_harmonic: dict[int, list[ChannelVector]] = {}
    for channel in enumerate_channels(config, n_max):
        by_harmonic.setdefault(channel.harmonic_index(config), []).append(channel)

    pairs = []
    for harmonic in sorted(by_harmonic):
        group = sorted(by_harmonic[harmonic], key=lambda ch: ch.n, reverse=True)
        for first, second in itertools.combinations(group, 2):
            pairs.append(make_pair(first, second, config))
    return pairs


def adjacent_pairs(config: LaserConfig, n_max: int) -> list[DegeneracyPair]:
    """Channel pairs whose harmonic indices differ by exactly one."""
    channels = enumerate_channels(config, n_max)
    return [
        make_pair(upper, lower, config)
        for lower, upper in itertools.product(channels, repeat=2)
        if upper.harmonic_index(config) - lower.harmonic_index(config) == 1
    ]


def helicity_relation(config: LaserConfig) -> HelicityRelation:
    """Relation between the helicities of a two-colour driver."""
    if len(config.modes) != 2:
        raise TwoColorRuleError(f"expected two modes, got {len(config.modes)}")
    first, second = config.helicities
    return HelicityRelation.EQUAL if first == second else HelicityRelation.OPPOSITE


def delta_ell_rule(nu: int, relation: HelicityRelation | str) -> int:
    """
    OAM separation of the degenerate pair (n_1, n_2) ~ (n_1 - ν, n_2 + 1):
    ν - 1 for equal helicities and ν + 1 for opposite ones.
    """
    if nu < 2:
        raise TwoColorRuleError(f"no two-color rule for ν={nu}")
    relation = HelicityRelation(relation)
    return nu - 1 if relation is HelicityRelation.EQUAL else nu + 1


def generator_steps(pair: DegeneracyPair, nu: int) -> int | None:
    """
    Number k of generator applications (n_1 - ν, n_2 + 1) mapping `pair.first`
    onto `pair.second`; None when the pair is not connected that way.
    """
    (a1, a2), (b1, b2) = pair.first.n, pair.second.n
    k = b2 - a2
    if k == 0 or a1 - b1 != nu * k:
        return None
    return abs(k)


def tam_of_channel(
    channel: ChannelVector,
    config: LaserConfig,
    spin_in: int,
    spin_out: int,
    photon_helicity: int,
) -> ModePrediction:
    """m' = Σ n_j Λ_j + λ - λ' and ℓ' = m' - Λ'."""
    tam = channel.tam(config) + spin_in - spin_out
    return ModePrediction(
        photon_helicity=photon_helicity,
        initial_spin=spin_in,
        final_spin=spin_out,
        tam=tam,
        ell=tam - photon_helicity,
    )


def overlap_test(
    pair: DegeneracyPair, beta: float, tolerance: float = DEFAULT_OVERLAP_TOLERANCE
) -> bool:
    """Support intervals overlap iff |ΔN| ≤ |β_Σ|(1 + tolerance)."""
    if beta > 0.0:
        raise ValueError("β_Σ must be nonpositive")
    if pair.delta_n == 0:
        return True
    return abs(pair.delta_n) <= abs(beta) * (1.0 + tolerance)


def overlap_fraction(pair: DegeneracyPair, beta: float) -> float:
    """Shared length of the two support intervals divided by their common width |β_Σ|."""
    if beta > 0.0:
        raise ValueError("β_Σ must be nonpositive")
    if beta == 0.0:
        return 1.0 if pair.delta_n == 0 else 0.0
    return max(0.0, abs(beta) - abs(pair.delta_n)) / abs(beta)


# ============================================================================
# Channel atlas
# ============================================================================


def channel_atlas(
    config: LaserConfig, n_max: int, electron: ElectronState, theta: float
) -> list[dict]:
    """
    One row per channel with its TAM, the no-flip OAM for both photon
    helicities and the support interval at angle `theta`.

    β_Σ of each row is evaluated at the undressed harmonic position ω'(s = N(n)).
    """
    degenerate_with: dict[tuple[int, ...], list[str]] = {}
    for pair in degenerate_pairs(config, n_max):
        degenerate_with.setdefault(pair.first.n, []).append(str(pair.second))
        degenerate_with.setdefault(pair.second.n, []).append(str(pair.first))

    rows = []
    for channel in enumerate_channels(config, n_max):
        harmonic = channel.harmonic_index(config)
        omega = photon_energy(harmonic, theta, electron, config.omega1_ev)
        kinematics = emission_kinematics(omega, theta, electron, config.omega1_ev)
        s_lo, s_hi = channel_support(channel, beta_sigma(kinematics, config), config)
        rows.append(
            {
                "channel": str(channel),
                "harmonic": harmonic,
                "tam": channel.tam(config),
                "ell_minus": tam_of_channel(channel, config, 1, 1, -1).ell,
                "ell_plus": tam_of_channel(channel, config, 1, 1, 1).ell,
                "s_lo": s_lo,
                "s_hi": s_hi,
                "degenerate_with": ",".join(degenerate_with.get(channel.n, [])) or "-",
            }
        )
    logger.info(f"🗺️  Atlas holds {len(rows)} channels up to N={n_max}")
    return rows


ATLAS_COLUMNS = (
    "channel",
    "harmonic",
    "tam",
    "ell_minus",
    "ell_plus",
    "s_lo",
    "s_hi",
    "degenerate_with",
)


def format_atlas_tsv(rows: list[dict], metadata: dict[str, str]) -> str:
    lines = [f"# {key}={value}" for key, value in metadata.items()]
    lines.append("\t".join(ATLAS_COLUMNS))
    for row in rows:
        lines.append(
            "\t".join(
                repr(row[col]) if isinstance(row[col], float) else str(row[col])
                for col in ATLAS_COLUMNS
            )
        )
    return "\n".join(lines) + "\n"
