"""Multi-player and dealer game results from per-player outcome laws.

The open game runs in seat order: an einz ends the round at once in its
holder's favor, a bust eliminates, and the last seat wins by default when
everyone before him busted.  Among quiet standers the highest score wins;
a shared top score is a tie.  Players are treated as independent draws
from their own shoes (each per-player law is a marginal), which is the
standard approximation for these tables; a shared-shoe mode is available
for sensitivity checks.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence, Union

from .cards import Shoe, fresh_shoe
from .exact import (
    OutcomeDistribution,
    OutcomeKind,
    outcome_distribution,
    terminal_hand_compositions,
)
from .policy import ThresholdPolicy
from .reference import ReferenceStandTable, reference_table

ZERO = Fraction(0)


class DealerVariant(Enum):
    """Dealer-game rule sets.

    V1: symmetric comparison; equal results (including double bust or
        double einz) tie.
    V2: open-game rules for the player; the dealer wins only on a player
        bust or a strictly higher score, so no round ties.
    V3: V2 comparison with the dealer standing on 18 instead of 17.  The
        traditional statement of this variant garbles the threshold; a
        "chase" reading (dealer hits until strictly exceeding the
        player's stood score) is available via DealerRules(v3_rule="chase").
    """

    V1 = "V1"
    V2 = "V2"
    V3 = "V3"


@dataclass(frozen=True)
class PlayerSummary:
    """What a matchup needs to know about one player: his marginal law."""

    scores: dict[int, Fraction]  # stood score -> mass
    einz: Fraction
    bust: Fraction

    def __post_init__(self) -> None:
        total = sum(self.scores.values(), ZERO) + self.einz + self.bust
        if isinstance(total, Fraction):
            if total != 1:
                raise ValueError(f"player law sums to {total}, expected 1")
        elif abs(float(total) - 1.0) > 1e-9:
            raise ValueError(f"player law sums to {float(total)}, expected 1")

    @classmethod
    def from_distribution(cls, dist: OutcomeDistribution) -> "PlayerSummary":
        return cls(
            scores=dict(dist.score_marginals()),
            einz=dist.p_einz(),
            bust=dist.p_bust(),
        )

    @classmethod
    def from_reference(cls, table: ReferenceStandTable) -> "PlayerSummary":
        scores = table.stood_marginals()
        einz = table.einz_mass()
        return cls(scores=scores, einz=einz, bust=1 - sum(scores.values()) - einz)


PlayerLaw = Union[PlayerSummary, OutcomeDistribution]


def _as_summary(law: PlayerLaw) -> PlayerSummary:
    if isinstance(law, PlayerSummary):
        return law
    return PlayerSummary.from_distribution(law)


def policy_summary(policy: ThresholdPolicy, decks: int = 1, source: str = "exact") -> PlayerSummary:
    """A player's marginal law from either probability source."""
    if source == "reference":
        return PlayerSummary.from_reference(reference_table(policy))
    if source != "exact":
        raise ValueError(f"unknown source {source!r}")
    return PlayerSummary.from_distribution(
        outcome_distribution(fresh_shoe(decks), policy)
    )


@dataclass
class MatchResult:
    """Win vector, tie mass, and an event breakdown.

    ``win[i]`` is seat i's sole-win probability; ``tie`` aggregates every
    event where the top surviving score is shared.  ``detail`` keys:
    ``einz[i]`` (seat i won by einz), ``default[i]`` (all earlier seats
    busted), ``top[i]`` (sole best stander), ``tie[i,j,...]`` (those
    seats shared the top score).
    """

    win: tuple[Fraction, ...]
    tie: Fraction
    detail: dict[str, Fraction] = field(default_factory=dict)

    def loss(self, seat: int) -> Fraction:
        return 1 - self.win[seat] - self.tie


def open_match(players: Sequence[PlayerLaw]) -> MatchResult:
    """Round result for ≥2 independent players in seat order."""
    laws = [_as_summary(p) for p in players]
    n = len(laws)
    if n < 2:
        raise ValueError("an open match needs at least 2 players")
    win = [ZERO] * n
    tie = ZERO
    detail: dict[str, Fraction] = defaultdict(lambda: ZERO)

    def walk(i: int, best: int | None, holders: tuple[int, ...], p: Fraction) -> None:
        nonlocal tie
        if i == n:
            if len(holders) == 1:
                win[holders[0]] += p
                detail[f"top[{holders[0]}]"] += p
            else:
                tie += p
                detail["tie[" + ",".join(map(str, holders)) + "]"] += p
            return
        if i == n - 1 and not holders:
            # everyone before busted; the last seat wins without playing
            win[i] += p
            detail[f"default[{i}]"] += p
            return
        d = laws[i]
        if d.einz:
            win[i] += p * d.einz
            detail[f"einz[{i}]"] += p * d.einz
        if d.bust:
            walk(i + 1, best, holders, p * d.bust)
        for s, m in d.scores.items():
            if m == 0:
                continue
            if best is None or s > best:
                walk(i + 1, s, (i,), p * m)
            elif s == best:
                walk(i + 1, best, holders + (i,), p * m)
            else:
                walk(i + 1, best, holders, p * m)

    walk(0, None, (), Fraction(1))
    return MatchResult(win=tuple(win), tie=tie, detail=dict(detail))


def standing_match(score_dists: Sequence[Mapping[int, Fraction]]) -> MatchResult:
    """All players are known to have quietly stood; highest score wins."""
    if len(score_dists) < 2:
        raise ValueError("a standing match needs at least 2 players")
    dists = []
    for d in score_dists:
        total = sum(d.values(), ZERO)
        err = abs(float(total) - 1.0)
        if (isinstance(total, Fraction) and total != 1) and err > 1e-9:
            raise ValueError(f"score distribution sums to {float(total)}, expected 1")
        dists.append(dict(d))
    n = len(dists)
    win = [ZERO] * n
    tie = ZERO
    detail: dict[str, Fraction] = defaultdict(lambda: ZERO)

    def walk(i: int, best: int | None, holders: tuple[int, ...], p: Fraction) -> None:
        nonlocal tie
        if i == n:
            if len(holders) == 1:
                win[holders[0]] += p
                detail[f"top[{holders[0]}]"] += p
            else:
                tie += p
                detail["tie[" + ",".join(map(str, holders)) + "]"] += p
            return
        for s, m in dists[i].items():
            if best is None or s > best:
                walk(i + 1, s, (i,), p * m)
            elif s == best:
                walk(i + 1, best, holders + (i,), p * m)
            else:
                walk(i + 1, best, holders, p * m)

    walk(0, None, (), Fraction(1))
    return MatchResult(win=tuple(win), tie=tie, detail=dict(detail))


@dataclass(frozen=True)
class DealerRules:
    """Options for dealer_match: V3 threshold reading and law sources."""

    v3_rule: str = "stand18"  # or "chase"
    source: str = "exact"  # or "reference"
    dealer_shoe: Shoe | None = None

    def __post_init__(self) -> None:
        if self.v3_rule not in ("stand18", "chase"):
            raise ValueError("v3_rule must be 'stand18' or 'chase'")
        if self.source not in ("exact", "reference"):
            raise ValueError("source must be 'exact' or 'reference'")


def _dealer_summary(policy: ThresholdPolicy, rules: DealerRules) -> PlayerSummary:
    if rules.source == "reference":
        return PlayerSummary.from_reference(reference_table(policy))
    shoe = rules.dealer_shoe or fresh_shoe(1)
    return PlayerSummary.from_distribution(outcome_distribution(shoe, policy))


def dealer_match(
    player: PlayerLaw,
    dealer_policy: ThresholdPolicy | None,
    variant: DealerVariant,
    rules: DealerRules = DealerRules(),
) -> MatchResult:
    """Player-vs-dealer result under one of the dealer variants.

    ``win`` is (player, dealer).  The dealer draws from a fresh shoe
    (independence approximation), except the V3 chase reading, which
    re-enumerates the dealer per player stood score and therefore always
    needs a shoe (reference laws carry no chase thresholds).
    """
    p = _as_summary(player)
    if variant is DealerVariant.V3:
        if rules.v3_rule == "chase":
            return _dealer_match_chase(p, rules)
        dealer = _dealer_summary(ThresholdPolicy(18), rules)
        return _dealer_match_v2(p, dealer)
    if dealer_policy is None:
        dealer_policy = ThresholdPolicy(17)
    dealer = _dealer_summary(dealer_policy, rules)
    if variant is DealerVariant.V2:
        return _dealer_match_v2(p, dealer)
    return _dealer_match_v1(p, dealer)


def _dealer_match_v1(p: PlayerSummary, d: PlayerSummary) -> MatchResult:
    """Symmetric comparison: bust < 17..20 < einz; equal ranks tie."""

    def outcomes(s: PlayerSummary):
        yield (-1, s.bust)
        for score, m in s.scores.items():
            yield (score, m)
        yield (100, s.einz)

    win = ZERO
    lose = ZERO
    tie = ZERO
    for rp, mp in outcomes(p):
        if mp == 0:
            continue
        for rd, md in outcomes(d):
            if md == 0:
                continue
            q = mp * md
            if rp > rd:
                win += q
            elif rp < rd:
                lose += q
            else:
                tie += q
    return MatchResult(win=(win, lose), tie=tie)


def _dealer_match_v2(p: PlayerSummary, d: PlayerSummary) -> MatchResult:
    """Player busts => dealer wins; dealer wins only strictly higher; no tie."""
    dealer_win = p.bust
    detail: dict[str, Fraction] = {"player_bust": p.bust, "player_einz": p.einz}
    for s, m in p.scores.items():
        higher = d.einz + sum(md for sd, md in d.scores.items() if sd > s)
        dealer_win += m * higher
    return MatchResult(win=(1 - dealer_win, dealer_win), tie=ZERO, detail=detail)


def _dealer_match_chase(p: PlayerSummary, rules: DealerRules) -> MatchResult:
    """V3 chase reading: dealer hits until strictly above the stood score.

    Chasing score s is a threshold-(s+1) policy; the dealer then wins
    unless he busts.  Player einz wins outright; player bust loses.
    """
    shoe = rules.dealer_shoe or fresh_shoe(1)
    player_win = p.einz
    for s, m in p.scores.items():
        chase = outcome_distribution(shoe, ThresholdPolicy(s + 1))
        player_win += m * chase.p_bust()
    return MatchResult(win=(player_win, 1 - player_win), tie=ZERO)


# ── Shared-shoe (correlated) mode ────────────────────────────────────────


def open_match_shared_shoe(
    shoe: Shoe, policies: Sequence[ThresholdPolicy]
) -> MatchResult:
    """Two-player open match where both draw from one depleting shoe.

    Exact, but exponential in player count; provided as a sensitivity
    diagnostic for the independence approximation (no published target).
    """
    if len(policies) != 2:
        raise ValueError("shared-shoe enumeration supports exactly 2 players")
    first = terminal_hand_compositions(shoe, policies[0])
    win = [ZERO, ZERO]
    tie = ZERO

    @lru_cache(maxsize=None)
    def second_dist(counts: tuple[int, ...]) -> OutcomeDistribution:
        return outcome_distribution(Shoe(counts), policies[1], allow_exhaustion=True)

    for (drawn, o1), p in first.items():
        if o1.kind is OutcomeKind.EINZ:
            win[0] += p
            continue
        rest = tuple(c - d for c, d in zip(shoe.counts, drawn))
        d2 = second_dist(rest)
        if o1.kind is OutcomeKind.BUST:
            win[1] += p
            continue
        s1 = o1.score
        for o2, q in d2.mass.items():
            if o2.kind is OutcomeKind.EINZ:
                win[1] += p * q
            elif o2.kind is OutcomeKind.BUST:
                win[0] += p * q
            elif o2.score > s1:
                win[1] += p * q
            elif o2.score < s1:
                win[0] += p * q
            else:
                tie += p * q
    return MatchResult(win=(win[0], win[1]), tie=tie)
