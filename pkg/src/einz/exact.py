"""Exact enumeration of final outcomes for one player drawing from a shoe.

The state of a play-out is fully described by the cards drawn so far
(a small multiset), the live hand's total and size, and how many
change-on-14 restarts remain.  Draw order never changes a state's
probability, so a forward dynamic program over these states — a few
thousand at most, for any shoe size — yields exact without-replacement
probabilities for every (outcome, card count) pair.

All probabilities are `fractions.Fraction`; callers render decimals.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Mapping

from .cards import POINT_VALUES, Hand, HandClass, Shoe, classify_totals
from .policy import ThresholdPolicy

ZERO = Fraction(0)
ONE = Fraction(1)


class ShoeTooSmallError(ValueError):
    """The shoe cannot guarantee that every policy line terminates."""


class OutcomeKind(Enum):
    BUST = "bust"
    STOOD = "stood"
    EINZ = "einz"


@dataclass(frozen=True)
class Outcome:
    """A final result: what happened and with how many cards."""

    kind: OutcomeKind
    score: int | None  # stood score; None for einz and bust
    cards: int

    def __post_init__(self) -> None:
        if (self.kind is OutcomeKind.STOOD) != (self.score is not None):
            raise ValueError("score is set exactly for stood outcomes")

    def label(self) -> str:
        if self.kind is OutcomeKind.STOOD:
            return f"stood{self.score}"
        return self.kind.value


def stood(score: int, cards: int) -> Outcome:
    return Outcome(OutcomeKind.STOOD, score, cards)


def einz(cards: int) -> Outcome:
    return Outcome(OutcomeKind.EINZ, None, cards)


def bust(cards: int) -> Outcome:
    return Outcome(OutcomeKind.BUST, None, cards)


class OutcomeDistribution:
    """Probability mass over outcomes; masses sum to one."""

    def __init__(self, mass: Mapping[Outcome, Fraction], *, _checked: bool = False):
        self.mass: dict[Outcome, Fraction] = dict(mass)
        if not _checked:
            for o, p in self.mass.items():
                if p < 0:
                    raise ValueError(f"negative mass for {o}")
            total = sum(self.mass.values(), ZERO)
            if isinstance(total, Fraction):
                if total != 1:
                    raise ValueError(f"mass sums to {total}, expected 1")
            elif abs(total - 1.0) > 1e-12:
                raise ValueError(f"mass sums to {total}, expected 1 within 1e-12")

    def __iter__(self):
        return iter(self.mass.items())

    def total_mass(self) -> Fraction:
        return sum(self.mass.values(), ZERO)

    def p(self, kind: OutcomeKind, score: int | None = None, cards: int | None = None) -> Fraction:
        """Total mass of outcomes matching the given pattern (None = any)."""
        acc = ZERO
        for o, m in self.mass.items():
            if o.kind is not kind:
                continue
            if score is not None and o.score != score:
                continue
            if cards is not None and o.cards != cards:
                continue
            acc += m
        return acc

    def p_bust(self, cards: int | None = None) -> Fraction:
        return self.p(OutcomeKind.BUST, cards=cards)

    def p_einz(self, cards: int | None = None) -> Fraction:
        return self.p(OutcomeKind.EINZ, cards=cards)

    def p_stood(self, score: int | None = None, cards: int | None = None) -> Fraction:
        return self.p(OutcomeKind.STOOD, score=score, cards=cards)

    def stood_scores(self) -> list[int]:
        return sorted({o.score for o in self.mass if o.kind is OutcomeKind.STOOD})

    def max_cards(self) -> int:
        return max((o.cards for o in self.mass), default=0)

    def score_marginals(self, cards: int | None = None) -> dict[int, Fraction]:
        """Mass per stood score, optionally restricted to one card count."""
        return {s: self.p_stood(s, cards) for s in self.stood_scores()}

    def rounded(self, ndigits: int = 3) -> "OutcomeDistribution":
        """Each mass rounded half-up to ``ndigits`` decimals.

        The result is generally not normalized; it reproduces the loss of
        precision a published 3-decimal table carries, which matters when
        derived tables are compared against such a source.
        """
        return OutcomeDistribution(
            {o: round_half_up(m, ndigits) for o, m in self.mass.items()}, _checked=True
        )


def round_half_up(p: Fraction | float, ndigits: int = 3) -> Fraction:
    """Round to ``ndigits`` decimals with ties away from zero (half-up)."""
    f = Fraction(p)
    scale = 10**ndigits
    if f >= 0:
        n = (2 * f.numerator * scale + f.denominator) // (2 * f.denominator)
    else:
        n = -((-2 * f.numerator * scale + f.denominator) // (2 * f.denominator))
    return Fraction(n, scale)


# ── Forward enumeration ──────────────────────────────────────────────────

# A play-out state: (hand total, hand size, cards drawn this play-out as a
# counts tuple, restarts left).  Cards discarded by a change stay inside
# the drawn tuple (they are out of the shoe) but leave the hand.
_State = tuple[int, int, tuple[int, ...], int]

_ZERO_DRAWN = (0,) * len(POINT_VALUES)


def _worst_case_draws(total: int, stand_on: int) -> int:
    """Max further cards a live hand may need before any stop rule fires."""
    if total >= stand_on:
        return 0
    return (stand_on - 1 - total) // 2 + 1


def _enumerate(
    counts: tuple[int, ...],
    stand_on: int,
    change_on_14: bool,
    max_changes: int,
    start_total: int,
    start_count: int,
    changes_used: int,
    infinite_deck: bool,
    allow_exhaustion: bool,
    count_discarded: bool,
) -> dict[Outcome, Fraction]:
    """Forward DP from an arbitrary live (or empty) starting hand.

    ``counts`` is the drawable shoe (the starting hand's cards are already
    outside it).  Returns exact outcome masses.
    """
    n0 = sum(counts)
    changes_left = max(0, max_changes - changes_used) if change_on_14 else 0
    outcomes: dict[Outcome, Fraction] = defaultdict(lambda: ZERO)

    # States grouped by number of draws made during this play-out; within a
    # draw level, a change lowers changes_left without drawing, so levels
    # are processed per (draws, changes_left descending).
    level: dict[_State, Fraction] = {(start_total, start_count, _ZERO_DRAWN, changes_left): ONE}
    draws = 0

    def settle(total: int, count: int, drawn_n: int, kind: OutcomeKind, p: Fraction) -> None:
        cards = count + ((start_count + drawn_n) - count if count_discarded else 0)
        if kind is OutcomeKind.STOOD:
            outcomes[stood(total, cards)] += p
        elif kind is OutcomeKind.EINZ:
            outcomes[einz(cards)] += p
        else:
            outcomes[bust(cards)] += p

    while level:
        next_level: dict[_State, Fraction] = defaultdict(lambda: ZERO)
        # A change keeps the draw count but lowers changes_left, so drain
        # the level in strictly decreasing changes_left order.
        pending = dict(level)
        while pending:
            cl = max(s[3] for s in pending)
            batch = [(s, p) for s, p in pending.items() if s[3] == cl]
            for s, _ in batch:
                del pending[s]
            for (total, count, drawn, _), p in batch:
                if p == 0:
                    continue
                # Decision point: the first two cards are forced draws.
                if count >= 2:
                    if change_on_14 and total == 14 and cl > 0:
                        key = (0, 0, drawn, cl - 1)
                        pending[key] = pending.get(key, ZERO) + p
                        continue
                    if total >= stand_on:
                        settle(total, count, draws, OutcomeKind.STOOD, p)
                        continue
                # Hit.
                remaining_total = n0 if infinite_deck else n0 - draws
                if remaining_total <= 0:
                    if allow_exhaustion:
                        settle(total, count, draws, OutcomeKind.STOOD, p)
                        continue
                    raise ShoeTooSmallError(
                        f"shoe exhausted at a live total of {total} "
                        f"({n0} cards were available)"
                    )
                for i, v in enumerate(POINT_VALUES):
                    left = counts[i] if infinite_deck else counts[i] - drawn[i]
                    if left <= 0:
                        continue
                    pv = p * Fraction(counts[i] if infinite_deck else left, remaining_total)
                    ntotal, ncount = total + v, count + 1
                    ndrawn = drawn if infinite_deck else _bump(drawn, i)
                    cls = classify_totals(ntotal, ncount)
                    if cls is HandClass.EINZ:
                        settle(ntotal, ncount, draws + 1, OutcomeKind.EINZ, pv)
                    elif cls is HandClass.BUST:
                        settle(ntotal, ncount, draws + 1, OutcomeKind.BUST, pv)
                    else:
                        key = (ntotal, ncount, ndrawn, cl)
                        next_level[key] += pv
        level = dict(next_level)
        draws += 1

    return dict(outcomes)


def _bump(drawn: tuple[int, ...], i: int) -> tuple[int, ...]:
    return drawn[:i] + (drawn[i] + 1,) + drawn[i + 1 :]


@lru_cache(maxsize=4096)
def _cached(
    counts: tuple[int, ...],
    stand_on: int,
    change_on_14: bool,
    max_changes: int,
    start_total: int,
    start_count: int,
    changes_used: int,
    infinite_deck: bool,
    allow_exhaustion: bool,
    count_discarded: bool,
) -> OutcomeDistribution:
    mass = _enumerate(
        counts,
        stand_on,
        change_on_14,
        max_changes,
        start_total,
        start_count,
        changes_used,
        infinite_deck,
        allow_exhaustion,
        count_discarded,
    )
    return OutcomeDistribution(mass)


def outcome_distribution(
    shoe: Shoe,
    policy: ThresholdPolicy,
    *,
    hand: Hand | None = None,
    changes_used: int = 0,
    infinite_deck: bool = False,
    allow_exhaustion: bool = False,
    count_discarded: bool = False,
) -> OutcomeDistribution:
    """Exact outcome probabilities for one player under a threshold policy.

    ``shoe`` holds the drawable cards; when ``hand`` is given, its cards
    must already be outside the shoe and play continues from that hand.
    ``count_discarded`` makes the reported card counts include cards a
    change-on-14 threw away (the default counts only the final hand).
    ``infinite_deck`` freezes draw probabilities at their initial ratios
    (a with-replacement diagnostic mode).  ``allow_exhaustion`` turns an
    emptied shoe into a forced stand instead of an error.
    """
    hand = hand or Hand()
    if hand.count and classify_totals(hand.total, hand.count) is not HandClass.LIVE:
        raise ValueError("starting hand must be live")
    if not allow_exhaustion and not infinite_deck:
        need = _worst_case_draws(hand.total, policy.stand_on) if hand.count >= 2 else 12
        if shoe.total < need:
            raise ShoeTooSmallError(
                f"{shoe.total} cards cannot guarantee termination (need {need}); "
                "pass allow_exhaustion=True to force-stand on an empty shoe"
            )
    return _cached(
        shoe.counts,
        policy.stand_on,
        policy.change_on_14,
        policy.max_changes,
        hand.total,
        hand.count,
        changes_used,
        infinite_deck,
        allow_exhaustion,
        count_discarded,
    )


def reach_probability(
    shoe: Shoe,
    stand_on: int,
    *,
    hand: Hand | None = None,
    mode: str = "exact",
) -> Fraction:
    """P(finishing at ``stand_on`` or better, i.e. not busting).

    Modes: ``exact`` (without replacement), ``infinite`` (frozen draw
    ratios), and ``hybrid`` — sequential numerators over a denominator
    fixed at the initial shoe size raised to the sequence length, the
    arithmetic shortcut sometimes used for quick by-hand evaluations.
    """
    hand = hand or Hand()
    if mode in ("exact", "infinite"):
        dist = outcome_distribution(
            shoe,
            ThresholdPolicy(stand_on),
            hand=hand,
            infinite_deck=(mode == "infinite"),
        )
        return 1 - dist.p_bust()
    if mode != "hybrid":
        raise ValueError(f"unknown mode {mode!r}")

    n0 = shoe.total
    acc = ZERO

    def walk(total: int, count: int, counts: tuple[int, ...], numerator: int, depth: int) -> None:
        # counts = remaining drawable cards; numerators deplete, the
        # denominator stays n0 per drawn card.
        nonlocal acc
        if count >= 2 and total >= stand_on:
            acc += Fraction(numerator, n0**depth)
            return
        for i, v in enumerate(POINT_VALUES):
            if counts[i] == 0:
                continue
            ntotal, ncount = total + v, count + 1
            cls = classify_totals(ntotal, ncount)
            if cls is HandClass.BUST:
                continue
            num = numerator * counts[i]
            if cls is HandClass.EINZ:
                acc += Fraction(num, n0 ** (depth + 1))
            else:
                cdec = list(counts)
                cdec[i] -= 1
                walk(ntotal, ncount, tuple(cdec), num, depth + 1)

    walk(hand.total, hand.count, shoe.counts, 1, 0)
    return acc


def terminal_hand_compositions(
    shoe: Shoe,
    policy: ThresholdPolicy,
) -> dict[tuple[tuple[int, ...], Outcome], Fraction]:
    """Joint law of (drawn multiset, outcome) for a full play-out.

    Needed when a second player draws from the shoe this player depleted.
    Change-on-14 discards stay in the drawn multiset.
    """
    result: dict[tuple[tuple[int, ...], Outcome], Fraction] = defaultdict(lambda: ZERO)
    n0 = shoe.total
    changes_left = policy.max_changes if policy.change_on_14 else 0
    level: dict[_State, Fraction] = {(0, 0, _ZERO_DRAWN, changes_left): ONE}
    draws = 0
    while level:
        next_level: dict[_State, Fraction] = defaultdict(lambda: ZERO)
        pending = dict(level)
        while pending:
            cl = max(s[3] for s in pending)
            batch = [(s, p) for s, p in pending.items() if s[3] == cl]
            for s, _ in batch:
                del pending[s]
            for (total, count, drawn, _), p in batch:
                if count >= 2:
                    if policy.change_on_14 and total == 14 and cl > 0:
                        key = (0, 0, drawn, cl - 1)
                        pending[key] = pending.get(key, ZERO) + p
                        continue
                    if total >= policy.stand_on:
                        result[(drawn, stood(total, count))] += p
                        continue
                remaining_total = n0 - draws
                if remaining_total <= 0:
                    raise ShoeTooSmallError("shoe exhausted while enumerating compositions")
                for i, v in enumerate(POINT_VALUES):
                    left = shoe.counts[i] - drawn[i]
                    if left <= 0:
                        continue
                    pv = p * Fraction(left, remaining_total)
                    ntotal, ncount = total + v, count + 1
                    ndrawn = _bump(drawn, i)
                    cls = classify_totals(ntotal, ncount)
                    if cls is HandClass.EINZ:
                        result[(ndrawn, einz(ncount))] += pv
                    elif cls is HandClass.BUST:
                        result[(ndrawn, bust(ncount))] += pv
                    else:
                        next_level[(ntotal, ncount, ndrawn, cl)] += pv
        level = dict(next_level)
        draws += 1
    return dict(result)


def stood_hand_compositions(
    shoe: Shoe,
    policy: ThresholdPolicy,
    cards: int,
    min_card_value: int | None = None,
) -> list[tuple[tuple[int, ...], int, Fraction]]:
    """Stood hands with ``cards`` cards, renormalized, as (counts, score, p).

    Optionally conditions on every card in the hand exceeding
    ``min_card_value``.  Raises when nothing satisfies the condition.
    """
    joint = terminal_hand_compositions(shoe, policy)
    picked: list[tuple[tuple[int, ...], int, Fraction]] = []
    total = ZERO
    for (drawn, outcome), p in joint.items():
        if outcome.kind is not OutcomeKind.STOOD or outcome.cards != cards:
            continue
        if min_card_value is not None:
            if any(c > 0 and v <= min_card_value for v, c in zip(POINT_VALUES, drawn)):
                continue
        picked.append((drawn, outcome.score, p))
        total += p
    if total == 0:
        raise ValueError("no stood hands satisfy the conditioning")
    return [(d, s, p / total) for d, s, p in sorted(picked)]


# ── Conditional views ────────────────────────────────────────────────────


def conditional_score_given_stand(
    dist: OutcomeDistribution, cards: int | None
) -> dict[int, Fraction]:
    """Score law given the player quietly stood (einz and bust announced).

    ``cards`` restricts to hands of that size; None conditions only on
    standing.  Raises on zero conditioning mass.
    """
    masses = {s: dist.p_stood(s, cards) for s in dist.stood_scores()}
    total = sum(masses.values(), ZERO)
    if total == 0:
        raise ValueError(f"no stood mass at cards={cards}")
    return {s: m / total for s, m in masses.items() if m > 0}


def expected_score(
    dist: OutcomeDistribution,
    cards: int | None = None,
    include_einz: bool = False,
    einz_value: int = 21,
) -> Fraction:
    """Mean final score over stood outcomes, optionally counting einz.

    Conditioned on the card count when ``cards`` is given.  Raises on
    zero conditioning mass.
    """
    weight = ZERO
    acc = ZERO
    for o, m in dist.mass.items():
        if cards is not None and o.cards != cards:
            continue
        if o.kind is OutcomeKind.STOOD:
            weight += m
            acc += m * o.score
        elif o.kind is OutcomeKind.EINZ and include_einz:
            weight += m
            acc += m * einz_value
    if weight == 0:
        raise ValueError(f"no conditioning mass at cards={cards}")
    return acc / weight


def score_distribution_from_rounded(
    dist: OutcomeDistribution, cards: int | None, ndigits: int = 3
) -> dict[int, Fraction]:
    """Conditional score law derived from the 3-decimal rounded outcome table.

    Published conditional tables for this game are renormalizations of the
    rounded stand tables, so reproducing them requires rounding first.
    """
    return conditional_score_given_stand(dist.rounded(ndigits), cards)
