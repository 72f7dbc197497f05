"""Answer "what should I do now?" for an observed game state.

Given my hand, every card known to be out of the shoe, the opponents'
visible behavior (cards taken, stood or still to act, assumed policy),
and the rule set, compute win/tie/lose per legal action and recommend.

Semantics, fixed here and mirrored in the docs:

- Stand scores my current total against the opponent model.
- Hit is a one-card lookahead: draw one card from my depleted shoe, then
  einz wins, bust loses, anything else stands at the new total.  That is
  the question the advisor answers ("is one more card worth it?").
- Change-on-14 (legal only at a total of exactly 14) is a full playout:
  the hand is discarded face-up (its cards stay out of the shoe) and a
  fresh hand is played to my continuation policy's threshold.

Opponent laws come from the ``source``: "exact" enumerates them from a
fresh shoe of the configured size; "reference" uses the bundled
published single-deck stand tables.  ``opponent_model`` picks between
the marginal approximation (opponents draw from a fresh shoe; the
acceptance-tested, publication-style mode) and "conditioned", which
mixes exactly over the stood opponents' possible hand compositions and
depletes my shoe accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .cards import POINT_VALUES, Hand, HandClass, Shoe, classify, classify_totals, fresh_shoe
from .exact import (
    OutcomeKind,
    conditional_score_given_stand,
    outcome_distribution,
    reach_probability,
    stood_hand_compositions,
)
from .matchup import DealerVariant, PlayerSummary, standing_match
from .policy import Action, ThresholdPolicy, parse_policy
from .reference import reference_table

ZERO = Fraction(0)
ONE = Fraction(1)


class StateParseError(ValueError):
    """The JSON payload is malformed (shape, types, unknown literals)."""


class InconsistentStateError(ValueError):
    """The payload parses but describes an impossible or terminal state."""


class GameMode(Enum):
    OPEN = "open"
    DEALER = "dealer"


@dataclass(frozen=True)
class RuleSet:
    decks: int = 1
    mode: GameMode = GameMode.OPEN
    dealer_variant: DealerVariant | None = None
    change_on_14_allowed: bool = False
    dealer_policy: ThresholdPolicy = ThresholdPolicy(17)
    v3_rule: str = "stand18"

    def __post_init__(self) -> None:
        if self.decks < 1:
            raise ValueError("decks must be >= 1")
        if self.mode is GameMode.DEALER and self.dealer_variant is None:
            object.__setattr__(self, "dealer_variant", DealerVariant.V2)


@dataclass(frozen=True)
class OpponentInfo:
    policy: ThresholdPolicy
    has_stood: bool = False
    cards_taken: int | None = None
    min_card_value: int | None = None

    def __post_init__(self) -> None:
        if self.has_stood:
            if self.cards_taken is None or self.cards_taken < 2:
                raise ValueError("a stood opponent has taken at least 2 cards")


@dataclass(frozen=True)
class ObservedState:
    my_hand: Hand
    removed: tuple[int, ...]
    opponents: tuple[OpponentInfo, ...] = ()
    rules: RuleSet = RuleSet()
    my_policy: ThresholdPolicy = ThresholdPolicy(17)

    def validate(self) -> None:
        if self.my_hand.count == 0:
            raise InconsistentStateError("my hand is empty")
        hand_left = list(self.my_hand.values)
        for v in self.removed:
            if v in hand_left:
                hand_left.remove(v)
        if hand_left:
            raise InconsistentStateError(
                f"removed cards must include my hand (missing {hand_left})"
            )
        try:
            self.shoe()
        except ValueError as e:
            raise InconsistentStateError(str(e)) from None
        if self.rules.mode is GameMode.DEALER and self.opponents:
            raise InconsistentStateError("dealer games take no opponent list (the dealer is implicit)")

    def shoe(self) -> Shoe:
        """Drawable cards: a fresh shoe minus everything known to be out."""
        return fresh_shoe(self.rules.decks).remove_all(self.removed)


@dataclass
class ActionEvaluation:
    """Win/tie/lose for one action; ties keyed by how many players share."""

    action: Action
    win: Fraction
    tie_breakdown: dict[int, Fraction]
    lose: Fraction
    recommendation_rank: int = 0

    @property
    def tie(self) -> Fraction:
        return sum(self.tie_breakdown.values(), ZERO)


# ── Opponent threat model ────────────────────────────────────────────────


@dataclass(frozen=True)
class _Threat:
    """One opponent reduced to (beat, equal, below) masses per my score."""

    beats: dict[int, Fraction]
    equals: dict[int, Fraction]

    def beat(self, s: int) -> Fraction:
        return self.beats[s]

    def equal(self, s: int) -> Fraction:
        return self.equals[s]

    def below(self, s: int) -> Fraction:
        return 1 - self.beats[s] - self.equals[s]


# every total a live hand of two or more cards can stand on
_SCORE_RANGE = tuple(range(4, 21))


def _threat_from_scores(scores: dict[int, Fraction], einz: Fraction, bust: Fraction) -> _Threat:
    beats, equals = {}, {}
    for s in _SCORE_RANGE:
        beats[s] = einz + sum((m for t, m in scores.items() if t > s), ZERO)
        equals[s] = scores.get(s, ZERO)
    return _Threat(beats, equals)


def _opponent_threat(opp: OpponentInfo, state: ObservedState, source: str,
                     shoe: Shoe | None = None) -> _Threat:
    """Marginal-mode threat: stood opponents can no longer einz or bust."""
    if source == "reference":
        ref = reference_table(opp.policy)
        if opp.has_stood:
            cond = ref.conditional_given_stand(opp.cards_taken)
            return _threat_from_scores(cond, ZERO, ZERO)
        summary = PlayerSummary.from_reference(ref)
        return _threat_from_scores(summary.scores, summary.einz, summary.bust)
    opp_shoe = shoe or fresh_shoe(state.rules.decks)
    dist = outcome_distribution(opp_shoe, opp.policy)
    if opp.has_stood:
        cond = conditional_score_given_stand(dist, opp.cards_taken)
        return _threat_from_scores(cond, ZERO, ZERO)
    return _threat_from_scores(dict(dist.score_marginals()), dist.p_einz(), dist.p_bust())


def _dealer_threat(state: ObservedState, source: str) -> tuple[_Threat, DealerVariant]:
    rules = state.rules
    variant = rules.dealer_variant or DealerVariant.V2
    policy = rules.dealer_policy
    if variant is DealerVariant.V3 and rules.v3_rule == "stand18":
        policy = ThresholdPolicy(18)
    if variant is DealerVariant.V3 and rules.v3_rule == "chase":
        # the chase threat depends on my score; handled separately
        return _Threat({}, {}), variant
    if source == "reference":
        summary = PlayerSummary.from_reference(reference_table(policy))
    else:
        summary = PlayerSummary.from_distribution(
            outcome_distribution(fresh_shoe(rules.decks), policy)
        )
    return _threat_from_scores(summary.scores, summary.einz, summary.bust), variant


# ── Category combination ─────────────────────────────────────────────────


def _combine_open(threats: Sequence[_Threat], s: int) -> tuple[Fraction, dict[int, Fraction]]:
    """(win, tie-by-cardinality) for my stood score s against independents.

    Multiplies per-opponent (below + equal·x) polynomials; the x^j
    coefficient is the chance that exactly j opponents match my score
    while nobody beats it.
    """
    poly = [ONE]
    for t in threats:
        lo, eq = t.below(s), t.equal(s)
        nxt = [ZERO] * (len(poly) + 1)
        for j, c in enumerate(poly):
            nxt[j] += c * lo
            nxt[j + 1] += c * eq
        poly = nxt
    win = poly[0]
    ties = {j + 1: poly[j] for j in range(1, len(poly)) if poly[j] != 0}
    return win, ties


def _categories_for_score(state: ObservedState, s: int, threats, dealer,
                          source: str) -> tuple[Fraction, dict[int, Fraction], Fraction]:
    """(win, ties, lose) for standing on score s."""
    if state.rules.mode is GameMode.OPEN:
        win, ties = _combine_open(threats, s)
        lose = 1 - win - sum(ties.values(), ZERO)
        return win, ties, lose
    threat, variant = dealer
    if variant is DealerVariant.V1:
        win = threat.below(s)  # a dealer bust ranks below any stood score
        tie = threat.equal(s)
        return win, ({2: tie} if tie else {}), 1 - win - tie
    if variant is DealerVariant.V3 and state.rules.v3_rule == "chase":
        chase = outcome_distribution(fresh_shoe(state.rules.decks), ThresholdPolicy(s + 1))
        win = chase.p_bust()
        return win, {}, 1 - win
    # V2 comparison: dealer needs strictly higher; equal goes to the player
    win = 1 - threat.beat(s)
    return win, {}, threat.beat(s)


def _categories_einz(state: ObservedState, threats, dealer, source: str):
    """My einz: open game and V2/V3 end in my favor at once; V1 compares."""
    if state.rules.mode is GameMode.OPEN:
        return ONE, {}, ZERO
    threat, variant = dealer
    if variant is DealerVariant.V1:
        if source == "reference":
            d_einz = reference_table(_v1_policy(state)).einz_mass()
        else:
            d_einz = outcome_distribution(
                fresh_shoe(state.rules.decks), _v1_policy(state)
            ).p_einz()
        return 1 - d_einz, ({2: d_einz} if d_einz else {}), ZERO
    return ONE, {}, ZERO


def _categories_bust(state: ObservedState, source: str):
    if state.rules.mode is GameMode.DEALER and state.rules.dealer_variant is DealerVariant.V1:
        if source == "reference":
            d_bust = 1 - sum(reference_table(_v1_policy(state)).any_row.values())
        else:
            d_bust = outcome_distribution(
                fresh_shoe(state.rules.decks), _v1_policy(state)
            ).p_bust()
        return ZERO, ({2: d_bust} if d_bust else {}), 1 - d_bust
    return ZERO, {}, ONE


def _v1_policy(state: ObservedState) -> ThresholdPolicy:
    return state.rules.dealer_policy


# ── Public operations ────────────────────────────────────────────────────

_PREFERENCE = {Action.STAND: 0, Action.HIT: 1, Action.CHANGE14: 2}


def evaluate_actions(
    state: ObservedState,
    *,
    source: str = "exact",
    opponent_model: str = "marginal",
) -> list[ActionEvaluation]:
    """One ActionEvaluation per legal action, ranked (1 = recommended)."""
    if source not in ("exact", "reference"):
        raise StateParseError(f"unknown source {source!r}")
    if opponent_model not in ("marginal", "conditioned"):
        raise StateParseError(f"unknown opponent model {opponent_model!r}")
    state.validate()
    if state.my_hand.count < 2:
        raise InconsistentStateError("evaluation starts once the two-card hand is complete")
    if classify(state.my_hand) is not HandClass.LIVE:
        raise InconsistentStateError(
            f"hand {list(state.my_hand.values)} is terminal ({classify(state.my_hand).value}); nothing to evaluate"
        )
    if opponent_model == "conditioned" and state.rules.mode is GameMode.OPEN:
        scenarios = _conditioned_scenarios(state, source)
    else:
        scenarios = [(ONE, state.shoe(), [
            _opponent_threat(o, state, source) for o in state.opponents
        ])]
    dealer = _dealer_threat(state, source) if state.rules.mode is GameMode.DEALER else None

    evals = []
    for action in _legal_actions(state):
        win, ties, lose = ZERO, {}, ZERO
        for weight, shoe, threats in scenarios:
            w, t, l = _evaluate_action(state, action, shoe, threats, dealer, source)
            win += weight * w
            lose += weight * l
            for m, p in t.items():
                ties[m] = ties.get(m, ZERO) + weight * p
        evals.append(ActionEvaluation(action, win, ties, lose))

    ranked = sorted(evals, key=lambda e: (-e.win, e.lose, _PREFERENCE[e.action]))
    for rank, e in enumerate(ranked, start=1):
        e.recommendation_rank = rank
    return evals


def _legal_actions(state: ObservedState) -> list[Action]:
    actions = [Action.STAND, Action.HIT]
    if state.rules.change_on_14_allowed and state.my_hand.total == 14:
        actions.append(Action.CHANGE14)
    return actions


def _evaluate_action(state, action, shoe, threats, dealer, source):
    if action is Action.STAND:
        return _categories_for_score(state, state.my_hand.total, threats, dealer, source)
    if action is Action.HIT:
        return _one_card_lookahead(state, shoe, threats, dealer, source)
    return _change_playout(state, shoe, threats, dealer, source)


def _one_card_lookahead(state, shoe, threats, dealer, source):
    total, count = state.my_hand.total, state.my_hand.count
    n = shoe.total
    if n == 0:
        raise InconsistentStateError("no cards left to hit with")
    win, ties, lose = ZERO, {}, ZERO
    for i, v in enumerate(POINT_VALUES):
        c = shoe.counts[i]
        if c == 0:
            continue
        p = Fraction(c, n)
        cls = classify_totals(total + v, count + 1)
        if cls is HandClass.EINZ:
            w, t, l = _categories_einz(state, threats, dealer, source)
        elif cls is HandClass.BUST:
            w, t, l = _categories_bust(state, source)
        else:
            w, t, l = _categories_for_score(state, total + v, threats, dealer, source)
        win += p * w
        lose += p * l
        for m, q in t.items():
            ties[m] = ties.get(m, ZERO) + p * q
    return win, ties, lose


def _change_playout(state, shoe, threats, dealer, source):
    policy = state.my_policy
    dist = outcome_distribution(shoe, policy, changes_used=1)
    win, ties, lose = ZERO, {}, ZERO
    for outcome, p in dist.mass.items():
        if outcome.kind is OutcomeKind.EINZ:
            w, t, l = _categories_einz(state, threats, dealer, source)
        elif outcome.kind is OutcomeKind.BUST:
            w, t, l = _categories_bust(state, source)
        else:
            w, t, l = _categories_for_score(state, outcome.score, threats, dealer, source)
        win += p * w
        lose += p * l
        for m, q in t.items():
            ties[m] = ties.get(m, ZERO) + p * q
    return win, ties, lose


def _conditioned_scenarios(state: ObservedState, source: str):
    """Exact mixture over stood opponents' hand compositions.

    Each stood opponent's possible hands (given his policy, card count,
    and min-card constraint) are enumerated from the progressively
    depleted shoe; every combination yields a scenario weight, a shoe for
    my draws, and point-mass threats at the opponents' realized scores.
    """
    base = state.shoe()
    scenarios: list[tuple[Fraction, Shoe, list[_Threat]]] = [(ONE, base, [])]
    for opp in state.opponents:
        if not opp.has_stood:
            scenarios = [
                (w, shoe, threats + [_opponent_threat(opp, state, source)])
                for w, shoe, threats in scenarios
            ]
            continue
        nxt = []
        for w, shoe, threats in scenarios:
            comps = stood_hand_compositions(
                shoe, opp.policy, opp.cards_taken, opp.min_card_value
            )
            for drawn, score, p in comps:
                reduced = Shoe(
                    tuple(c - d for c, d in zip(shoe.counts, drawn)), shoe.decks
                )
                threat = _threat_from_scores({score: ONE}, ZERO, ZERO)
                nxt.append((w * p, reduced, threats + [threat]))
        scenarios = nxt
    return scenarios


def recommend(evaluations: Sequence[ActionEvaluation]) -> Action:
    """Highest win; break ties by lower loss, then prefer standing."""
    if not evaluations:
        raise ValueError("nothing to recommend from")
    best = sorted(evaluations, key=lambda e: (-e.win, e.lose, _PREFERENCE[e.action]))[0]
    return best.action


def change_on_14_comparison(
    state: ObservedState, stand_on: int, *, mode: str = "exact"
) -> tuple[Fraction, Fraction]:
    """(continue, restart) probabilities of finishing at stand_on or better.

    Continue keeps the 14-hand and plays on; restart discards it (cards
    stay out of the shoe) and plays a fresh hand.  Modes for the continue
    leg: "exact" (without replacement), "hybrid" (sequential numerators
    over initial-size-power denominators), "infinite" (frozen ratios).
    The restart leg is exact except in infinite mode.
    """
    state.validate()
    if state.my_hand.total != 14:
        raise InconsistentStateError(
            f"change-on-14 comparison needs a total of 14, got {state.my_hand.total}"
        )
    shoe = state.shoe()
    cont = reach_probability(shoe, stand_on, hand=state.my_hand, mode=mode)
    restart_mode = "infinite" if mode == "infinite" else "exact"
    restart = reach_probability(shoe, stand_on, hand=Hand(), mode=restart_mode)
    return cont, restart


def standing_showdown(
    decks: int,
    my_cards: int,
    opponent_cards: int,
    policy: ThresholdPolicy = ThresholdPolicy(17),
    *,
    variant: DealerVariant | None = DealerVariant.V2,
    source: str = "exact",
) -> dict[str, Fraction]:
    """Both sides quietly stood with known card counts; who wins?

    Returns win/tie/lose from my side plus ``win_with_ties``, the V2
    convention where an equal score goes to the player.
    """
    if source == "reference":
        mine = reference_table(policy).conditional_given_stand(my_cards)
        theirs = reference_table(policy).conditional_given_stand(opponent_cards)
    else:
        dist = outcome_distribution(fresh_shoe(decks), policy)
        mine = conditional_score_given_stand(dist, my_cards)
        theirs = conditional_score_given_stand(dist, opponent_cards)
    res = standing_match([mine, theirs])
    out = {
        "win": res.win[0],
        "tie": res.tie,
        "lose": res.win[1],
        "win_with_ties": res.win[0] + res.tie,
    }
    return out


# ── JSON wire format ─────────────────────────────────────────────────────


def _require(payload: dict, key: str, kind, what: str):
    if key not in payload:
        raise StateParseError(f"missing field {key!r}")
    value = payload[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise StateParseError(f"field {key!r} must be {what}")
    return value


def parse_observed_state(payload: dict) -> tuple[ObservedState, dict]:
    """Build an ObservedState from its documented JSON form.

    Returns (state, options) where options carries ``source`` and
    ``opponent_model``.  Shape problems raise StateParseError; impossible
    states raise InconsistentStateError (from validate()).
    """
    if not isinstance(payload, dict):
        raise StateParseError("state must be a JSON object")
    known = {
        "query", "decks", "mode", "dealer_variant", "dealer_policy", "v3_rule",
        "change_on_14_allowed", "hand", "removed", "opponents", "source",
        "opponent_model", "my_policy", "request_id",
    }
    unknown = set(payload) - known
    if unknown:
        raise StateParseError(f"unknown fields: {sorted(unknown)}")

    decks = payload.get("decks", 1)
    if not isinstance(decks, int) or isinstance(decks, bool) or decks < 1:
        raise StateParseError("'decks' must be a positive integer")

    mode_text = payload.get("mode", "open")
    try:
        mode = GameMode(mode_text)
    except ValueError:
        raise StateParseError(f"'mode' must be 'open' or 'dealer', got {mode_text!r}") from None

    variant = None
    if mode is GameMode.DEALER:
        vtext = payload.get("dealer_variant", "V2")
        try:
            variant = DealerVariant(vtext)
        except ValueError:
            raise StateParseError(f"unknown dealer variant {vtext!r}") from None

    v3_rule = payload.get("v3_rule", "stand18")
    if v3_rule not in ("stand18", "chase"):
        raise StateParseError(f"'v3_rule' must be 'stand18' or 'chase', got {v3_rule!r}")

    hand_values = _require(payload, "hand", list, "a list of card values")
    try:
        hand = Hand(tuple(hand_values))
    except (TypeError, ValueError) as e:
        raise StateParseError(f"bad hand: {e}") from None

    removed_values = payload.get("removed", list(hand_values))
    if not isinstance(removed_values, list):
        raise StateParseError("'removed' must be a list of card values")

    opponents = []
    for i, entry in enumerate(payload.get("opponents", [])):
        if not isinstance(entry, dict):
            raise StateParseError(f"opponent #{i} must be an object")
        bad = set(entry) - {"policy", "has_stood", "cards_taken", "min_card_value"}
        if bad:
            raise StateParseError(f"opponent #{i}: unknown fields {sorted(bad)}")
        try:
            policy = parse_policy(_require(entry, "policy", str, "a policy literal"))
        except ValueError as e:
            raise StateParseError(f"opponent #{i}: {e}") from None
        has_stood = entry.get("has_stood", False)
        if not isinstance(has_stood, bool):
            raise StateParseError(f"opponent #{i}: 'has_stood' must be boolean")
        cards_taken = entry.get("cards_taken")
        if cards_taken is not None and (not isinstance(cards_taken, int) or isinstance(cards_taken, bool)):
            raise StateParseError(f"opponent #{i}: 'cards_taken' must be an integer")
        min_card = entry.get("min_card_value")
        if min_card is not None and not isinstance(min_card, int):
            raise StateParseError(f"opponent #{i}: 'min_card_value' must be an integer")
        try:
            opponents.append(OpponentInfo(policy, has_stood, cards_taken, min_card))
        except ValueError as e:
            raise InconsistentStateError(f"opponent #{i}: {e}") from None

    dealer_policy = ThresholdPolicy(17)
    if "dealer_policy" in payload:
        try:
            dealer_policy = parse_policy(_require(payload, "dealer_policy", str, "a policy literal"))
        except ValueError as e:
            raise StateParseError(str(e)) from None

    my_policy = ThresholdPolicy(17)
    if "my_policy" in payload:
        try:
            my_policy = parse_policy(_require(payload, "my_policy", str, "a policy literal"))
        except ValueError as e:
            raise StateParseError(str(e)) from None

    change = payload.get("change_on_14_allowed", False)
    if not isinstance(change, bool):
        raise StateParseError("'change_on_14_allowed' must be boolean")

    source = payload.get("source", "exact")
    if source not in ("exact", "reference"):
        raise StateParseError(f"'source' must be 'exact' or 'reference', got {source!r}")
    opponent_model = payload.get("opponent_model", "marginal")
    if opponent_model not in ("marginal", "conditioned"):
        raise StateParseError(f"'opponent_model' must be 'marginal' or 'conditioned'")

    rules = RuleSet(
        decks=decks,
        mode=mode,
        dealer_variant=variant,
        change_on_14_allowed=change,
        dealer_policy=dealer_policy,
        v3_rule=v3_rule,
    )
    try:
        state = ObservedState(
            my_hand=hand,
            removed=tuple(sorted(removed_values)),
            opponents=tuple(opponents),
            rules=rules,
            my_policy=my_policy,
        )
    except (TypeError, ValueError) as e:
        raise StateParseError(f"bad state: {e}") from None
    state.validate()
    return state, {"source": source, "opponent_model": opponent_model}
