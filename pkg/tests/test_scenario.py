from __future__ import annotations

from fractions import Fraction

import pytest

from einz.cards import Hand
from einz.matchup import DealerVariant
from einz.policy import Action, ThresholdPolicy
from einz.scenario import (
    GameMode,
    InconsistentStateError,
    ObservedState,
    OpponentInfo,
    RuleSet,
    StateParseError,
    change_on_14_comparison,
    evaluate_actions,
    parse_observed_state,
    recommend,
    standing_showdown,
)

STAND17 = ThresholdPolicy(17)
STAND18 = ThresholdPolicy(18)


def open_state(hand, opponents=(), decks=8, **kw):
    values = tuple(hand)
    return ObservedState(
        my_hand=Hand(values),
        removed=tuple(sorted(values)),
        opponents=tuple(opponents),
        rules=RuleSet(decks=decks, **kw),
    )


class TestEvaluateActions:
    def test_probabilities_sum_to_one(self):
        st = open_state((10, 6), [OpponentInfo(STAND18)])
        for e in evaluate_actions(st):
            assert e.win + e.tie + e.lose == 1

    def test_stand_and_hit_always_legal_change_needs_14(self):
        st = open_state((10, 6), [OpponentInfo(STAND17)], change_on_14_allowed=True)
        assert [e.action for e in evaluate_actions(st)] == [Action.STAND, Action.HIT]
        st14 = open_state((10, 4), [OpponentInfo(STAND17)], change_on_14_allowed=True)
        assert [e.action for e in evaluate_actions(st14)] == [
            Action.STAND, Action.HIT, Action.CHANGE14,
        ]

    def test_zero_opponents_stand_wins_vacuously(self):
        st = open_state((10, 6))
        stand = next(e for e in evaluate_actions(st) if e.action is Action.STAND)
        assert stand.win == 1

    def test_opponent_permutation_invariance(self):
        a = OpponentInfo(STAND17, True, 2)
        b = OpponentInfo(STAND18)
        e1 = evaluate_actions(open_state((9, 9), [a, b]))
        e2 = evaluate_actions(open_state((9, 9), [b, a]))
        for x, y in zip(e1, e2):
            assert (x.win, x.tie, x.lose) == (y.win, y.tie, y.lose)

    def test_low_total_hand_evaluates(self):
        """Standing on a tiny total is legal; sure loss against standers."""
        st = open_state((2, 3, 4), [OpponentInfo(STAND18)])
        evals = evaluate_actions(st, source="reference")
        stand = next(e for e in evals if e.action is Action.STAND)
        assert stand.win == Fraction(9, 20)  # only an opponent bust saves it
        for e in evals:
            assert e.win + e.tie + e.lose == 1

    def test_terminal_hand_rejected(self):
        with pytest.raises(InconsistentStateError):
            evaluate_actions(open_state((10, 11)))
        with pytest.raises(InconsistentStateError):
            evaluate_actions(open_state((10, 9, 8)))

    def test_single_card_rejected(self):
        with pytest.raises(InconsistentStateError):
            evaluate_actions(open_state((10,)))

    def test_removed_must_cover_hand(self):
        st = ObservedState(my_hand=Hand((10, 6)), removed=(10,), rules=RuleSet(decks=1))
        with pytest.raises(InconsistentStateError):
            evaluate_actions(st)

    def test_removed_beyond_capacity(self):
        st = ObservedState(
            my_hand=Hand((11, 11)), removed=(11,) * 5, rules=RuleSet(decks=1)
        )
        with pytest.raises(InconsistentStateError):
            st.validate()

    def test_conditioned_mode_accounts_for_high_cards_out(self):
        """Two stood opponents hold 4 high cards, thinning my bust cards."""
        opp = OpponentInfo(STAND17, True, 2, min_card_value=5)
        st = open_state((9, 9), [opp, opp], decks=8)
        marginal = evaluate_actions(st, source="exact", opponent_model="marginal")
        conditioned = evaluate_actions(st, source="exact", opponent_model="conditioned")
        hit_m = next(e for e in marginal if e.action is Action.HIT)
        hit_c = next(e for e in conditioned if e.action is Action.HIT)
        assert hit_m.win != hit_c.win  # the conditioning moved something
        assert hit_c.win + hit_c.tie + hit_c.lose == 1


class TestSituations:
    """Published situation answers, reference source (see fixtures/)."""

    def test_situation2_vs_stand18(self):
        st = open_state((10, 6), [OpponentInfo(STAND18)], decks=8)
        evals = evaluate_actions(st, source="reference")
        stand = next(e for e in evals if e.action is Action.STAND)
        hit = next(e for e in evals if e.action is Action.HIT)
        assert float(stand.win) == pytest.approx(0.45, abs=0.005)
        assert float(stand.lose) == pytest.approx(0.55, abs=0.005)
        assert float(hit.win) == pytest.approx(0.357, abs=0.005)
        assert float(hit.tie) == pytest.approx(0.067, abs=0.005)
        assert float(hit.lose) == pytest.approx(0.576, abs=0.005)
        assert recommend(evals) is Action.STAND

    def test_situation2_vs_stand17(self):
        st = open_state((10, 6), [OpponentInfo(STAND17)], decks=8)
        evals = evaluate_actions(st, source="reference")
        stand = next(e for e in evals if e.action is Action.STAND)
        hit = next(e for e in evals if e.action is Action.HIT)
        assert float(stand.win) == pytest.approx(0.355, abs=0.005)
        assert float(hit.win) == pytest.approx(0.385, abs=0.005)
        assert float(hit.tie) == pytest.approx(0.061, abs=0.005)
        assert recommend(evals) is Action.HIT

    def test_situation3_both_variants_stand(self):
        for variant, stand_p, hit_p in (
            (DealerVariant.V2, 0.516, 0.437),
            (DealerVariant.V3, 0.45, 0.427),
        ):
            st = ObservedState(
                my_hand=Hand((9, 8)), removed=(8, 9),
                rules=RuleSet(decks=1, mode=GameMode.DEALER, dealer_variant=variant),
            )
            evals = evaluate_actions(st, source="reference")
            stand = next(e for e in evals if e.action is Action.STAND)
            hit = next(e for e in evals if e.action is Action.HIT)
            assert float(stand.win) == pytest.approx(stand_p, abs=0.005)
            assert float(hit.win) == pytest.approx(hit_p, abs=0.005)
            assert recommend(evals) is Action.STAND

    def test_situation1_hit_beats_stand(self):
        opp = OpponentInfo(STAND17, True, 2, min_card_value=5)
        st = open_state((9, 9), [opp, opp], decks=8)
        evals = evaluate_actions(st, source="reference")
        stand = next(e for e in evals if e.action is Action.STAND)
        hit = next(e for e in evals if e.action is Action.HIT)
        assert hit.win > stand.win
        assert recommend(evals) is Action.HIT
        assert float(stand.win) == pytest.approx(0.123, abs=0.005)
        assert float(stand.tie_breakdown[3]) == pytest.approx(0.069, abs=0.005)


class TestRecommend:
    def test_tie_break_prefers_stand(self):
        from einz.scenario import ActionEvaluation

        a = ActionEvaluation(Action.HIT, Fraction(1, 2), {}, Fraction(1, 2))
        b = ActionEvaluation(Action.STAND, Fraction(1, 2), {}, Fraction(1, 2))
        assert recommend([a, b]) is Action.STAND

    def test_lower_loss_breaks_win_ties(self):
        from einz.scenario import ActionEvaluation

        a = ActionEvaluation(Action.STAND, Fraction(1, 2), {2: Fraction(1, 4)}, Fraction(1, 4))
        b = ActionEvaluation(Action.HIT, Fraction(1, 2), {}, Fraction(1, 2))
        assert recommend([a, b]) is Action.STAND
        b2 = ActionEvaluation(Action.HIT, Fraction(1, 2), {2: Fraction(3, 8)}, Fraction(1, 8))
        assert recommend([a, b2]) is Action.HIT

    def test_single_action(self):
        from einz.scenario import ActionEvaluation

        only = ActionEvaluation(Action.HIT, Fraction(1), {}, Fraction(0))
        assert recommend([only]) is Action.HIT

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            recommend([])


class TestChangeOn14:
    def make_state(self):
        return ObservedState(
            my_hand=Hand((10, 4)), removed=(4, 10),
            rules=RuleSet(decks=1, change_on_14_allowed=True),
        )

    def test_exact_values(self):
        cont, restart = change_on_14_comparison(self.make_state(), 17)
        assert cont == Fraction(1531, 2450)
        assert restart > cont

    def test_hybrid_values(self):
        cont, restart = change_on_14_comparison(self.make_state(), 17, mode="hybrid")
        assert cont == Fraction(1558, 2500)
        assert restart > cont

    def test_stand18(self):
        for mode, expected in (("exact", Fraction(263, 490)), ("hybrid", Fraction(1334, 2500))):
            cont, restart = change_on_14_comparison(self.make_state(), 18, mode=mode)
            assert cont == expected
            assert restart >= cont

    def test_requires_total_14(self):
        st = ObservedState(my_hand=Hand((10, 6)), removed=(6, 10), rules=RuleSet(decks=1))
        with pytest.raises(InconsistentStateError):
            change_on_14_comparison(st, 17)


class TestStandingShowdown:
    def test_reference_matches_published(self):
        res = standing_showdown(1, 2, 3, source="reference")
        assert float(res["win_with_ties"]) == pytest.approx(0.629, abs=0.003)

    def test_exact_is_a_distribution(self):
        res = standing_showdown(1, 2, 3)
        assert res["win"] + res["tie"] + res["lose"] == 1


class TestParsing:
    def base(self):
        return {
            "decks": 8,
            "mode": "open",
            "hand": [10, 6],
            "opponents": [{"policy": "stand18", "has_stood": False}],
            "source": "reference",
        }

    def test_round_trip(self):
        state, options = parse_observed_state(self.base())
        assert state.rules.decks == 8
        assert options == {"source": "reference", "opponent_model": "marginal"}

    def test_missing_hand(self):
        payload = self.base()
        del payload["hand"]
        with pytest.raises(StateParseError):
            parse_observed_state(payload)

    def test_unknown_field(self):
        payload = self.base()
        payload["bogus"] = 1
        with pytest.raises(StateParseError):
            parse_observed_state(payload)

    def test_bad_policy_literal(self):
        payload = self.base()
        payload["opponents"][0]["policy"] = "stand99"
        with pytest.raises(StateParseError):
            parse_observed_state(payload)

    def test_semantic_error_is_not_parse_error(self):
        payload = self.base()
        payload["hand"] = [11, 11]
        state, _ = parse_observed_state(payload)  # parses fine
        with pytest.raises(InconsistentStateError):
            evaluate_actions(state)

    def test_underflow_is_inconsistent(self):
        payload = self.base()
        payload["decks"] = 1
        payload["hand"] = [11, 11]
        payload["removed"] = [11, 11, 11, 11, 11]
        with pytest.raises(InconsistentStateError):
            parse_observed_state(payload)

    def test_stood_opponent_needs_cards(self):
        payload = self.base()
        payload["opponents"][0]["has_stood"] = True
        with pytest.raises(InconsistentStateError):
            parse_observed_state(payload)
