from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from einz.cards import Hand, Shoe, fresh_shoe
from einz.exact import (
    OutcomeKind,
    ShoeTooSmallError,
    conditional_score_given_stand,
    expected_score,
    outcome_distribution,
    reach_probability,
    round_half_up,
    stood_hand_compositions,
)
from einz.policy import ThresholdPolicy

from conftest import random_small_shoe
from oracles import brute_force_outcomes

STAND17 = ThresholdPolicy(17)
STAND18 = ThresholdPolicy(18)


class TestHandComputedValues:
    """Frozen expectations derived by direct pair/path combinatorics."""

    def test_two_card_terminals_single_deck(self):
        d = outcome_distribution(fresh_shoe(1), STAND17)
        # ordered-pair counts over 52*51: einz (11,10)x2 + (11,11); 17 from
        # (6,11),(7,10),(8,9); 18 adds the (9,9) pair; etc.
        assert d.p_einz(2) == Fraction(44, 2652)
        assert d.p_stood(17, 2) == Fraction(96, 2652)
        assert d.p_stood(18, 2) == Fraction(76, 2652)
        assert d.p_stood(19, 2) == Fraction(64, 2652)
        assert d.p_stood(20, 2) == Fraction(44, 2652)
        assert d.p_bust(2) == 0  # two cards cannot bust (22 = two aces = einz)

    def test_three_card_cells_single_deck(self):
        # sum over live pairs t of P(pair) * remaining(21-t)/50, etc.
        d = outcome_distribution(fresh_shoe(1), STAND17)
        assert d.p_einz(3) == Fraction(5384, 132600)
        assert d.p_stood(20, 3) == Fraction(6544, 132600)
        assert d.p_stood(19, 3) == Fraction(7920, 132600)

    def test_expected_score_two_cards(self):
        d = outcome_distribution(fresh_shoe(1), STAND17)
        # (17*96 + 18*76 + 19*64 + 20*44) / 280
        assert expected_score(d, cards=2) == Fraction(5096, 280)

    def test_point_mass_expectation(self):
        from einz.exact import OutcomeDistribution, stood

        d = OutcomeDistribution({stood(20, 2): Fraction(1)})
        assert expected_score(d, cards=2) == 20

    def test_reach_probability_from_ten_four(self):
        shoe = fresh_shoe(1).remove(10).remove(4)
        hand = Hand((10, 4))
        assert reach_probability(shoe, 17, hand=hand) == Fraction(1531, 2450)
        assert reach_probability(shoe, 18, hand=hand) == Fraction(263, 490)
        assert reach_probability(shoe, 17, hand=hand, mode="hybrid") == Fraction(1558, 2500)
        assert reach_probability(shoe, 18, hand=hand, mode="hybrid") == Fraction(1334, 2500)

    def test_reach_probability_infinite_closed_form(self):
        # frozen at the 50-card shoe's ratios: one card 3..7 = 27/50;
        # two cards: a 2 (8/50) then any of 2..5 (27/50).
        shoe = fresh_shoe(1).remove(10).remove(4)
        hand = Hand((10, 4))
        closed = Fraction(27, 50) + Fraction(8, 50) * Fraction(27, 50)
        assert reach_probability(shoe, 17, hand=hand, mode="infinite") == closed


class TestOracleEquivalence:
    def test_full_single_deck_matches_brute_force(self):
        engine = outcome_distribution(fresh_shoe(1), STAND17).mass
        oracle = brute_force_outcomes(fresh_shoe(1).counts, STAND17)
        assert engine == oracle

    def test_change_on_14_matches_brute_force(self):
        policy = ThresholdPolicy(17, change_on_14=True)
        shoe = Shoe((3, 2, 2, 1, 1, 1, 2, 1, 2, 2))
        engine = outcome_distribution(shoe, policy, allow_exhaustion=True).mass
        oracle = brute_force_outcomes(shoe.counts, policy)
        assert engine == oracle

    def test_change_on_14_count_discarded_matches(self):
        policy = ThresholdPolicy(17, change_on_14=True)
        shoe = Shoe((3, 2, 2, 1, 1, 1, 2, 1, 2, 2))
        engine = outcome_distribution(
            shoe, policy, allow_exhaustion=True, count_discarded=True
        ).mass
        oracle = brute_force_outcomes(shoe.counts, policy, count_discarded=True)
        assert engine == oracle

    def test_random_small_shoes(self, rng):
        for _ in range(60):
            shoe = random_small_shoe(rng)
            stand_on = rng.randint(12, 21)
            policy = ThresholdPolicy(stand_on)
            engine = outcome_distribution(shoe, policy, allow_exhaustion=True).mass
            oracle = brute_force_outcomes(shoe.counts, policy)
            assert engine == oracle, (shoe.counts, stand_on)


class TestInvariants:
    @given(
        counts=st.lists(st.integers(0, 6), min_size=10, max_size=10),
        stand_on=st.integers(12, 21),
    )
    @settings(max_examples=150, deadline=None)
    def test_normalization(self, counts, stand_on):
        shoe = Shoe(tuple(counts), decks=2)
        d = outcome_distribution(shoe, ThresholdPolicy(stand_on), allow_exhaustion=True)
        assert d.total_mass() == 1
        assert all(p >= 0 for _, p in d)

    @given(counts=st.lists(st.integers(1, 8), min_size=10, max_size=10))
    @settings(max_examples=60, deadline=None)
    def test_bust_monotone_in_threshold(self, counts):
        shoe = Shoe(tuple(min(c, 8 if i < 3 else 4) for i, c in enumerate(counts)))
        b17 = outcome_distribution(shoe, STAND17, allow_exhaustion=True).p_bust()
        b18 = outcome_distribution(shoe, STAND18, allow_exhaustion=True).p_bust()
        assert b18 >= b17

    def test_rejects_small_shoe_by_default(self):
        with pytest.raises(ShoeTooSmallError):
            outcome_distribution(Shoe((1, 1, 1, 1, 0, 0, 0, 0, 0, 0)), STAND17)

    def test_stood_scores_bounded_by_policy(self):
        for stand_on in (12, 15, 17, 18, 20):
            d = outcome_distribution(fresh_shoe(1), ThresholdPolicy(stand_on))
            for o, p in d:
                if o.kind is OutcomeKind.STOOD and p:
                    assert stand_on <= o.score <= 20

    def test_change_on_14_moves_mass_off_14_paths(self):
        plain = outcome_distribution(fresh_shoe(1), STAND17)
        changing = outcome_distribution(fresh_shoe(1), ThresholdPolicy(17, change_on_14=True))
        assert plain.total_mass() == changing.total_mass() == 1
        assert plain.mass != changing.mass


class TestConditionals:
    def test_conditional_excludes_einz_and_bust(self):
        d = outcome_distribution(fresh_shoe(1), STAND17)
        cond = conditional_score_given_stand(d, 2)
        assert set(cond) == {17, 18, 19, 20}
        assert sum(cond.values()) == 1
        assert cond[17] == Fraction(96, 280)

    def test_rows_sum_to_one_every_card_count(self):
        d = outcome_distribution(fresh_shoe(1), STAND18)
        for k in (2, 3, 4, 5):
            assert sum(conditional_score_given_stand(d, k).values()) == 1

    def test_zero_mass_raises(self):
        d = outcome_distribution(fresh_shoe(1), STAND17)
        with pytest.raises(ValueError):
            conditional_score_given_stand(d, 40)
        with pytest.raises(ValueError):
            expected_score(d, cards=40)

    def test_point_mass_conditional(self):
        from einz.exact import OutcomeDistribution, einz, stood

        d = OutcomeDistribution({stood(19, 3): Fraction(1, 2), einz(2): Fraction(1, 2)})
        assert conditional_score_given_stand(d, None) == {19: Fraction(1)}

    def test_expected_score_monotone_in_cards(self):
        for policy in (STAND17, STAND18):
            d = outcome_distribution(fresh_shoe(1), policy)
            for include in (False, True):
                values = [expected_score(d, k, include_einz=include) for k in (2, 3, 4, 5)]
                assert values == sorted(values)

    def test_stood_hand_compositions_constraint(self):
        comps = stood_hand_compositions(fresh_shoe(1), STAND17, 2, min_card_value=5)
        # every stood 2-card hand at 17..20 already has both cards above 5
        unconstrained = stood_hand_compositions(fresh_shoe(1), STAND17, 2)
        assert comps == unconstrained
        assert sum(p for _, _, p in comps) == 1


class TestRounding:
    @pytest.mark.parametrize(
        "value,expect",
        [
            (Fraction(1, 8), Fraction(125, 1000)),
            (Fraction(15, 10000), Fraction(2, 1000)),   # 0.0015 -> 0.002 (half-up)
            (Fraction(25, 10000), Fraction(3, 1000)),
            (Fraction(-15, 10000), Fraction(-2, 1000)),
            (0.5, Fraction(500, 1000)),
        ],
    )
    def test_round_half_up(self, value, expect):
        assert round_half_up(value, 3) == expect
