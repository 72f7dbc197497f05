from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from einz.cards import (
    PER_DECK,
    POINT_VALUES,
    Hand,
    HandClass,
    Shoe,
    classify,
    classify_totals,
    fresh_shoe,
)


class TestFreshShoe:
    def test_single_deck_counts(self):
        shoe = fresh_shoe(1)
        assert shoe.as_dict() == {2: 8, 3: 8, 4: 8, 5: 4, 6: 4, 7: 4, 8: 4, 9: 4, 10: 4, 11: 4}
        assert shoe.total == 52

    def test_eight_decks_scale(self):
        shoe = fresh_shoe(8)
        assert shoe.as_dict() == {v: 8 * m for v, m in PER_DECK.items()}
        assert shoe.total == 416

    def test_ace_draw_chance_is_multiplicity_ratio(self):
        shoe = fresh_shoe(1)
        assert shoe.count_of(11) == 4 and shoe.total == 52

    def test_zero_decks_rejected(self):
        with pytest.raises(ValueError):
            fresh_shoe(0)

    @given(st.integers(min_value=1, max_value=20))
    def test_total_is_52_per_deck(self, decks):
        assert fresh_shoe(decks).total == 52 * decks


class TestShoe:
    def test_remove_ten_then_four(self):
        shoe = fresh_shoe(1).remove(10).remove(4)
        assert shoe.total == 50
        assert shoe.count_of(10) == 3
        assert shoe.count_of(4) == 7

    def test_remove_then_add_is_identity(self):
        shoe = fresh_shoe(1)
        assert shoe.remove(7).add(7) == shoe

    def test_fifth_ace_removal_fails(self):
        shoe = fresh_shoe(1)
        for _ in range(4):
            shoe = shoe.remove(11)
        with pytest.raises(ValueError):
            shoe.remove(11)

    def test_add_beyond_capacity_fails(self):
        with pytest.raises(ValueError):
            fresh_shoe(1).add(5)

    def test_remove_unknown_value(self):
        with pytest.raises(ValueError):
            fresh_shoe(1).remove(12)

    @given(st.lists(st.sampled_from(POINT_VALUES), max_size=4))
    def test_remove_all_then_add_all(self, values):
        shoe = fresh_shoe(2)
        depleted = shoe.remove_all(values)
        for v in values:
            depleted = depleted.add(v)
        assert depleted == shoe

    @given(st.sampled_from(POINT_VALUES), st.sampled_from(POINT_VALUES))
    def test_removal_weakly_lowers_that_values_draw_chance(self, removed, drawn):
        from fractions import Fraction

        shoe = fresh_shoe(1)
        before = Fraction(shoe.count_of(drawn), shoe.total)
        after_shoe = shoe.remove(removed)
        after = Fraction(after_shoe.count_of(drawn), after_shoe.total)
        if removed == drawn:
            assert after <= before
        else:
            assert after >= before


class TestClassify:
    def test_ace_ten_is_einz(self):
        assert classify(Hand((11, 10))) is HandClass.EINZ

    def test_two_aces_is_einz(self):
        assert classify(Hand((11, 11))) is HandClass.EINZ

    def test_22_with_three_cards_is_bust(self):
        assert classify(Hand((11, 11, 2))) is HandClass.BUST

    def test_ten_four_is_live(self):
        assert classify(Hand((10, 4))) is HandClass.LIVE

    def test_multicard_21_is_einz(self):
        assert classify(Hand((7, 7, 7))) is HandClass.EINZ

    def test_empty_hand_rejected(self):
        with pytest.raises(ValueError):
            classify(Hand(()))

    @given(st.integers(2, 40), st.integers(1, 15))
    def test_depends_only_on_total_and_count(self, total, count):
        c = classify_totals(total, count)
        if total == 21 or (total == 22 and count == 2):
            assert c is HandClass.EINZ
        elif total > 21:
            assert c is HandClass.BUST
        else:
            assert c is HandClass.LIVE

    @given(st.lists(st.sampled_from(POINT_VALUES), min_size=11, max_size=13))
    def test_eleven_cards_never_live(self, values):
        # 11 cards total at least 22, and the two-ace case needs count 2
        assert classify(Hand(tuple(values))) is not HandClass.LIVE
