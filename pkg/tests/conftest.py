from __future__ import annotations

import random

import pytest

from einz.cards import POINT_VALUES, Shoe


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xE1A2)


def random_small_shoe(rand: random.Random, max_cards: int = 8) -> Shoe:
    """A shoe with 1..max_cards cards spread over random value classes."""
    n = rand.randint(1, max_cards)
    counts = [0] * len(POINT_VALUES)
    for _ in range(n):
        counts[rand.randrange(len(POINT_VALUES))] += 1
    return Shoe(tuple(counts))
