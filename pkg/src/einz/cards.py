"""Card values, shoe state, hands, and the einz/bust classification.

Einz merges ranks into point-value classes: king/queen/jack count as
4/3/2 points, an ace counts 11, and number cards count face value.  That
leaves ten distinct values, three of which (2, 3, 4) occur eight times
per deck because a number rank and a face rank share them.

Everything here is an immutable value; all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

#: The ten point-value classes, low to high.
POINT_VALUES: tuple[int, ...] = (2, 3, 4, 5, 6, 7, 8, 9, 10, 11)

#: Copies of each value in a single 52-card deck.  2/3/4 each merge a
#: number rank with a face rank (2+J, 3+Q, 4+K), hence multiplicity 8.
PER_DECK: dict[int, int] = {2: 8, 3: 8, 4: 8, 5: 4, 6: 4, 7: 4, 8: 4, 9: 4, 10: 4, 11: 4}

#: Rank spellings per value, used for UI hints and table captions.
VALUE_LABELS: dict[int, str] = {
    2: "2 / J",
    3: "3 / Q",
    4: "4 / K",
    5: "5",
    6: "6",
    7: "7",
    8: "8",
    9: "9",
    10: "10",
    11: "A",
}

assert sum(PER_DECK.values()) == 52

_INDEX = {v: i for i, v in enumerate(POINT_VALUES)}


class HandClass(Enum):
    """Terminal status of a hand."""

    LIVE = "live"
    EINZ = "einz"
    BUST = "bust"


def check_value(v: int) -> int:
    """Validate a point value, returning it unchanged."""
    if v not in PER_DECK:
        raise ValueError(f"not a point value: {v!r} (expected one of {POINT_VALUES})")
    return v


@dataclass(frozen=True)
class Shoe:
    """Remaining undealt cards, as a count per point-value class.

    ``counts[i]`` is the number of remaining cards worth ``POINT_VALUES[i]``.
    ``decks`` records the capacity so that returning a card can be
    validated against per-deck multiplicities.
    """

    counts: tuple[int, ...]
    decks: int = 1

    def __post_init__(self) -> None:
        if self.decks < 1:
            raise ValueError("decks must be >= 1")
        if len(self.counts) != len(POINT_VALUES):
            raise ValueError("counts must have one entry per point value")
        for v, c in zip(POINT_VALUES, self.counts):
            if c < 0:
                raise ValueError(f"negative count for value {v}")
            if c > self.decks * PER_DECK[v]:
                raise ValueError(
                    f"count {c} for value {v} exceeds {self.decks} deck(s) "
                    f"(max {self.decks * PER_DECK[v]})"
                )

    @property
    def total(self) -> int:
        """Number of cards left in the shoe."""
        return sum(self.counts)

    def count_of(self, v: int) -> int:
        return self.counts[_INDEX[check_value(v)]]

    def remove(self, v: int) -> "Shoe":
        """Return the shoe with one card of value ``v`` taken out.

        Removing from an empty value class raises: it means the observed
        state claims more copies of a card than the shoe ever held.
        """
        i = _INDEX[check_value(v)]
        if self.counts[i] == 0:
            raise ValueError(f"no cards of value {v} left to remove")
        counts = list(self.counts)
        counts[i] -= 1
        return Shoe(tuple(counts), self.decks)

    def remove_all(self, values) -> "Shoe":
        """Remove one card per element of ``values`` (inverse of dealing them)."""
        shoe = self
        for v in values:
            shoe = shoe.remove(v)
        return shoe

    def add(self, v: int) -> "Shoe":
        """Return the shoe with one card of value ``v`` put back (inverse of remove)."""
        i = _INDEX[check_value(v)]
        counts = list(self.counts)
        counts[i] += 1
        return Shoe(tuple(counts), self.decks)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(POINT_VALUES, self.counts))


def fresh_shoe(decks: int = 1) -> Shoe:
    """A full shoe of ``decks`` 52-card decks (52 x decks cards)."""
    if decks < 1:
        raise ValueError("decks must be >= 1")
    return Shoe(tuple(decks * PER_DECK[v] for v in POINT_VALUES), decks)


@dataclass(frozen=True)
class Hand:
    """Cards drawn so far, in draw order."""

    values: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for v in self.values:
            check_value(v)

    @property
    def total(self) -> int:
        return sum(self.values)

    @property
    def count(self) -> int:
        return len(self.values)

    def take(self, v: int) -> "Hand":
        return Hand(self.values + (check_value(v),))


def classify_totals(total: int, count: int) -> HandClass:
    """Classification from (total, count) alone.

    A total of exactly 21 is an einz at any card count; a total of 22 is
    an einz only with exactly two cards (necessarily two aces).  Anything
    else above 21 is a bust.
    """
    if total == 21:
        return HandClass.EINZ
    if total == 22 and count == 2:
        return HandClass.EINZ
    if total > 21:
        return HandClass.BUST
    return HandClass.LIVE


def classify(hand: Hand) -> HandClass:
    """Classify a non-empty hand as live, einz, or bust."""
    if hand.count == 0:
        raise ValueError("cannot classify an empty hand")
    return classify_totals(hand.total, hand.count)
