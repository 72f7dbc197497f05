"""Bundled single-deck reference tables for the stand-17 and stand-18 policies.

These are the widely circulated published values for this game variant,
kept as data so that every derived table (match grids, conditional score
tables, expectations, dealer summaries) can be regenerated from them with
this package's combination machinery.

They are NOT what exact enumeration yields: the deep rows (3+ cards) of
the published tables deviate from the true without-replacement law by up
to 0.028 per cell (see README, "Accuracy notes").  The engine's exact
values are the default everywhere; pass source="reference" to reproduce
the published derivations instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .policy import ThresholdPolicy


def _f(x: str) -> Fraction:
    return Fraction(x)


@dataclass(frozen=True)
class ReferenceStandTable:
    """Published 1-deck outcome table for one threshold policy.

    ``cells[cards][score]`` covers cards 2..5; ``tail_bounds`` are the
    printed upper bounds for hands of more than five cards; ``any_row``
    and ``bust`` are the printed aggregates (the any-row is not exactly
    the column sum of the printed cells; both are kept as printed).
    Scores use the integer 21 for the einz column.
    """

    stand_on: int
    cells: dict[int, dict[int, Fraction]]
    tail_bounds: dict[int, Fraction]
    any_row: dict[int, Fraction]
    bust: Fraction

    EINZ = 21

    @property
    def scores(self) -> list[int]:
        return sorted(self.any_row)

    def stood_marginals(self) -> dict[int, Fraction]:
        """Any-cards mass per stood score (einz excluded)."""
        return {s: p for s, p in self.any_row.items() if s != self.EINZ}

    def einz_mass(self) -> Fraction:
        return self.any_row[self.EINZ]

    def conditional_given_stand(self, cards: int | None) -> dict[int, Fraction]:
        """Score law given a quiet stand, renormalized from the table cells.

        cards=None conditions on standing at any count (from the any-row).
        """
        if cards is None:
            masses = self.stood_marginals()
        elif cards in self.cells:
            masses = {s: p for s, p in self.cells[cards].items() if s != self.EINZ}
        else:
            raise ValueError(f"reference table has no row for cards={cards}")
        total = sum(masses.values())
        return {s: p / total for s, p in masses.items()}


STAND17_TABLE = ReferenceStandTable(
    stand_on=17,
    cells={
        2: {17: _f("0.036"), 18: _f("0.027"), 19: _f("0.024"), 20: _f("0.016"), 21: _f("0.016")},
        3: {17: _f("0.074"), 18: _f("0.067"), 19: _f("0.051"), 20: _f("0.035"), 21: _f("0.038")},
        4: {17: _f("0.040"), 18: _f("0.042"), 19: _f("0.056"), 20: _f("0.036"), 21: _f("0.027")},
        5: {17: _f("0.010"), 18: _f("0.009"), 19: _f("0.013"), 20: _f("0.012"), 21: _f("0.008")},
    },
    tail_bounds={17: _f("0.001"), 18: _f("0.001"), 19: _f("0.002"), 20: _f("0.002"), 21: _f("0.002")},
    any_row={17: _f("0.161"), 18: _f("0.147"), 19: _f("0.145"), 20: _f("0.100"), 21: _f("0.092")},
    bust=_f("0.355"),
)

STAND18_TABLE = ReferenceStandTable(
    stand_on=18,
    cells={
        2: {18: _f("0.027"), 19: _f("0.024"), 20: _f("0.016"), 21: _f("0.016")},
        3: {18: _f("0.067"), 19: _f("0.056"), 20: _f("0.040"), 21: _f("0.044")},
        4: {18: _f("0.042"), 19: _f("0.066"), 20: _f("0.046"), 21: _f("0.038")},
        5: {18: _f("0.009"), 19: _f("0.018"), 20: _f("0.017"), 21: _f("0.014")},
    },
    tail_bounds={18: _f("0.001"), 19: _f("0.003"), 20: _f("0.003"), 21: _f("0.003")},
    any_row={18: _f("0.147"), 19: _f("0.167"), 20: _f("0.122"), 21: _f("0.114")},
    bust=_f("0.450"),
)

TABLES: dict[int, ReferenceStandTable] = {17: STAND17_TABLE, 18: STAND18_TABLE}


def reference_table(policy: ThresholdPolicy | int) -> ReferenceStandTable:
    stand_on = policy if isinstance(policy, int) else policy.stand_on
    if isinstance(policy, ThresholdPolicy) and policy.change_on_14:
        raise ValueError("reference tables exist only for plain threshold policies")
    try:
        return TABLES[stand_on]
    except KeyError:
        raise ValueError(
            f"no reference table for stand-on-{stand_on}; only 17 and 18 are published"
        ) from None
