"""Builders for the six standard tables, from either probability source.

source="exact" computes everything by enumeration; source="reference"
derives tables 3-6 from the bundled published single-deck stand tables
(and echoes those tables themselves for ids 1-2), reproducing the
published derivation chain: conditional tables renormalize the 3-decimal
cells, match grids combine the any-row marginals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from .cards import fresh_shoe
from .exact import (
    conditional_score_given_stand,
    expected_score,
    outcome_distribution,
)
from .matchup import (
    DealerRules,
    DealerVariant,
    dealer_match,
    open_match,
    policy_summary,
    standing_match,
)
from .policy import ThresholdPolicy
from .reference import reference_table

EINZ_COL = "einz"
SOURCES = ("exact", "reference")


@dataclass
class TableData:
    id: int
    title: str
    columns: list[str]
    rows: list[str]
    values: list[list[Fraction | None]]
    source: str
    decks: int
    notes: list[str] = field(default_factory=list)

    def cell(self, row: str, column: str) -> Fraction | None:
        return self.values[self.rows.index(row)][self.columns.index(column)]


def _check(source: str, decks: int, table_id: int) -> None:
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}")
    if source == "reference" and decks != 1:
        raise ValueError("reference tables are single-deck; use --decks 1 or source=exact")
    if table_id not in range(1, 7):
        raise ValueError(f"unknown table id {table_id}")


def _stand_table(stand_on: int, decks: int, source: str) -> TableData:
    table_id = 1 if stand_on == 17 else 2
    scores = list(range(stand_on, 21))
    columns = [str(s) for s in scores] + [EINZ_COL]
    rows = ["2", "3", "4", "5", ">5", "any"]
    notes = []
    if source == "reference":
        ref = reference_table(stand_on)
        values = []
        for k in (2, 3, 4, 5):
            values.append([ref.cells[k].get(s) for s in scores] + [ref.cells[k][21]])
        values.append([ref.tail_bounds[s] for s in scores] + [ref.tail_bounds[21]])
        values.append([ref.any_row[s] for s in scores] + [ref.any_row[21]])
        notes.append("the >5 row holds published upper bounds, not masses")
        notes.append(f"bust={float(ref.bust)}")
    else:
        dist = outcome_distribution(fresh_shoe(decks), ThresholdPolicy(stand_on))
        values = []
        for k in (2, 3, 4, 5):
            values.append([dist.p_stood(s, k) for s in scores] + [dist.p_einz(k)])
        tail = [
            sum((dist.p_stood(s, k) for k in range(6, dist.max_cards() + 1)), Fraction(0))
            for s in scores
        ] + [sum((dist.p_einz(k) for k in range(6, dist.max_cards() + 1)), Fraction(0))]
        values.append(tail)
        values.append([dist.p_stood(s) for s in scores] + [dist.p_einz()])
        notes.append(f"bust={float(dist.p_bust())}")
    return TableData(table_id, f"stand-{stand_on} outcome probabilities by card count",
                     columns, rows, values, source, decks, notes)


def _policies_for_grid() -> list[tuple[ThresholdPolicy, ThresholdPolicy]]:
    p17, p18 = ThresholdPolicy(17), ThresholdPolicy(18)
    return [(p17, p17), (p17, p18), (p18, p17), (p18, p18)]


def _match_grid(decks: int, source: str) -> TableData:
    columns = ["17 vs 17", "17 vs 18", "18 vs 17", "18 vs 18"]
    rows = ["player 1 wins", "tied", "player 2 wins"]
    cols = []
    for a, b in _policies_for_grid():
        res = open_match([policy_summary(a, decks, source), policy_summary(b, decks, source)])
        cols.append([res.win[0], res.tie, res.win[1]])
    values = [[cols[j][i] for j in range(4)] for i in range(3)]
    return TableData(3, "two-player open-game result probabilities",
                     columns, rows, values, source, decks)


def _conditional(policy: ThresholdPolicy, cards: int, decks: int, source: str) -> dict[int, Fraction]:
    if source == "reference":
        return reference_table(policy).conditional_given_stand(cards)
    dist = outcome_distribution(fresh_shoe(decks), policy)
    return conditional_score_given_stand(dist, cards)


def _conditional_table(decks: int, source: str) -> TableData:
    columns = [str(s) for s in range(17, 21)]
    rows = []
    values = []
    for stand_on in (17, 18):
        for k in (2, 3, 4, 5):
            rows.append(f"stand{stand_on} k={k}")
            cond = _conditional(ThresholdPolicy(stand_on), k, decks, source)
            values.append([cond.get(s) for s in range(17, 21)])
    return TableData(4, "score law given a quiet stand with k cards",
                     columns, rows, values, source, decks)


def _standing_grid(decks: int, source: str) -> TableData:
    pairs = [(2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)]
    columns = [f"{a} vs {b}" for a, b in pairs]
    rows = ["player 1 wins", "tied", "player 2 wins"]
    p17 = ThresholdPolicy(17)
    cols = []
    for a, b in pairs:
        res = standing_match([
            _conditional(p17, a, decks, source),
            _conditional(p17, b, decks, source),
        ])
        cols.append([res.win[0], res.tie, res.win[1]])
    values = [[cols[j][i] for j in range(len(pairs))] for i in range(3)]
    return TableData(5, "both stood on 17-or-better: first with k cards, second with l",
                     columns, rows, values, source, decks)


def _expectation(policy: ThresholdPolicy, cards: int | None, include_einz: bool,
                 decks: int, source: str) -> Fraction:
    if source == "reference":
        ref = reference_table(policy)
        if cards is None:
            masses = dict(ref.any_row)
        else:
            masses = dict(ref.cells[cards])
        if not include_einz:
            masses.pop(21, None)
        total = sum(masses.values())
        return sum(s * m for s, m in masses.items()) / total
    dist = outcome_distribution(fresh_shoe(decks), policy)
    return expected_score(dist, cards, include_einz=include_einz, einz_value=21)


def _expectation_table(decks: int, source: str) -> TableData:
    columns = ["2", "3", "4", "5", "any"]
    rows = ["17-20", "17-einz", "18-20", "18-einz"]
    values = []
    for stand_on, include in ((17, False), (17, True), (18, False), (18, True)):
        p = ThresholdPolicy(stand_on)
        row = [_expectation(p, k, include, decks, source) for k in (2, 3, 4, 5)]
        row.append(_expectation(p, None, include, decks, source))
        values.append(row)
    return TableData(6, "mean final score by card count (einz counted as 21 when included)",
                     columns, rows, values, source, decks)


def build_table(table_id: int, decks: int = 1, source: str = "exact") -> TableData:
    """Build one of the six standard tables."""
    _check(source, decks, table_id)
    if table_id == 1:
        return _stand_table(17, decks, source)
    if table_id == 2:
        return _stand_table(18, decks, source)
    if table_id == 3:
        return _match_grid(decks, source)
    if table_id == 4:
        return _conditional_table(decks, source)
    if table_id == 5:
        return _standing_grid(decks, source)
    return _expectation_table(decks, source)


def dealer_summary_grid(decks: int = 1, source: str = "exact") -> TableData:
    """Player win probability per dealer variant and player policy."""
    columns = ["V1", "V2", "V3", "V3-chase"]
    rows = ["player stand17", "player stand18"]
    values = []
    rules = DealerRules(source=source, dealer_shoe=fresh_shoe(decks))
    chase_rules = DealerRules(v3_rule="chase", source=source, dealer_shoe=fresh_shoe(decks))
    for stand_on in (17, 18):
        player = policy_summary(ThresholdPolicy(stand_on), decks, source)
        row = [
            dealer_match(player, ThresholdPolicy(17), DealerVariant.V1, rules).win[0],
            dealer_match(player, ThresholdPolicy(17), DealerVariant.V2, rules).win[0],
            dealer_match(player, None, DealerVariant.V3, rules).win[0],
            dealer_match(player, None, DealerVariant.V3, chase_rules).win[0],
        ]
        values.append(row)
    return TableData(0, "player win probability against the dealer",
                     columns, rows, values, source, decks)
