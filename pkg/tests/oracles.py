"""Independent brute-force references used to check the fast engine.

Everything here enumerates ordered draw sequences directly, with no
multiset merging and no memoization, so it shares no code path with
`einz.exact`.  Keep it that way.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from einz.cards import POINT_VALUES
from einz.exact import Outcome, bust, einz, stood
from einz.policy import ThresholdPolicy


def brute_force_outcomes(
    counts: tuple[int, ...],
    policy: ThresholdPolicy,
    *,
    exhaust_stands: bool = True,
    count_discarded: bool = False,
) -> dict[Outcome, Fraction]:
    """Walk every ordered draw sequence and classify it at each step.

    A change-on-14 discards the hand face-up (cards stay out of play) and
    the sequence continues with a fresh empty hand.  An emptied shoe
    forces a stand when ``exhaust_stands`` is set, else raises.
    """
    acc: dict[Outcome, Fraction] = defaultdict(lambda: Fraction(0))

    def walk(counts, hand, discarded, changes_used, prob):
        total = sum(hand)
        count = len(hand)
        reported = count + (discarded if count_discarded else 0)
        if count >= 1:
            if total == 21 or (total == 22 and count == 2):
                acc[einz(reported)] += prob
                return
            if total > 21:
                acc[bust(reported)] += prob
                return
        if count >= 2:
            if (
                policy.change_on_14
                and total == 14
                and changes_used < policy.max_changes
            ):
                walk(counts, (), discarded + count, changes_used + 1, prob)
                return
            if total >= policy.stand_on:
                acc[stood(total, reported)] += prob
                return
        n = sum(counts)
        if n == 0:
            if not exhaust_stands:
                raise RuntimeError("shoe exhausted")
            acc[stood(total, reported)] += prob
            return
        for i, v in enumerate(POINT_VALUES):
            if counts[i] == 0:
                continue
            nxt = counts[:i] + (counts[i] - 1,) + counts[i + 1 :]
            walk(nxt, hand + (v,), discarded, changes_used, prob * Fraction(counts[i], n))

    walk(tuple(counts), (), 0, 0, Fraction(1))
    return dict(acc)
