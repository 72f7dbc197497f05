"""Sampling oracle: play full rounds by simulated dealing.

Cross-validates the exact engine and covers configurations too entangled
for enumeration (shared shoes, many players).  Deterministic: outcomes
are a pure function of the seed via the counter-based scheme in
``einz.rng``, identical between the vectorized and the plain-Python
engines, across runs and platforms.

Dealing order per round: each seat completes his whole hand before the
next seat acts, every seat drawing from a fresh shoe unless
``shared_shoe`` is set, in which case seats deplete one common shoe in
order.  Event keys in reports:

    p{i}.bust / p{i}.einz / p{i}.stood{score}    per-seat marginals
    p{i}.{...}.c{cards}                          split by final card count
    match.win.p{i}, match.tie, match.tie.m{m}, match.default.p{i}

In fresh-shoe (marginal) mode every simulated hand counts toward the
per-seat events even when the sequential round ended earlier, so those
events estimate the per-seat marginal law; in shared-shoe or chase
configurations only hands that were actually played are counted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import sqrt
from typing import Sequence

import numpy as np

from .cards import PER_DECK, POINT_VALUES
from .matchup import DealerVariant
from .policy import ThresholdPolicy, parse_policy
from . import rng

_VALUES = np.array(POINT_VALUES, dtype=np.int64)


@dataclass(frozen=True)
class SimConfig:
    rounds: int
    seed: int
    decks: int = 1
    policies: tuple[ThresholdPolicy, ...] = (ThresholdPolicy(17),)
    mode: str = "open"  # "open" | "dealer"
    dealer_variant: DealerVariant | None = None
    dealer_policy: ThresholdPolicy = ThresholdPolicy(17)
    v3_rule: str = "stand18"
    shared_shoe: bool = False
    count_discarded: bool = False

    def __post_init__(self) -> None:
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.mode not in ("open", "dealer"):
            raise ValueError("mode must be 'open' or 'dealer'")
        if self.mode == "dealer" and len(self.policies) != 1:
            raise ValueError("dealer mode takes exactly one player policy")
        if self.mode == "open" and len(self.policies) < 1:
            raise ValueError("at least one policy")

    @classmethod
    def from_json(cls, payload: dict) -> "SimConfig":
        policies = tuple(parse_policy(p) for p in payload.get("policies", ["stand17"]))
        variant = payload.get("dealer_variant")
        return cls(
            rounds=payload["rounds"],
            seed=payload.get("seed", 0),
            decks=payload.get("decks", 1),
            policies=policies,
            mode=payload.get("mode", "open"),
            dealer_variant=DealerVariant(variant) if variant else None,
            dealer_policy=parse_policy(payload.get("dealer_policy", "stand17")),
            v3_rule=payload.get("v3_rule", "stand18"),
            shared_shoe=payload.get("shared_shoe", False),
            count_discarded=payload.get("count_discarded", False),
        )


@dataclass
class SimReport:
    rounds: int
    seed: int
    counts: dict[str, int]
    estimates: dict[str, float] = field(default_factory=dict)
    std_errors: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.estimates:
            n = self.rounds
            for k, c in self.counts.items():
                p = c / n
                self.estimates[k] = p
                self.std_errors[k] = sqrt(p * (1 - p) / n)

    def to_json(self) -> str:
        return json.dumps(
            {
                "rounds": self.rounds,
                "seed": self.seed,
                "counts": dict(sorted(self.counts.items())),
                "estimates": {k: self.estimates[k] for k in sorted(self.estimates)},
                "std_errors": {k: self.std_errors[k] for k in sorted(self.std_errors)},
            },
            indent=2,
            sort_keys=True,
        )


@dataclass
class _Hands:
    """Per-round results of one seat's play."""

    kind: np.ndarray  # 0 bust, 1 stood, 2 einz
    score: np.ndarray  # final total
    cards: np.ndarray  # reported card count
    shoe: np.ndarray  # remaining counts per round (R x 10)


_BUST, _STOOD, _EINZ = 0, 1, 2


def _play_seat_numpy(
    shoe_counts: np.ndarray,
    seed: int,
    player_index: int,
    stand_on: np.ndarray,
    change: bool,
    max_changes: int,
    count_discarded: bool,
    play_mask: np.ndarray | None = None,
) -> _Hands:
    """Lockstep dealing of one seat's hand across all rounds.

    State arrays are compacted to the still-live rounds each step;
    ``ids`` maps compacted rows back to absolute round indices.
    """
    n = shoe_counts.shape[0]
    kind = np.full(n, -1, dtype=np.int64)
    score = np.zeros(n, dtype=np.int64)
    out_cards = np.zeros(n, dtype=np.int64)

    ids = np.nonzero(play_mask)[0] if play_mask is not None else np.arange(n)
    keys = rng.player_keys_np(seed, n, player_index)[ids]
    m = ids.size
    totals = np.zeros(m, dtype=np.int64)
    ncards = np.zeros(m, dtype=np.int64)
    discarded = np.zeros(m, dtype=np.int64)
    changes_left = np.full(m, max_changes if change else 0, dtype=np.int64)
    shoe = shoe_counts[ids].copy()
    shoe_total = shoe.sum(axis=1, dtype=np.int64)
    stand = stand_on[ids]

    def settle(done: np.ndarray, k_or_arr) -> None:
        rounds = ids[done]
        kind[rounds] = k_or_arr if np.isscalar(k_or_arr) else k_or_arr[done]
        score[rounds] = totals[done]
        out_cards[rounds] = ncards[done] + (discarded[done] if count_discarded else 0)
        shoe_counts[rounds] = shoe[done]

    j = 0
    while ids.size:
        empty = shoe_total == 0
        if empty.any():
            settle(empty, _STOOD)  # forced stand on an exhausted shoe
            keep = ~empty
            ids, keys, totals, ncards = ids[keep], keys[keep], totals[keep], ncards[keep]
            discarded, changes_left = discarded[keep], changes_left[keep]
            shoe, shoe_total, stand = shoe[keep], shoe_total[keep], stand[keep]
            if not ids.size:
                break
        words = rng.draw_words_np(keys, j)
        r = (words % shoe_total.astype(np.uint64)).astype(np.int64)
        cum = np.cumsum(shoe, axis=1)
        idx = (r[:, None] >= cum).sum(axis=1)
        shoe[np.arange(ids.size), idx] -= 1
        shoe_total -= 1
        totals += _VALUES[idx]
        ncards += 1
        j += 1

        einz = (totals == 21) | ((totals == 22) & (ncards == 2))
        bust = (totals > 21) & ~einz
        if change:
            ch = ~einz & ~bust & (totals == 14) & (ncards >= 2) & (changes_left > 0)
        else:
            ch = None
        live = ~einz & ~bust
        if ch is not None:
            live &= ~ch
        stood = live & (ncards >= 2) & (totals >= stand)

        done = einz | bust | stood
        if done.any():
            kinds = np.where(einz, _EINZ, np.where(bust, _BUST, _STOOD))
            settle(done, kinds)
        if ch is not None and ch.any():
            discarded[ch] += ncards[ch]
            totals[ch] = 0
            ncards[ch] = 0
            changes_left[ch] -= 1
        keep = ~done
        if not keep.all():
            ids, keys, totals, ncards = ids[keep], keys[keep], totals[keep], ncards[keep]
            discarded, changes_left = discarded[keep], changes_left[keep]
            shoe, shoe_total, stand = shoe[keep], shoe_total[keep], stand[keep]

    return _Hands(kind=kind, score=score, cards=out_cards, shoe=shoe_counts)


def _play_seat_python(
    shoe: list[int],
    seed: int,
    round_index: int,
    player_index: int,
    stand_on: int,
    change: bool,
    max_changes: int,
    count_discarded: bool,
) -> tuple[int, int, int]:
    """Reference scalar implementation; bit-identical to the numpy path."""
    total = cards = discarded = 0
    changes_left = max_changes if change else 0
    shoe_total = sum(shoe)
    j = 0
    while True:
        if shoe_total == 0:
            return _STOOD, total, cards + (discarded if count_discarded else 0)
        word = rng.draw_word(seed, round_index, player_index, j)
        r = word % shoe_total
        acc = 0
        for i, c in enumerate(shoe):
            acc += c
            if r < acc:
                idx = i
                break
        shoe[idx] -= 1
        shoe_total -= 1
        total += POINT_VALUES[idx]
        cards += 1
        j += 1
        if total == 21 or (total == 22 and cards == 2):
            return _EINZ, total, cards + (discarded if count_discarded else 0)
        if total > 21:
            return _BUST, total, cards + (discarded if count_discarded else 0)
        if cards >= 2:
            if change and total == 14 and changes_left > 0:
                discarded += cards
                total = cards = 0
                changes_left -= 1
                continue
            if total >= stand_on:
                return _STOOD, total, cards + (discarded if count_discarded else 0)


def _fresh_counts(decks: int, n: int) -> np.ndarray:
    # int16 keeps the per-step cumsum cheap; row sums stay below 2**15
    base = np.array([decks * PER_DECK[v] for v in POINT_VALUES], dtype=np.int16)
    return np.tile(base, (n, 1))


def _seat_hands(config: SimConfig, engine: str) -> list[_Hands]:
    n = config.rounds
    seats: list[tuple[ThresholdPolicy, np.ndarray | None]] = [
        (p, None) for p in config.policies
    ]
    if config.mode == "dealer":
        variant = config.dealer_variant or DealerVariant.V2
        if variant is DealerVariant.V3 and config.v3_rule == "stand18":
            seats.append((ThresholdPolicy(18), None))
        elif variant is DealerVariant.V3 and config.v3_rule == "chase":
            seats.append((None, None))  # threshold filled after the player plays
        else:
            seats.append((config.dealer_policy, None))

    hands: list[_Hands] = []
    shoe = _fresh_counts(config.decks, n)
    for p_idx, (policy, _) in enumerate(seats):
        if not config.shared_shoe:
            shoe = _fresh_counts(config.decks, n)
        if policy is None:  # chase dealer
            player = hands[0]
            stand = np.where(player.kind == _STOOD, player.score + 1, 18)
            play = player.kind == _STOOD
            policy_change, policy_max = False, 0
        else:
            stand = np.full(n, policy.stand_on, dtype=np.int64)
            play = None
            policy_change, policy_max = policy.change_on_14, policy.max_changes
        if engine == "numpy":
            hands.append(
                _play_seat_numpy(
                    shoe, config.seed, p_idx, stand,
                    policy_change, policy_max, config.count_discarded,
                    play_mask=play,
                )
            )
        else:
            kind = np.zeros(n, dtype=np.int64)
            score = np.zeros(n, dtype=np.int64)
            cards = np.zeros(n, dtype=np.int64)
            for r_i in range(n):
                if play is not None and not play[r_i]:
                    kind[r_i] = -1
                    continue
                row = [int(x) for x in shoe[r_i]]
                k, s, c = _play_seat_python(
                    row, config.seed, r_i, p_idx, int(stand[r_i]),
                    policy_change, policy_max, config.count_discarded,
                )
                shoe[r_i] = row
                kind[r_i], score[r_i], cards[r_i] = k, s, c
            hands.append(_Hands(kind, score, cards, shoe))
    return hands


def simulate_match_grid(
    rounds: int,
    seed: int,
    policies: Sequence[ThresholdPolicy],
    decks: int = 1,
) -> dict[tuple[int, int], dict[str, int]]:
    """Two-player match counts for every (seat-0 policy, seat-1 policy) pair.

    Each (seat, policy) hand set is simulated once and shared across the
    grid's columns — the per-column estimates are the same as separate
    ``simulate`` runs with the same seed (identical draw streams), just
    correlated with each other.
    """
    hands: dict[tuple[int, int], _Hands] = {}
    for seat in (0, 1):
        for pi, pol in enumerate(policies):
            shoe = _fresh_counts(decks, rounds)
            stand = np.full(rounds, pol.stand_on, dtype=np.int64)
            hands[(seat, pi)] = _play_seat_numpy(
                shoe, seed, seat, stand, pol.change_on_14, pol.max_changes, False
            )
    out: dict[tuple[int, int], dict[str, int]] = {}
    for i in range(len(policies)):
        for j in range(len(policies)):
            counts: dict[str, int] = {}
            _tabulate_open_match(counts, [hands[(0, i)], hands[(1, j)]], rounds)
            out[(i, j)] = {k: int(v) for k, v in counts.items()}
    return out


def simulate(config: SimConfig, engine: str = "numpy") -> SimReport:
    """Run the configured simulation and tabulate events.

    ``engine="python"`` runs the scalar reference implementation (slow,
    for verification); both engines produce identical reports.
    """
    if engine not in ("numpy", "python"):
        raise ValueError("engine must be 'numpy' or 'python'")
    hands = _seat_hands(config, engine)
    n = config.rounds
    counts: dict[str, int] = {}

    for i, (h, mask) in enumerate(zip(hands, _played_masks(config, hands))):
        _tabulate_seat(counts, i, h, mask)

    if config.mode == "open" and len(hands) >= 2:
        _tabulate_open_match(counts, hands, n)
    elif config.mode == "dealer":
        _tabulate_dealer_match(counts, hands, config)

    counts = {k: int(v) for k, v in counts.items() if v}
    return SimReport(rounds=n, seed=config.seed, counts=counts)


def _played_masks(config: SimConfig, hands: list[_Hands]) -> list[np.ndarray]:
    """Which rounds each seat's hand counts toward per-seat events.

    Fresh-shoe mode counts every simulated hand (marginal estimates);
    shared-shoe mode counts only hands actually played before the round
    was decided (an earlier einz, or the everyone-busted default for the
    last open-game seat).
    """
    n = config.rounds
    if not config.shared_shoe:
        return [h.kind >= 0 for h in hands]
    masks = []
    live = np.ones(n, dtype=bool)
    nseats = len(hands)
    for i, h in enumerate(hands):
        m = live & (h.kind >= 0)
        if config.mode == "open" and i == nseats - 1 and nseats >= 2:
            all_bust = np.ones(n, dtype=bool)
            for g in hands[:-1]:
                all_bust &= g.kind == _BUST
            m &= ~all_bust
        masks.append(m)
        live = live & (h.kind != _EINZ)
    return masks


def _tabulate_seat(counts: dict, i: int, h: _Hands, mask: np.ndarray) -> None:
    for kind_val, name in ((_BUST, "bust"), (_EINZ, "einz")):
        m = mask & (h.kind == kind_val)
        counts[f"p{i}.{name}"] = counts.get(f"p{i}.{name}", 0) + int(m.sum())
        if m.any():
            cards = h.cards[m]
            for c in np.unique(cards):
                counts[f"p{i}.{name}.c{c}"] = int((cards == c).sum())
    m = mask & (h.kind == _STOOD)
    if m.any():
        scores, cards = h.score[m], h.cards[m]
        for s in np.unique(scores):
            sel = scores == s
            counts[f"p{i}.stood{s}"] = int(sel.sum())
            for c in np.unique(cards[sel]):
                counts[f"p{i}.stood{s}.c{c}"] = int((cards[sel] == c).sum())


def _tabulate_open_match(counts: dict, hands: list[_Hands], n: int) -> None:
    nseats = len(hands)
    decided = np.zeros(n, dtype=bool)
    winner = np.full(n, -1, dtype=np.int64)
    # first einz in seat order ends the round
    for i, h in enumerate(hands):
        m = ~decided & (h.kind == _EINZ)
        winner[m] = i
        decided |= m
        counts[f"match.einz.p{i}"] = int(m.sum())
    # default win: everyone before the last seat busted
    all_earlier_bust = np.ones(n, dtype=bool)
    for h in hands[:-1]:
        all_earlier_bust &= h.kind == _BUST
    m = ~decided & all_earlier_bust
    winner[m] = nseats - 1
    decided |= m
    counts[f"match.default.p{nseats - 1}"] = int(m.sum())
    # highest stood score among survivors
    open_rounds = ~decided
    best = np.full(n, -1, dtype=np.int64)
    nbest = np.zeros(n, dtype=np.int64)
    for h in hands:
        stood = open_rounds & (h.kind == _STOOD)
        higher = stood & (h.score > best)
        equal = stood & (h.score == best)
        best[higher] = h.score[higher]
        nbest[higher] = 1
        nbest[equal] += 1
    sole = open_rounds & (nbest == 1)
    for i, h in enumerate(hands):
        m = sole & (h.kind == _STOOD) & (h.score == best)
        winner[m] = i
    tied = open_rounds & (nbest > 1)
    counts["match.tie"] = int(tied.sum())
    for mcard in np.unique(nbest[tied]) if tied.any() else []:
        counts[f"match.tie.m{mcard}"] = int((nbest[tied] == mcard).sum())
    for i in range(nseats):
        counts[f"match.win.p{i}"] = int((winner == i).sum())


def _tabulate_dealer_match(counts: dict, hands: list[_Hands], config: SimConfig) -> None:
    player, dealer = hands[0], hands[1]
    variant = config.dealer_variant or DealerVariant.V2
    n = config.rounds
    if variant is DealerVariant.V1:
        rank_p = np.where(player.kind == _EINZ, 100, np.where(player.kind == _BUST, -1, player.score))
        rank_d = np.where(dealer.kind == _EINZ, 100, np.where(dealer.kind == _BUST, -1, dealer.score))
        p_win = rank_p > rank_d
        tie = rank_p == rank_d
        counts["match.win.p0"] = int(p_win.sum())
        counts["match.win.p1"] = int((~p_win & ~tie).sum())
        counts["match.tie"] = int(tie.sum())
        return
    # V2 comparison (V3 differs only in how the dealer hand was produced)
    p_bust = player.kind == _BUST
    p_einz = player.kind == _EINZ
    stood = player.kind == _STOOD
    dealer_higher = np.zeros(n, dtype=bool)
    played = dealer.kind >= 0
    dealer_higher |= stood & played & (dealer.kind == _EINZ)
    dealer_higher |= stood & played & (dealer.kind == _STOOD) & (dealer.score > player.score)
    dealer_win = p_bust | dealer_higher
    counts["match.win.p0"] = int((~dealer_win).sum())
    counts["match.win.p1"] = int(dealer_win.sum())
    counts["match.tie"] = 0
