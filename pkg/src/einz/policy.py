"""Player decision policies: stand thresholds and the change-on-14 option."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .cards import Hand, HandClass, classify


class Action(Enum):
    HIT = "hit"
    STAND = "stand"
    CHANGE14 = "change14"


@dataclass(frozen=True)
class ThresholdPolicy:
    """Hit until the total reaches ``stand_on``, then stand.

    With ``change_on_14`` set, a live total of exactly 14 is discarded
    face-up and replaced by a fresh two-card deal instead of being hit.
    ``max_changes`` caps how often that happens per round; the usual rule
    is once.  Changing takes precedence over the threshold on 14, which
    only matters for thresholds of 14 or lower.
    """

    stand_on: int
    change_on_14: bool = False
    max_changes: int = 1

    def __post_init__(self) -> None:
        if not 12 <= self.stand_on <= 21:
            raise ValueError("stand_on must be in [12, 21]")
        if self.max_changes < 0:
            raise ValueError("max_changes must be >= 0")

    @property
    def name(self) -> str:
        return f"stand{self.stand_on}" + ("+c14" if self.change_on_14 else "")


def decide_totals(policy: ThresholdPolicy, total: int, changes_used: int = 0) -> Action:
    """Decision from the running total alone (hands below 22 only)."""
    if policy.change_on_14 and total == 14 and changes_used < policy.max_changes:
        return Action.CHANGE14
    if total >= policy.stand_on:
        return Action.STAND
    return Action.HIT


def decide(policy: ThresholdPolicy, hand: Hand, changes_used: int = 0) -> Action:
    """The unique action the policy takes on a live hand.

    Terminal hands (einz or bust) have no action; passing one is a caller
    bug and raises.
    """
    if classify(hand) is not HandClass.LIVE:
        raise ValueError(f"no action for terminal hand {hand.values} ({classify(hand).value})")
    return decide_totals(policy, hand.total, changes_used)


_POLICY_RE = re.compile(r"^stand(\d{2})(\+c14)?$")

STAND17 = ThresholdPolicy(17)
STAND18 = ThresholdPolicy(18)


def parse_policy(text: str) -> ThresholdPolicy:
    """Parse a policy literal such as ``stand17``, ``stand18`` or ``stand17+c14``."""
    m = _POLICY_RE.match(text.strip().lower())
    if not m:
        raise ValueError(
            f"unknown policy {text!r} (expected standN or standN+c14 with N in 12..21)"
        )
    return ThresholdPolicy(int(m.group(1)), change_on_14=bool(m.group(2)))
