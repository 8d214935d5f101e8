"""Reward matrices over single actions and over action combinations.

Two combinations are scored by lining up their effective units into
choice-competing pairs and summing the pair rewards. Within a pair the unit
that reaches its damage frame first (shorter stretch-out) scores its damage;
a unit facing nothing scores in full; equal stretch-outs trade damage.

Alignment modes
---------------
``"unit"``
    unit ``i`` of the agent meets unit ``i`` of the opponent.
``"dual"``
    as ``"unit"``, except that a feint-fused unit facing a plain unit makes
    that plain unit the opponent's *reaction*: it is spent answering the
    feint, and the feinting attack is judged against the opponent's following
    unit with :func:`~feintlab.combo_enum.classify_feint_timing`. A proper
    feint scores the attack, a late one concedes the opponent's attack and an
    early one is absorbed (zero).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _fmt
from .action_model import ActionSet
from .combo_enum import (
    ActionCombination,
    EffectiveUnit,
    Regime,
    TimingMarks,
    classify_feint_timing,
)

ALIGNMENTS = ("unit", "dual")


@dataclass(frozen=True)
class RewardMatrix:
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape != (len(self.rows), len(self.cols)):
            raise ValueError(
                f"matrix shape {values.shape} does not match {len(self.rows)}x{len(self.cols)} labels"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("reward matrix entries must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "cols", tuple(self.cols))
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def is_skew_symmetric(self, tol: float = 1e-12) -> bool:
        v = self.values
        return v.shape[0] == v.shape[1] and bool(np.all(np.abs(v + v.T) <= tol))

    def to_csv(self) -> str:
        rows = [[""] + list(self.cols)]
        for label, row in zip(self.rows, self.values):
            rows.append([label] + [_fmt.num(x) for x in row])
        return _fmt.csv_text(rows)

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


@dataclass(frozen=True)
class CompetingPair:
    agent_unit: Optional[EffectiveUnit]
    opp_unit: Optional[EffectiveUnit]
    # plain unit spent reacting to the other side's feint (dual alignment only)
    agent_reaction: Optional[EffectiveUnit] = None
    opp_reaction: Optional[EffectiveUnit] = None

    def __post_init__(self) -> None:
        if self.agent_unit is None and self.opp_unit is None:
            raise ValueError("competing pair needs at least one unit")
        if self.agent_reaction is not None and self.opp_reaction is not None:
            raise ValueError("only one side can be reacting")

    def swapped(self) -> "CompetingPair":
        return CompetingPair(self.opp_unit, self.agent_unit, self.opp_reaction, self.agent_reaction)


def single_action_matrix(aset: ActionSet) -> RewardMatrix:
    attacks = aset.attacks()
    if len(attacks) != len(aset):
        raise ValueError("single-action matrix takes attacks only")
    r = np.array([a.damage for a in attacks])
    ids = tuple(a.id for a in attacks)
    return RewardMatrix(ids, ids, r[:, None] - r[None, :])


def align_pairs(
    agent: ActionCombination, opp: ActionCombination, alignment: str = "unit"
) -> list[CompetingPair]:
    if alignment not in ALIGNMENTS:
        raise ValueError(f"unknown alignment {alignment!r}")
    a, b = agent.units, opp.units
    if not a and not b:
        raise ValueError("empty combination")
    pairs = []
    i = j = 0
    while i < len(a) or j < len(b):
        ua = a[i] if i < len(a) else None
        ub = b[j] if j < len(b) else None
        if alignment == "dual" and ua is not None and ub is not None:
            if ua.feint is not None and ub.feint is None:
                second = b[j + 1] if j + 1 < len(b) else None
                pairs.append(CompetingPair(ua, second, opp_reaction=ub))
                i, j = i + 1, j + 2
                continue
            if ub.feint is not None and ua.feint is None:
                second = a[i + 1] if i + 1 < len(a) else None
                pairs.append(CompetingPair(second, ub, agent_reaction=ua))
                i, j = i + 2, j + 1
                continue
        pairs.append(CompetingPair(ua, ub))
        i, j = i + 1, j + 1
    return pairs


def _feint_exchange(feinter: EffectiveUnit, reaction: EffectiveUnit, second: EffectiveUnit | None) -> float:
    """Reward to the feinting side of a dual-action exchange."""
    t_b1 = reaction.duration
    t_b2 = t_b1 + second.stretch_out if second is not None else math.inf
    marks = TimingMarks(t_B1=t_b1, t_A2=feinter.stretch_out, t_B2=t_b2)
    regime = classify_feint_timing(marks)
    if regime is Regime.TOO_SHORT:
        return 0.0
    if regime is Regime.PROPER:
        return feinter.damage
    if marks.t_A2 == marks.t_B2:
        return feinter.damage - second.damage
    return -second.damage


def pair_reward(pair: CompetingPair) -> float:
    ua, ub = pair.agent_unit, pair.opp_unit
    if pair.opp_reaction is not None:
        return _feint_exchange(ua, pair.opp_reaction, ub)
    if pair.agent_reaction is not None:
        return -_feint_exchange(ub, pair.agent_reaction, ua)
    if ub is None:
        return ua.damage
    if ua is None:
        return -ub.damage
    if ua.stretch_out < ub.stretch_out:
        return ua.damage
    if ub.stretch_out < ua.stretch_out:
        return -ub.damage
    return ua.damage - ub.damage


def combination_reward(agent: ActionCombination, opp: ActionCombination, alignment: str = "unit") -> float:
    return math.fsum(pair_reward(p) for p in align_pairs(agent, opp, alignment))


def combination_matrix(
    agent_combos: Sequence[ActionCombination],
    opp_combos: Sequence[ActionCombination],
    alignment: str = "unit",
) -> RewardMatrix:
    if not agent_combos or not opp_combos:
        raise ValueError("combination lists must be non-empty")
    values = np.array(
        [[combination_reward(x, y, alignment) for y in opp_combos] for x in agent_combos]
    )
    return RewardMatrix(
        tuple(c.label for c in agent_combos), tuple(c.label for c in opp_combos), values
    )
