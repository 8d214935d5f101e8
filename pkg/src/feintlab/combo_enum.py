"""Lookahead-bounded action combinations and dual-action timing.

A combination is admissible for lookahead ``L`` when its total time is below
``L`` and no further attack fits, i.e. ``L - min_attack_time <= T < L``.
A combination cannot end on a feint, so the smallest possible extension is
one attack and only attack times enter the window.
Feints may only appear directly in front of an attack; the two are fused
into one :class:`EffectiveUnit` whose stretch-out is the feint's full
duration plus the attack's own stretch-out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .action_model import ActionSet, ActionSpec, pose_distance


class NoCombinationsError(ValueError):
    """Raised when a configuration admits no action combination at all."""


@dataclass(frozen=True)
class EnumerationConfig:
    lookahead: float
    allow_feints: bool = False
    max_feints_per_combo: int = 1
    enforce_stance_links: bool = True
    link_eps: float = 1e-6

    def __post_init__(self) -> None:
        if not self.lookahead > 0:
            raise ValueError("lookahead must be > 0")
        if self.max_feints_per_combo < 0:
            raise ValueError("max_feints_per_combo must be >= 0")


@dataclass(frozen=True)
class EffectiveUnit:
    attack: str
    stretch_out: float
    damage: float
    duration: float  # feint time (if any) + attack total time
    feint: Optional[str] = None

    @classmethod
    def of(cls, attack: ActionSpec, feint: ActionSpec | None = None) -> "EffectiveUnit":
        lead = feint.total_time if feint is not None else 0.0
        return cls(
            attack=attack.id,
            stretch_out=lead + attack.stretch_out_time,
            damage=attack.damage,
            duration=lead + attack.total_time,
            feint=feint.id if feint is not None else None,
        )

    @property
    def label(self) -> str:
        return f"{self.feint}+{self.attack}" if self.feint else self.attack


@dataclass(frozen=True)
class ActionCombination:
    sequence: tuple[str, ...]
    total_time: float
    units: tuple[EffectiveUnit, ...]

    @property
    def label(self) -> str:
        return "+".join(self.sequence)

    @property
    def n_feints(self) -> int:
        return sum(1 for u in self.units if u.feint is not None)


def build_combination(aset: ActionSet, sequence: Sequence[str]) -> ActionCombination:
    """Group a raw id sequence into effective units.

    Raises ``ValueError`` when a feint is not immediately followed by an
    attack.
    """
    units = []
    pending: ActionSpec | None = None
    for aid in sequence:
        a = aset[aid]
        if a.is_feint:
            if pending is not None:
                raise ValueError(f"feint {pending.id} must be followed by an attack")
            pending = a
        else:
            units.append(EffectiveUnit.of(a, pending))
            pending = None
    if pending is not None:
        raise ValueError(f"feint {pending.id} must be followed by an attack")
    total = math.fsum(aset[aid].total_time for aid in sequence)
    return ActionCombination(tuple(sequence), total, tuple(units))


def check_physical_link(prev: ActionSpec, nxt: ActionSpec, eps: float = 1e-6) -> bool:
    """Whether ``nxt`` can start where ``prev`` ends.

    Frame data, when both actions carry it, decides by pose distance;
    otherwise the stance labels must match exactly.
    """
    if prev.frames is not None and nxt.frames is not None:
        return pose_distance(prev.frames.frames[-1], nxt.frames.frames[0]) <= eps
    return prev.stance_end == nxt.stance_start


def enumerate_combinations(aset: ActionSet, cfg: EnumerationConfig) -> list[ActionCombination]:
    """All admissible ordered combinations, in action-set order.

    Sequences are generated depth first, trying actions in the order they
    appear in ``aset``, which yields lexicographic order over set positions.
    Time sums are compared with a small absolute tolerance so that decimal
    durations such as 0.1 behave as written.
    """
    attacks = aset.attacks()
    if not attacks:
        return []
    feints = aset.feints() if cfg.allow_feints and cfg.max_feints_per_combo > 0 else []
    min_attack = min(a.total_time for a in attacks)
    L = cfg.lookahead
    tol = 1e-9
    choices = [a for a in aset if a.is_attack or a in feints]
    out: list[ActionCombination] = []

    def linked(prev: ActionSpec | None, nxt: ActionSpec) -> bool:
        return prev is None or not cfg.enforce_stance_links or check_physical_link(prev, nxt, cfg.link_eps)

    def dfs(seq: list[ActionSpec], total: float, n_feints: int) -> None:
        last = seq[-1] if seq else None
        if seq and last.is_attack and total + min_attack >= L - tol:
            out.append(build_combination(aset, [a.id for a in seq]))
        for a in choices:
            t = total + a.total_time
            if t >= L - tol:
                continue
            if a.is_feint and (
                n_feints >= cfg.max_feints_per_combo or (last is not None and last.is_feint)
            ):
                continue
            if not linked(last, a):
                continue
            seq.append(a)
            dfs(seq, t, n_feints + a.is_feint)
            seq.pop()

    dfs([], 0.0, 0)
    return out


class Regime(str, Enum):
    TOO_SHORT = "too_short"
    PROPER = "proper"
    TOO_LONG = "too_long"


@dataclass(frozen=True)
class TimingMarks:
    t_B1: float  # end of the opponent's first (reacting) action
    t_A2: float  # damage time of the agent's feint-fused attack
    t_B2: float  # damage time of the opponent's second unit

    def __post_init__(self) -> None:
        if not self.t_B1 <= self.t_B2:
            raise ValueError("timing marks need t_B1 <= t_B2")


def classify_feint_timing(marks: TimingMarks) -> Regime:
    """Too short before t_B1, proper on ``[t_B1, t_B2)``, too long after."""
    if marks.t_A2 < marks.t_B1:
        return Regime.TOO_SHORT
    if marks.t_A2 < marks.t_B2:
        return Regime.PROPER
    return Regime.TOO_LONG


def compute_timing_marks(
    agent_unit: EffectiveUnit,
    opp_first: ActionSpec | EffectiveUnit,
    opp_second: EffectiveUnit | None,
) -> TimingMarks:
    """Timing marks for a feint-fused unit against the opponent's next two units.

    All three marks share the origin at which both sides start.
    """
    if agent_unit.feint is None:
        raise ValueError("agent unit must contain a feint")
    if opp_second is None:
        raise ValueError("opponent second unit required")
    t_b1 = opp_first.total_time if isinstance(opp_first, ActionSpec) else opp_first.duration
    return TimingMarks(t_B1=t_b1, t_A2=agent_unit.stretch_out, t_B2=t_b1 + opp_second.stretch_out)
