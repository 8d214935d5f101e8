"""Seeded two-NPC combat simulator.

Each NPC plays action combinations drawn from its maximin policy over the
scenario's combination matrix. The timeline is event driven:

* an attack reaches its damage frame ``stretch_out_time`` after it starts;
  if the dealer is still in that action the hit lands, moving ``damage``
  from the target's score to the dealer's;
* a landed hit knocks the target down and interrupts it: its combination
  is dropped. The bout then restarts from neutral: the standing NPC drops
  the rest of its combination too, and both re-plan together once the
  downed NPC gets up ``knockdown_recovery`` later;
* starting a feint deceives the opponent when the opponent is winding up an
  attack at that instant: the attack turns into a guard that deals no damage
  and blocks incoming hits until it would have ended.

Hits that fall at the same instant resolve simultaneously, so two NPCs can
trade blows. Scoring is strictly zero-sum.
"""

from __future__ import annotations

import heapq
import json
import math
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _fmt
from .action_model import ActionSet, ActionSpec
from .combo_enum import (
    ActionCombination,
    EffectiveUnit,
    EnumerationConfig,
    NoCombinationsError,
    Regime,
    TimingMarks,
    classify_feint_timing,
    compute_timing_marks,
    enumerate_combinations,
)
from .feint_gen import timed_feint
from .reward import ALIGNMENTS, RewardMatrix, combination_matrix
from .strategy import SELECTIONS, Policy, solve_maximin, solve_opponent

NPCS = ("A", "B")


class Scenario(str, Enum):
    BASIC_VS_BASIC = "basic_vs_basic"
    FEINT_VS_BASIC = "feint_vs_basic"
    FEINT_VS_FEINT = "feint_vs_feint"

    def feints_for(self, npc: str) -> bool:
        if npc == "A":
            return self is not Scenario.BASIC_VS_BASIC
        return self is Scenario.FEINT_VS_FEINT


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario = Scenario.BASIC_VS_BASIC
    episode_length: float = 25.0
    lookahead: float = 5.5
    feint_duration: float = 0.5
    knockdown_recovery: float = 1.0
    seed: int = 0
    alignment: str = "dual"
    max_feints_per_combo: int = 1
    feint_source: Optional[str] = None  # attack a synthetic feint is cut from
    require_feint: bool = False  # restrict NPC A to feint-bearing combinations
    policy_select: str = "balanced"  # see strategy.solve_maximin

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "scenario", Scenario(self.scenario))
        except ValueError:
            raise ValueError(f"unknown scenario {self.scenario!r}") from None
        if not self.episode_length > 0:
            raise ValueError("episode_length must be > 0")
        for name in ("lookahead", "feint_duration", "knockdown_recovery"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be >= 0")
        if not self.lookahead > 0:
            raise ValueError("lookahead must be > 0")
        if self.alignment not in ALIGNMENTS:
            raise ValueError(f"alignment must be one of {ALIGNMENTS}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.policy_select not in SELECTIONS:
            raise ValueError(f"policy_select must be one of {SELECTIONS}")
        if self.require_feint and not self.scenario.feints_for("A"):
            raise ValueError("require_feint needs a scenario where NPC A feints")

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["scenario"] = self.scenario.value
        return d


@dataclass(frozen=True)
class Event:
    time: float
    actor: str
    # combo_chosen | damage_landed | interrupted | knockdown_end | reset | deceived | blocked
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps(
            {"time": self.time, "actor": self.actor, "kind": self.kind, "payload": self.payload},
            sort_keys=True,
        )


@dataclass(frozen=True)
class EpisodeLog:
    events: tuple[Event, ...]
    score_a: float
    score_b: float

    def to_jsonl(self) -> str:
        return "".join(e.to_json() + "\n" for e in self.events)

    def choices(self, npc: str) -> list[str]:
        return [e.payload["combo"] for e in self.events if e.kind == "combo_chosen" and e.actor == npc]


@dataclass(frozen=True)
class Matchup:
    """Everything an episode needs that does not depend on the seed."""

    sets: dict
    combos: dict
    policies: dict
    matrix: RewardMatrix


def _augment(aset: ActionSet, cfg: ScenarioConfig) -> ActionSet:
    if aset.feints():
        return aset
    if cfg.feint_duration <= 0:
        raise ValueError("feint scenarios need feint_duration > 0")
    attacks = aset.attacks()
    if not attacks:
        raise ValueError("action set has no attacks")
    source = aset[cfg.feint_source] if cfg.feint_source else attacks[0]
    return aset.with_actions([timed_feint(source, cfg.feint_duration, "F1")])


def prepare_matchup(cfg: ScenarioConfig, set_a: ActionSet, set_b: Optional[ActionSet] = None) -> Matchup:
    """Enumerate both sides' combinations and solve both maximin policies once."""
    set_b = set_a if set_b is None else set_b
    sets, combos = {}, {}
    for npc, base in zip(NPCS, (set_a, set_b)):
        feints = cfg.scenario.feints_for(npc)
        aset = _augment(base, cfg) if feints else ActionSet(tuple(base.attacks()), base.joint_dimension)
        ecfg = EnumerationConfig(
            cfg.lookahead, allow_feints=feints, max_feints_per_combo=cfg.max_feints_per_combo
        )
        found = enumerate_combinations(aset, ecfg)
        if npc == "A" and cfg.require_feint:
            found = [c for c in found if c.n_feints > 0]
        if not found:
            raise NoCombinationsError(f"no admissible combinations for NPC {npc}")
        sets[npc], combos[npc] = aset, found
    R = combination_matrix(combos["A"], combos["B"], cfg.alignment)
    policies = {
        "A": solve_maximin(R, cfg.policy_select).agent_policy,
        "B": solve_opponent(R, cfg.policy_select).agent_policy,
    }
    return Matchup(sets, combos, policies, R)


@dataclass
class _Running:
    spec: ActionSpec
    start: float
    end: float
    hit_time: Optional[float]
    guarding: bool = False


@dataclass
class _NPC:
    name: str
    cdf: np.ndarray
    combos: list
    aset: ActionSet
    queue: deque = field(default_factory=deque)
    cur: Optional[_Running] = None
    token: int = 0


def _t(x: float) -> float:
    # keeps sums like 0.1 + 0.2 and 0.3 on the same instant
    return round(x, 9)


class _Episode:
    HIT, END, RECOVER, RESUME = 0, 1, 2, 3

    def __init__(self, cfg: ScenarioConfig, matchup: Matchup, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng
        self.npcs = {}
        for npc in NPCS:
            p = np.clip(matchup.policies[npc].as_array(), 0.0, None)
            cdf = np.cumsum(p / p.sum())
            self.npcs[npc] = _NPC(npc, cdf, matchup.combos[npc], matchup.sets[npc])
        self.heap: list = []
        self.seq = 0
        self.events: list[Event] = []
        self.transfers: list[float] = []  # signed, from A's side
        self.started_feints: list[str] = []

    def other(self, npc: str) -> str:
        return "B" if npc == "A" else "A"

    def log(self, t: float, actor: str, kind: str, **payload) -> None:
        self.events.append(Event(t, actor, kind, payload))

    def push(self, t: float, phase: int, actor: str, token: int) -> None:
        heapq.heappush(self.heap, (t, phase, self.seq, actor, token))
        self.seq += 1

    def plan(self, npc: str, t: float) -> None:
        st = self.npcs[npc]
        u = self.rng.random()
        idx = min(int(np.searchsorted(st.cdf, u, side="right")), len(st.combos) - 1)
        combo: ActionCombination = st.combos[idx]
        self.log(t, npc, "combo_chosen", combo=combo.label)
        st.queue = deque(st.aset[a] for a in combo.sequence)
        self.start_next(npc, t)

    def start_next(self, npc: str, t: float) -> None:
        st = self.npcs[npc]
        if not st.queue:
            self.plan(npc, t)
            return
        spec = st.queue.popleft()
        st.token += 1
        hit = _t(t + spec.stretch_out_time) if spec.is_attack else None
        st.cur = _Running(spec, t, _t(t + spec.total_time), hit)
        self.push(st.cur.end, self.END, npc, st.token)
        if hit is not None:
            self.push(hit, self.HIT, npc, st.token)
        if spec.is_feint:
            self.started_feints.append(npc)

    def deceive(self, feinter: str, t: float) -> None:
        target = self.npcs[self.other(feinter)]
        cur = target.cur
        if cur is None or not cur.spec.is_attack or cur.guarding:
            return
        if cur.start <= t < cur.hit_time:
            cur.guarding = True
            self.log(t, target.name, "deceived", action=cur.spec.id, until=cur.end)

    def run(self) -> EpisodeLog:
        for npc in NPCS:
            self.plan(npc, 0.0)
        for npc in self.started_feints:
            self.deceive(npc, 0.0)
        self.started_feints.clear()
        horizon = self.cfg.episode_length
        while self.heap and self.heap[0][0] <= horizon:
            t = self.heap[0][0]
            batch = []
            while self.heap and self.heap[0][0] == t:
                batch.append(heapq.heappop(self.heap))
            self.step(t, batch)
        score_a = math.fsum(self.transfers)
        return EpisodeLog(tuple(self.events), score_a, -score_a)

    def live(self, npc: str, token: int) -> bool:
        return self.npcs[npc].token == token and self.npcs[npc].cur is not None

    def step(self, t: float, batch: list) -> None:
        hits = [
            (actor, self.npcs[actor].cur)
            for _, phase, _, actor, token in batch
            if phase == self.HIT and self.live(actor, token) and not self.npcs[actor].cur.guarding
        ]
        landed = []
        for dealer, run in hits:
            target = self.npcs[self.other(dealer)]
            guard = target.cur
            if guard is not None and guard.guarding and guard.start <= t < guard.end:
                self.log(t, target.name, "blocked", action=run.spec.id, by=dealer)
            else:
                landed.append((dealer, run.spec))
        for dealer, spec in landed:
            self.transfers.append(spec.damage if dealer == "A" else -spec.damage)
            self.log(t, dealer, "damage_landed", action=spec.id, damage=spec.damage, target=self.other(dealer))
        if landed:
            resume = _t(t + self.cfg.knockdown_recovery)
            victims = {self.other(dealer) for dealer, _ in landed}
            for npc in NPCS:
                st = self.npcs[npc]
                if npc in victims:
                    self.log(
                        t,
                        npc,
                        "interrupted",
                        action=st.cur.spec.id if st.cur else None,
                        dropped=len(st.queue),
                    )
                    phase = self.RECOVER
                else:
                    self.log(t, npc, "reset", action=st.cur.spec.id if st.cur else None, dropped=len(st.queue))
                    phase = self.RESUME
                st.cur = None
                st.queue.clear()
                st.token += 1
                self.push(resume, phase, npc, st.token)

        for _, phase, _, actor, token in batch:
            st = self.npcs[actor]
            if phase == self.END and self.live(actor, token) and st.cur.end == t:
                self.start_next(actor, t)
            elif phase in (self.RECOVER, self.RESUME) and st.token == token and st.cur is None:
                if phase == self.RECOVER:
                    self.log(t, actor, "knockdown_end")
                self.plan(actor, t)
        for npc in self.started_feints:
            self.deceive(npc, t)
        self.started_feints.clear()


def episode_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for episode ``index`` of a batch seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(index,))))


def run_episode(
    cfg: ScenarioConfig,
    set_a: ActionSet,
    set_b: Optional[ActionSet] = None,
    *,
    matchup: Optional[Matchup] = None,
    rng: Optional[np.random.Generator] = None,
) -> EpisodeLog:
    if matchup is None:
        matchup = prepare_matchup(cfg, set_a, set_b)
    if rng is None:
        rng = np.random.Generator(np.random.PCG64(int(cfg.seed)))
    return _Episode(cfg, matchup, rng).run()


@dataclass(frozen=True)
class SummaryStats:
    scores_a: tuple[float, ...]
    scores_b: tuple[float, ...]
    # per NPC: sum over episodes of each combination's share of that
    # episode's choices, so each NPC's values sum to the episode count
    choice_frequencies: dict
    choice_counts: dict

    @property
    def n(self) -> int:
        return len(self.scores_a)

    @property
    def mean_a(self) -> float:
        return math.fsum(self.scores_a) / self.n

    @property
    def mean_b(self) -> float:
        return math.fsum(self.scores_b) / self.n

    def deltas(self) -> np.ndarray:
        return np.array(self.scores_a) - np.array(self.scores_b)

    @property
    def mean_delta(self) -> float:
        return math.fsum(self.deltas()) / self.n

    def to_csv(self) -> str:
        rows = [["episode", "score_a", "score_b"]]
        rows += [[str(i), _fmt.num(a), _fmt.num(b)] for i, (a, b) in enumerate(zip(self.scores_a, self.scores_b))]
        rows.append(["mean", _fmt.num(self.mean_a), _fmt.num(self.mean_b)])
        return _fmt.csv_text(rows)

    def choices_csv(self) -> str:
        rows = [["npc", "combination", "count", "frequency"]]
        for npc in NPCS:
            for label in sorted(self.choice_counts[npc]):
                rows.append(
                    [npc, label, str(self.choice_counts[npc][label]), _fmt.num(self.choice_frequencies[npc][label])]
                )
        return _fmt.csv_text(rows)


def summarize(logs: Sequence[EpisodeLog]) -> SummaryStats:
    freqs: dict = {npc: {} for npc in NPCS}
    counts: dict = {npc: Counter() for npc in NPCS}
    parts: dict = {npc: {} for npc in NPCS}
    for log in logs:
        for npc in NPCS:
            chosen = Counter(log.choices(npc))
            total = sum(chosen.values())
            counts[npc].update(chosen)
            for label, k in chosen.items():
                parts[npc].setdefault(label, []).append(k / total)
    for npc in NPCS:
        freqs[npc] = {label: math.fsum(v) for label, v in sorted(parts[npc].items())}
    return SummaryStats(
        tuple(log.score_a for log in logs),
        tuple(log.score_b for log in logs),
        freqs,
        {npc: dict(sorted(counts[npc].items())) for npc in NPCS},
    )


def run_batch(
    cfg: ScenarioConfig,
    n: int,
    set_a: ActionSet,
    set_b: Optional[ActionSet] = None,
    *,
    matchup: Optional[Matchup] = None,
    logs: Optional[list] = None,
) -> SummaryStats:
    """Run ``n`` episodes; episode ``i`` draws from ``episode_rng(cfg.seed, i)``.

    Pass a list as ``logs`` to collect the individual episode logs.
    """
    if n < 1:
        raise ValueError("episode count must be >= 1")
    if matchup is None:
        matchup = prepare_matchup(cfg, set_a, set_b)
    episodes = [run_episode(cfg, set_a, set_b, matchup=matchup, rng=episode_rng(cfg.seed, i)) for i in range(n)]
    if logs is not None:
        logs.extend(episodes)
    return summarize(episodes)


@dataclass(frozen=True)
class SweepRow:
    duration: float
    marks: TimingMarks
    regime: Regime
    mean_delta: float  # nan when no feint of this length exists (duration 0)
    episodes: int


def canonical_marks(aset: ActionSet, duration: float, attack: str, opp_first: str, opp_second: str) -> TimingMarks:
    """Timing of ``feint(duration) + attack`` against ``opp_first`` then ``opp_second``."""
    a = aset[attack]
    unit = EffectiveUnit(
        attack=a.id,
        stretch_out=duration + a.stretch_out_time,
        damage=a.damage,
        duration=duration + a.total_time,
        feint="F",
    )
    return compute_timing_marks(unit, aset[opp_first], EffectiveUnit.of(aset[opp_second]))


def sweep_feint_length(
    base: ScenarioConfig,
    durations: Sequence[float],
    set_a: ActionSet,
    set_b: Optional[ActionSet] = None,
    *,
    episodes: int = 200,
    attack: Optional[str] = None,
    opp_first: Optional[str] = None,
    opp_second: Optional[str] = None,
) -> list[SweepRow]:
    """Score NPC A's feints of each length in the canonical matchup.

    NPC A only has ``attack`` (default: the first attack) and a feint of the
    given length cut from it, and must use feint-bearing combinations. NPC B
    only has ``opp_first`` and ``opp_second`` (both default to ``attack``),
    so the exchanges played out are the ones the timing marks describe.
    """
    if not durations:
        raise ValueError("durations must be non-empty")
    if any(d < 0 for d in durations):
        raise ValueError("durations must be >= 0")
    set_b = set_a if set_b is None else set_b
    attack = attack or set_a.attacks()[0].id
    opp_first = opp_first or attack
    opp_second = opp_second or opp_first
    rows = []
    for d in durations:
        marks = canonical_marks(set_a, d, attack, opp_first, opp_second)
        regime = classify_feint_timing(marks)
        delta = math.nan
        n = 0
        if d > 0:
            cfg = replace(
                base,
                scenario=Scenario.FEINT_VS_BASIC,
                feint_duration=d,
                feint_source=attack,
                require_feint=True,
            )
            only_a = ActionSet((set_a[attack],), set_a.joint_dimension)
            only_b = ActionSet(
                tuple(set_b[i] for i in dict.fromkeys((opp_first, opp_second))), set_b.joint_dimension
            )
            delta = run_batch(cfg, episodes, only_a, only_b).mean_delta
            n = episodes
        rows.append(SweepRow(d, marks, regime, delta, n))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    out = [["duration", "t_B1", "t_A2", "t_B2", "regime", "mean_delta", "episodes"]]
    for r in rows:
        out.append(
            [
                _fmt.num(r.duration),
                _fmt.num(r.marks.t_B1),
                _fmt.num(r.marks.t_A2),
                _fmt.num(r.marks.t_B2),
                r.regime.value,
                "nan" if math.isnan(r.mean_delta) else _fmt.num(r.mean_delta),
                str(r.episodes),
            ]
        )
    return _fmt.csv_text(out)
