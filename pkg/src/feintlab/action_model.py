"""Timed action data model and action-set file I/O.

An attack is split into three stages over its frame sequence:

* stretch-out: frames ``[0, stage1_end)``
* damage: frames ``[stage1_end, damage_end]``
* retract: frames ``(damage_end, last]``

Poses are flat tuples of floats so that every type here is immutable,
hashable and compares by value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

Pose = tuple[float, ...]

# Stance vocabulary for frame-less datasets. Other labels are accepted and
# compared by exact equality.
STANCES = ("left-forward", "right-forward", "neutral")


class ActionSetError(ValueError):
    """Base class for action-set problems."""


class ParseError(ActionSetError):
    """The file is not a well-formed action-set document."""


class ValidationError(ActionSetError):
    """A value violates an action or action-set invariant."""


class Kind(str, Enum):
    ATTACK = "attack"
    DEFENSE = "defense"
    FEINT = "feint"


def pose_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance between two poses of equal dimension."""
    if len(a) != len(b):
        raise ValueError(f"pose dimension mismatch: {len(a)} != {len(b)}")
    return math.sqrt(math.fsum((x - y) ** 2 for x, y in zip(a, b)))


def _as_pose(values: Iterable[Any]) -> Pose:
    pose = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in pose):
        raise ValidationError("pose values must be finite")
    return pose


@dataclass(frozen=True)
class FrameSequence:
    frames: tuple[Pose, ...]
    frame_dt: float

    def __post_init__(self) -> None:
        frames = tuple(_as_pose(f) for f in self.frames)
        object.__setattr__(self, "frames", frames)
        if len(frames) < 2:
            raise ValidationError("frame sequence needs at least 2 frames")
        if len({len(f) for f in frames}) != 1:
            raise ValidationError("frames have mixed dimensions")
        if not (self.frame_dt > 0 and math.isfinite(self.frame_dt)):
            raise ValidationError("frame_dt must be > 0")

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def dimension(self) -> int:
        return len(self.frames[0])

    @property
    def duration(self) -> float:
        return len(self.frames) * self.frame_dt


@dataclass(frozen=True)
class StageAnnotation:
    stage1_end: int
    damage_end: int

    def stage_of(self, index: int) -> int:
        """Stage number (1, 2 or 3) holding frame ``index``."""
        if index < self.stage1_end:
            return 1
        if index <= self.damage_end:
            return 2
        return 3

    def damage_range(self) -> range:
        return range(self.stage1_end, self.damage_end + 1)


@dataclass(frozen=True)
class ActionSpec:
    id: str
    kind: Kind
    damage: float
    total_time: float
    stretch_out_time: float
    stance_start: str = "neutral"
    stance_end: str = "neutral"
    frames: Optional[FrameSequence] = None
    stages: Optional[StageAnnotation] = None

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "kind", Kind(self.kind))
        except ValueError:
            raise ValidationError(f"action {self.id}: unknown kind {self.kind!r}") from None
        for name in ("damage", "total_time", "stretch_out_time"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"action {self.id}: {name} must be finite")
            object.__setattr__(self, name, value)
        if self.damage < 0:
            raise ValidationError(f"action {self.id}: damage must be >= 0")
        if self.total_time <= 0:
            raise ValidationError(f"action {self.id}: total_time must be > 0")
        if not 0 <= self.stretch_out_time <= self.total_time:
            raise ValidationError(
                f"action {self.id}: stretch_out_time must lie in [0, total_time]"
            )
        if self.kind is Kind.FEINT and self.damage != 0:
            raise ValidationError(f"action {self.id}: feint must have zero damage")
        if self.frames is not None:
            if abs(self.frames.duration - self.total_time) > self.frames.frame_dt + 1e-9:
                raise ValidationError(
                    f"action {self.id}: frame count x frame_dt does not match total_time"
                )
        if self.stages is not None and self.frames is None:
            raise ValidationError(f"action {self.id}: stages given without frames")

    @property
    def is_attack(self) -> bool:
        return self.kind is Kind.ATTACK

    @property
    def is_feint(self) -> bool:
        return self.kind is Kind.FEINT


@dataclass(frozen=True)
class ActionSet:
    actions: tuple[ActionSpec, ...]
    joint_dimension: int = 1
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        actions = tuple(self.actions)
        object.__setattr__(self, "actions", actions)
        if not actions:
            raise ValidationError("action set empty")
        if int(self.joint_dimension) < 1:
            raise ValidationError("joint_dimension must be >= 1")
        index = {}
        for a in actions:
            if a.id in index:
                raise ValidationError(f"duplicate action id {a.id}")
            index[a.id] = a
            if a.frames is not None and a.frames.dimension != self.joint_dimension:
                raise ValidationError(
                    f"action {a.id}: frame dimension {a.frames.dimension} "
                    f"!= joint_dimension {self.joint_dimension}"
                )
        object.__setattr__(self, "_index", index)

    def __getitem__(self, action_id: str) -> ActionSpec:
        return self._index[action_id]

    def __contains__(self, action_id: object) -> bool:
        return action_id in self._index

    def __iter__(self):
        return iter(self.actions)

    def __len__(self) -> int:
        return len(self.actions)

    @property
    def ids(self) -> list[str]:
        return [a.id for a in self.actions]

    def attacks(self) -> list[ActionSpec]:
        return [a for a in self.actions if a.is_attack]

    def feints(self) -> list[ActionSpec]:
        return [a for a in self.actions if a.is_feint]

    def with_actions(self, extra: Iterable[ActionSpec]) -> "ActionSet":
        return ActionSet(self.actions + tuple(extra), self.joint_dimension)


def validate_stages(spec: ActionSpec) -> list[str]:
    """Return the list of stage-annotation violations for ``spec``.

    An empty list means the three stages are non-empty and the declared
    stretch-out time agrees with the stage-1 frame count to within one frame.
    """
    if spec.frames is None or spec.stages is None:
        return ["frames and stages required"]
    n = len(spec.frames)
    s1, de = spec.stages.stage1_end, spec.stages.damage_end
    problems = []
    if s1 <= 0:
        problems.append("stage 1 empty")
    if de < s1:
        problems.append("stage 2 empty")
    if de >= n - 1:
        problems.append("stage 3 empty")
    if s1 > n or de > n:
        problems.append("stage index out of range")
    dt = spec.frames.frame_dt
    if abs(spec.stretch_out_time - s1 * dt) > dt + 1e-9:
        problems.append("stretch_out_time inconsistent with stage 1 frames")
    return problems


# -- file format ----------------------------------------------------------


def action_from_dict(d: dict) -> ActionSpec:
    try:
        aid = str(d["id"])
    except (KeyError, TypeError):
        raise ParseError("action entry without id") from None
    try:
        frames = None
        if d.get("frames") is not None:
            if "frame_dt" not in d:
                raise ValidationError(f"action {aid}: frames given without frame_dt")
            frames = FrameSequence(tuple(tuple(f) for f in d["frames"]), float(d["frame_dt"]))
        stages = None
        if d.get("stages") is not None:
            st = d["stages"]
            stages = StageAnnotation(int(st["stage1_end"]), int(st["damage_end"]))
        return ActionSpec(
            id=aid,
            kind=d["kind"],
            damage=d["damage"],
            total_time=d["total_time"],
            stretch_out_time=d["stretch_out_time"],
            stance_start=str(d.get("stance_start", "neutral")),
            stance_end=str(d.get("stance_end", "neutral")),
            frames=frames,
            stages=stages,
        )
    except KeyError as exc:
        raise ParseError(f"action {aid}: missing field {exc.args[0]}") from None
    except ValidationError as exc:
        msg = str(exc)
        raise ValidationError(msg if aid in msg else f"action {aid}: {msg}") from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"action {aid}: bad value ({exc})") from None


def action_to_dict(a: ActionSpec) -> dict:
    d: dict[str, Any] = {
        "id": a.id,
        "kind": a.kind.value,
        "damage": a.damage,
        "total_time": a.total_time,
        "stretch_out_time": a.stretch_out_time,
        "stance_start": a.stance_start,
        "stance_end": a.stance_end,
    }
    if a.frames is not None:
        d["frame_dt"] = a.frames.frame_dt
        d["frames"] = [list(f) for f in a.frames.frames]
    if a.stages is not None:
        d["stages"] = {"stage1_end": a.stages.stage1_end, "damage_end": a.stages.damage_end}
    return d


def action_set_from_dict(doc: Any) -> ActionSet:
    if not isinstance(doc, dict) or not isinstance(doc.get("actions"), list):
        raise ParseError("expected an object with an 'actions' list")
    actions = [action_from_dict(d) for d in doc["actions"]]
    try:
        dim = int(doc.get("joint_dimension", 1))
    except (TypeError, ValueError):
        raise ParseError("joint_dimension must be an integer") from None
    aset = ActionSet(tuple(actions), dim)
    for a in aset:
        if a.stages is not None:
            problems = validate_stages(a)
            if problems:
                raise ValidationError(f"action {a.id}: " + "; ".join(problems))
    return aset


def action_set_to_dict(aset: ActionSet) -> dict:
    return {
        "joint_dimension": aset.joint_dimension,
        "actions": [action_to_dict(a) for a in aset],
    }


def load_action_set(path: str | Path) -> ActionSet:
    """Read and validate an action-set JSON file.

    Raises :class:`ParseError` for malformed documents and
    :class:`ValidationError` (naming the action) for invariant violations.
    ``OSError`` propagates unchanged.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return action_set_from_dict(doc)


def dump_action_set(aset: ActionSet) -> str:
    return json.dumps(action_set_to_dict(aset), indent=2) + "\n"


def save_action_set(aset: ActionSet, path: str | Path) -> None:
    Path(path).write_text(dump_action_set(aset), encoding="utf-8")


# -- bundled scenario -----------------------------------------------------

# (id, name, damage, total time, stretch-out time). A2-A4 have no measured
# stretch-out, so they take 40% of their total time.
BOXING_ACTIONS = (
    ("A1", "short punch", 1.0, 1.0, 0.4),
    ("A2", "short hook", 1.5, 2.0, 0.8),
    ("A3", "medium punch", 2.5, 2.5, 1.0),
    ("A4", "long punch", 4.0, 3.5, 1.4),
    ("A5", "cross punch", 5.0, 5.0, 1.3),
)


def boxing_action_set() -> ActionSet:
    """The five-attack boxing scenario (all stances neutral)."""
    return ActionSet(
        tuple(
            ActionSpec(aid, Kind.ATTACK, dmg, t, so)
            for aid, _name, dmg, t, so in BOXING_ACTIONS
        ),
        joint_dimension=1,
    )
