"""Palindrome-directed feint generation.

A feint is cut out of an attack's stretch-out and retract frames so that the
motion leaves the rest pose and comes back to it without ever reaching the
damage frames. Three extraction methods are supported:

``identical_pair``
    keep frames ``[0..i]`` and ``[j..end]`` where frame ``i`` (stage 1) and
    frame ``j`` (stage 3) are the same pose within ``eps``.
``forward_cut``
    play stage-1 frames up to a cut point, then play them back in reverse.
``backward_cut``
    play stage-3 frames from the cut point to the end in reverse, then
    forward again.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .action_model import (
    ActionSpec,
    FrameSequence,
    Kind,
    action_to_dict,
    pose_distance,
)

DEFAULT_EPS = 1e-6


class Method(str, Enum):
    IDENTICAL_PAIR = "identical_pair"
    FORWARD_CUT = "forward_cut"
    BACKWARD_CUT = "backward_cut"


_TAGS = {Method.IDENTICAL_PAIR: "pal", Method.FORWARD_CUT: "fwd", Method.BACKWARD_CUT: "bwd"}


@dataclass(frozen=True)
class FeintAction:
    source_id: str
    method: Method
    cut_params: tuple[int, ...]
    source_indices: tuple[int, ...]  # source frame index of every feint frame
    frames: FrameSequence
    spec: ActionSpec

    @property
    def total_time(self) -> float:
        return self.spec.total_time


def _require_stages(action: ActionSpec) -> None:
    if action.frames is None or action.stages is None:
        raise ValueError(f"action {action.id}: frame data required for feint generation")


def is_palindrome(frames: FrameSequence, eps: float = 0.0) -> bool:
    f = frames.frames
    n = len(f)
    return all(pose_distance(f[k], f[n - 1 - k]) <= eps for k in range(n // 2))


def _build(action: ActionSpec, method: Method, params: tuple[int, ...], indices: list[int]) -> FeintAction:
    src = action.frames
    frames = FrameSequence(tuple(src.frames[i] for i in indices), src.frame_dt)
    total = frames.duration
    if total >= action.total_time:
        raise ValueError(
            f"action {action.id}: {method.value} {params} is not shorter than its source"
        )
    fid = f"{action.id}.{_TAGS[method]}" + "-".join(str(p) for p in params)
    spec = ActionSpec(
        id=fid,
        kind=Kind.FEINT,
        damage=0.0,
        total_time=total,
        # the turning point of the palindrome
        stretch_out_time=(len(indices) // 2) * src.frame_dt,
        stance_start=action.stance_start,
        stance_end=action.stance_start,
        frames=frames,
    )
    return FeintAction(action.id, method, params, tuple(indices), frames, spec)


def find_identical_pairs(action: ActionSpec, eps: float) -> list[tuple[int, int]]:
    """All (stage-1 index, stage-3 index) pairs whose poses lie within ``eps``."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    _require_stages(action)
    frames = action.frames.frames
    st = action.stages
    return [
        (i, j)
        for i in range(st.stage1_end)
        for j in range(st.damage_end + 1, len(frames))
        if pose_distance(frames[i], frames[j]) <= eps
    ]


def gen_feint_identical(action: ActionSpec, pair: tuple[int, int], eps: float = DEFAULT_EPS) -> FeintAction:
    """Join frames ``[0..i]`` with ``[j..end]``.

    Both junction frames are kept. The result must read the same forwards and
    backwards within ``eps``; sources whose stage 1 and stage 3 are not
    mirror images around the pair are rejected with ``ValueError``.
    """
    _require_stages(action)
    i, j = pair
    st = action.stages
    n = len(action.frames)
    if not (0 <= i < st.stage1_end and st.damage_end < j < n):
        raise ValueError(f"pair {pair} must join a stage-1 frame to a stage-3 frame")
    frames = action.frames.frames
    if pose_distance(frames[i], frames[j]) > eps:
        raise ValueError(f"frames {i} and {j} are not identical within eps")
    feint = _build(action, Method.IDENTICAL_PAIR, (i, j), list(range(i + 1)) + list(range(j, n)))
    if not is_palindrome(feint.frames, eps):
        raise ValueError(f"pair {pair} does not give a palindromic feint")
    return feint


def gen_feint_forward_cut(action: ActionSpec, cut: int) -> FeintAction:
    _require_stages(action)
    if not 0 < cut < action.stages.stage1_end:
        raise ValueError("cut must precede damage stage")
    fwd = list(range(cut + 1))
    return _build(action, Method.FORWARD_CUT, (cut,), fwd + fwd[-2::-1])


def gen_feint_backward_cut(action: ActionSpec, cut: int) -> FeintAction:
    _require_stages(action)
    n = len(action.frames)
    if not action.stages.damage_end < cut < n - 1:
        raise ValueError("cut must follow damage stage")
    tail = list(range(cut, n))
    return _build(action, Method.BACKWARD_CUT, (cut,), tail[:0:-1] + tail)


def enumerate_feints(
    action: ActionSpec,
    duration_min: float,
    duration_max: float,
    eps: float = DEFAULT_EPS,
) -> list[FeintAction]:
    """Every feint the three methods can cut from ``action`` within the bounds.

    Candidates the generators reject (not shorter than the source, or not
    palindromic) are skipped. Feints with identical frame content are
    reported once, keeping the first in method order B, C, A.
    """
    if not 0 <= duration_min <= duration_max:
        raise ValueError("need 0 <= duration_min <= duration_max")
    _require_stages(action)
    st = action.stages
    n = len(action.frames)
    candidates = []
    for cut in range(1, st.stage1_end):
        candidates.append(lambda c=cut: gen_feint_forward_cut(action, c))
    for cut in range(st.damage_end + 1, n - 1):
        candidates.append(lambda c=cut: gen_feint_backward_cut(action, c))
    for pair in find_identical_pairs(action, eps):
        candidates.append(lambda p=pair: gen_feint_identical(action, p, eps))

    out: list[FeintAction] = []
    seen = set()
    for make in candidates:
        try:
            feint = make()
        except ValueError:
            continue
        if not duration_min <= feint.total_time <= duration_max:
            continue
        if feint.frames.frames in seen:
            continue
        seen.add(feint.frames.frames)
        out.append(feint)
    return out


def timed_feint(source: ActionSpec, duration: float, feint_id: str = "F1") -> ActionSpec:
    """A frame-less feint of the given duration drawn from ``source``.

    Used for datasets that carry timing but no frames; the feint inherits the
    source's starting stance at both ends.
    """
    return ActionSpec(
        id=feint_id,
        kind=Kind.FEINT,
        damage=0.0,
        total_time=duration,
        stretch_out_time=duration / 2,
        stance_start=source.stance_start,
        stance_end=source.stance_start,
    )


def export_feints(feints: list[FeintAction], path: str | Path, joint_dimension: int | None = None) -> None:
    """Write feints in the action-set file format.

    An empty list still produces a document (with an empty ``actions`` array)
    so that a vacuous run leaves a file behind.
    """
    if joint_dimension is None:
        joint_dimension = feints[0].frames.dimension if feints else 1
    doc = {"joint_dimension": joint_dimension, "actions": [action_to_dict(f.spec) for f in feints]}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
