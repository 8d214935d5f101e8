import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import check_invariants, random_frame_action
from feintlab.action_model import ActionSpec, FrameSequence, StageAnnotation, load_action_set
from feintlab.feint_gen import (
    Method,
    enumerate_feints,
    export_feints,
    find_identical_pairs,
    gen_feint_backward_cut,
    gen_feint_forward_cut,
    gen_feint_identical,
    timed_feint,
)


@pytest.fixture
def nine():
    frames = FrameSequence(tuple((float(v),) for v in [0, 1, 2, 3, 4, 3, 2, 1, 0]), 0.25)
    return ActionSpec("S1", "attack", 1.0, 2.25, 1.0, frames=frames, stages=StageAnnotation(4, 4))


def poses(feint):
    return [p[0] for p in feint.frames.frames]


def test_identical_pairs(nine):
    assert find_identical_pairs(nine, 1e-9) == [(0, 8), (1, 7), (2, 6), (3, 5)]


def test_identical_pairs_negative_eps(nine):
    with pytest.raises(ValueError, match="eps must be >= 0"):
        find_identical_pairs(nine, -1)


def test_identical_pairs_none():
    frames = FrameSequence(tuple((float(v),) for v in [0, 1, 2, 9, 7, 6, 5]), 0.1)
    a = ActionSpec("B", "attack", 1, 0.7, 0.3, frames=frames, stages=StageAnnotation(3, 3))
    assert find_identical_pairs(a, 1e-9) == []


@pytest.mark.parametrize(
    "pair,expected", [((1, 7), [0, 1, 1, 0]), ((0, 8), [0, 0]), ((3, 5), [0, 1, 2, 3, 3, 2, 1, 0])]
)
def test_identical_pair_feint(nine, pair, expected):
    f = gen_feint_identical(nine, pair)
    assert poses(f) == expected
    assert f.method is Method.IDENTICAL_PAIR
    assert f.total_time == len(expected) * 0.25


def test_identical_pair_outside_stages(nine):
    with pytest.raises(ValueError):
        gen_feint_identical(nine, (4, 8))


@pytest.mark.parametrize("cut,expected", [(2, [0, 1, 2, 1, 0]), (1, [0, 1, 0])])
def test_forward_cut(nine, cut, expected):
    assert poses(gen_feint_forward_cut(nine, cut)) == expected


def test_forward_cut_in_damage_stage(nine):
    with pytest.raises(ValueError, match="cut must precede damage stage"):
        gen_feint_forward_cut(nine, 4)


@pytest.mark.parametrize("cut,expected", [(6, [0, 1, 2, 1, 0]), (7, [0, 1, 0])])
def test_backward_cut(nine, cut, expected):
    assert poses(gen_feint_backward_cut(nine, cut)) == expected


def test_backward_cut_in_damage_stage(nine):
    with pytest.raises(ValueError, match="cut must follow damage stage"):
        gen_feint_backward_cut(nine, 4)


def test_frameless_action_rejected():
    a = ActionSpec("A1", "attack", 1, 1, 0.4)
    with pytest.raises(ValueError, match="frame data required for feint generation"):
        enumerate_feints(a, 0, 10)


def test_enumerate_brute_force(nine):
    expected = {}
    for cut in (1, 2, 3):
        f = gen_feint_forward_cut(nine, cut)
        expected.setdefault(f.frames.frames, f)
    for cut in (5, 6, 7):
        f = gen_feint_backward_cut(nine, cut)
        expected.setdefault(f.frames.frames, f)
    for pair in [(0, 8), (1, 7), (2, 6), (3, 5)]:
        f = gen_feint_identical(nine, pair)
        expected.setdefault(f.frames.frames, f)
    got = enumerate_feints(nine, 0, 10)
    assert {f.frames.frames for f in got} == set(expected)
    assert len(got) == len(expected) == 7


def test_enumerate_bounds(nine):
    assert enumerate_feints(nine, 0, 0) == []
    assert all(0.75 <= f.total_time <= 1.0 for f in enumerate_feints(nine, 0.75, 1.0))
    with pytest.raises(ValueError):
        enumerate_feints(nine, 2, 1)


def test_feint_spec_fields(nine):
    f = gen_feint_forward_cut(nine, 3)
    assert f.spec.kind.value == "feint"
    assert f.spec.damage == 0
    assert f.spec.stance_start == f.spec.stance_end == nine.stance_start
    assert f.spec.total_time < nine.total_time


def test_export_round_trip(nine, tmp_path):
    p = tmp_path / "f.json"
    feints = enumerate_feints(nine, 0, 10)
    export_feints(feints, p)
    aset = load_action_set(p)
    assert aset.ids == [f.spec.id for f in feints]
    assert all(a.is_feint for a in aset)


def test_export_empty(tmp_path):
    p = tmp_path / "f.json"
    export_feints([], p)
    assert json.loads(p.read_text())["actions"] == []


def test_timed_feint():
    a = ActionSpec("A1", "attack", 1, 1, 0.4, stance_start="left-forward", stance_end="neutral")
    f = timed_feint(a, 0.5)
    assert (f.total_time, f.damage, f.stance_start, f.stance_end) == (0.5, 0.0, "left-forward", "left-forward")


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_invariants_hold_on_random_actions(seed):
    rng = np.random.default_rng(seed)
    action = random_frame_action(rng)
    eps = 1e-6
    assert check_invariants(action, enumerate_feints(action, 0, 1e9, eps), eps) == []
