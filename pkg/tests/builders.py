"""Random synthetic actions for property tests."""

import numpy as np

from feintlab.action_model import ActionSpec, FrameSequence, StageAnnotation
from feintlab.feint_gen import Method, is_palindrome
from oracles import palindrome_ok


def random_frame_action(rng, eps=1e-6, dim=None):
    """An attack whose retract roughly mirrors its stretch-out.

    Stage 3 replays stage 1 backwards with noise well under ``eps`` on some
    actions and large noise on others, so identical pairs are sometimes
    present and sometimes not.
    """
    dim = dim or int(rng.integers(1, 4))
    s1 = int(rng.integers(1, 7))
    n_damage = int(rng.integers(1, 4))
    rest = rng.normal(size=dim)
    out = [rest + rng.normal(size=dim) * k for k in range(s1)]
    out[0] = rest
    damage = [rng.normal(size=dim) * 5 for _ in range(n_damage)]
    noise = eps * 0.1 if rng.random() < 0.7 else 1.0
    back = [p + rng.uniform(-noise, noise, size=dim) / np.sqrt(dim) for p in out[::-1]]
    back[-1] = rest  # closed motion
    if rng.random() < 0.3:
        back = back[1:] + [rest]  # retract one frame longer than approach would suggest
    frames = [tuple(map(float, p)) for p in out + damage + back]
    dt = float(rng.choice([0.05, 0.1, 0.25]))
    n = len(frames)
    spec = ActionSpec(
        "X",
        "attack",
        float(rng.uniform(0.5, 5)),
        n * dt,
        s1 * dt,
        frames=FrameSequence(tuple(frames), dt),
        stages=StageAnnotation(s1, s1 + n_damage - 1),
    )
    return spec


def check_invariants(action, feints, eps):
    """Return a list of violated invariants (empty when all hold)."""
    bad = []
    src = action.frames.frames
    damage = set(action.stages.damage_range())
    for f in feints:
        fr = f.frames.frames
        tol = eps if f.method is Method.IDENTICAL_PAIR else 0.0
        if not palindrome_ok(fr, tol) or not is_palindrome(f.frames, tol):
            bad.append((f.spec.id, "palindrome"))
        if np.linalg.norm(np.subtract(fr[0], fr[-1])) > tol:
            bad.append((f.spec.id, "closure"))
        if damage & set(f.source_indices):
            bad.append((f.spec.id, "damage frame"))
        if any(tuple(src[i]) != p for i, p in zip(f.source_indices, fr)):
            bad.append((f.spec.id, "subset"))
        if not f.total_time < action.total_time:
            bad.append((f.spec.id, "duration"))
    return bad
