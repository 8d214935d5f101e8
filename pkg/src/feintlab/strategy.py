"""Maximin mixed strategies for zero-sum matrix games.

The row player (agent) picks a distribution ``x`` over rows to maximise
``v`` subject to ``x @ R >= v`` for every opponent column. The game is
shifted to be strictly positive and solved as the column player's LP

    maximise  sum(w)   s.t.  M w <= 1,  w >= 0

with the dense simplex in :mod:`feintlab.simplex`. Its optimal duals give the
row strategy and the primal gives the column strategy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .reward import RewardMatrix
from .simplex import InfeasibleError, linprog

SELECTIONS = ("vertex", "balanced")
_CLEAN_TOL = 1e-12


@dataclass(frozen=True)
class Policy:
    probabilities: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.probabilities)
        object.__setattr__(self, "probabilities", p)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(p) != len(self.labels):
            raise ValueError("one probability per label")
        if abs(math.fsum(p) - 1.0) > 1e-9:
            raise ValueError("probabilities must sum to 1")
        if min(p) < -1e-12:
            raise ValueError("probabilities must be non-negative")

    def as_array(self) -> np.ndarray:
        return np.array(self.probabilities)

    def max_probability(self) -> float:
        return max(self.probabilities)

    @classmethod
    def pure(cls, labels: Sequence[str], index: int) -> "Policy":
        p = [0.0] * len(labels)
        p[index] = 1.0
        return cls(tuple(p), tuple(labels))

    @classmethod
    def uniform(cls, labels: Sequence[str]) -> "Policy":
        n = len(labels)
        return cls(tuple([1.0 / n] * n), tuple(labels))


@dataclass(frozen=True)
class GameSolution:
    agent_policy: Policy
    value: float
    opponent_policy: Optional[Policy] = None


def _normalize(v: np.ndarray) -> np.ndarray:
    v = np.where(v < _CLEAN_TOL * max(1.0, float(np.abs(v).max())), 0.0, v)
    return v / v.sum()


def _balanced_rows(values: np.ndarray, value: float) -> np.ndarray:
    """A maximin policy in the relative interior of the optimal face.

    Every row that appears in some maximin policy gets positive mass: for
    each such row we find the optimal policy that puts the most weight on it
    and average those maximisers.
    """
    m, n = values.shape
    scale = max(1.0, float(np.abs(values).max()))
    A_eq = np.ones((1, m))
    # the face is pinned at v minus a hair; widen it if rounding made it empty
    for rel in (1e-12, 1e-10, 1e-8):
        b_ub = np.full(n, -(value - rel * scale))
        total = np.zeros(m)
        try:
            for i in range(m):
                c = np.zeros(m)
                c[i] = -1.0
                x = np.clip(linprog(c, -values.T, b_ub, A_eq, [1.0]).x, 0.0, None)
                # rows that no optimal policy uses contribute nothing
                if x[i] > 1e-9:
                    total += x
        except InfeasibleError:
            continue
        return _normalize(total)
    raise RuntimeError("optimal face could not be recovered")


def _labels(R: RewardMatrix | np.ndarray):
    if isinstance(R, RewardMatrix):
        return R.values, R.rows, R.cols
    values = np.asarray(R, dtype=float)
    if values.ndim != 2:
        raise ValueError("payoff matrix must be 2-D")
    rows = tuple(str(i) for i in range(values.shape[0]))
    cols = tuple(str(j) for j in range(values.shape[1]))
    return values, rows, cols


def solve_maximin(R: RewardMatrix | np.ndarray, select: str = "vertex") -> GameSolution:
    """Maximin policy of the row player and the game value.

    With ``select="vertex"`` the policy is the basic optimal solution of the
    LP. ``"balanced"`` instead returns an optimal policy whose support covers
    every row used by any maximin policy, which matters when many optima tie.

    The returned value is the guaranteed payoff of the returned policy,
    ``min_j (x @ R)[j]``. The column player's minimax policy (always a
    vertex) is attached as ``opponent_policy``.
    """
    if select not in SELECTIONS:
        raise ValueError(f"unknown policy selection {select!r}")
    values, rows, cols = _labels(R)
    if values.size == 0:
        raise ValueError("payoff matrix is empty")
    if not np.all(np.isfinite(values)):
        raise ValueError("payoff matrix has non-finite entries")
    m, n = values.shape
    shift = 1.0 - values.min()
    res = linprog(-np.ones(n), A_ub=values + shift, b_ub=np.ones(m))
    x = _normalize(-res.duals)
    y = _normalize(res.x)
    if select == "balanced":
        x = _balanced_rows(values, float((x @ values).min()))
    value = float((x @ values).min())
    return GameSolution(Policy(tuple(x), rows), value, Policy(tuple(y), cols))


def solve_opponent(R: RewardMatrix, select: str = "vertex") -> GameSolution:
    """The column player's maximin, from the opponent's view (``-R.T``)."""
    return solve_maximin(RewardMatrix(R.cols, R.rows, -R.values.T), select)


def expected_reward(R: RewardMatrix | np.ndarray, agent: Policy, opp: Policy) -> float:
    """Agent payoff ``agent @ R @ opp`` (rows are agent choices)."""
    values = R.values if isinstance(R, RewardMatrix) else np.asarray(R, dtype=float)
    x, y = agent.as_array(), opp.as_array()
    if values.shape != (x.size, y.size):
        raise ValueError(f"policy sizes {x.size}x{y.size} do not match matrix {values.shape}")
    return float(x @ values @ y)


def policy_entropy(p: Policy) -> float:
    """Shannon entropy in bits."""
    return 0.0 - math.fsum(q * math.log2(q) for q in p.probabilities if q > 0)
