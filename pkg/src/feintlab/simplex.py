"""Dense two-phase tableau simplex.

Sized for the few-hundred-variable programs that come out of combination
matrices. Entering columns follow Dantzig's rule (lowest index on ties) and
fall back to Bland's rule after a run of degenerate pivots; leaving rows are
the minimum ratio, ties going to the lowest basic variable index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

TOL = 1e-11


class InfeasibleError(RuntimeError):
    pass


class UnboundedError(RuntimeError):
    pass


@dataclass
class LPResult:
    x: np.ndarray
    fun: float
    basis: list
    duals: np.ndarray  # one per constraint row, for the original (unflipped) rows


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    nz = np.flatnonzero(factor)
    if nz.size:
        T[nz] -= np.outer(factor[nz], T[row])


def _iterate(T: np.ndarray, basis: list, allowed: np.ndarray, max_iter: int) -> None:
    """Minimise the objective in the last row of ``T`` over ``allowed`` columns."""
    m = T.shape[0] - 1
    degenerate_run = 0
    for _ in range(max_iter):
        reduced = np.where(allowed, T[m, :-1], 0.0)
        negative = np.flatnonzero(reduced < -TOL)
        if negative.size == 0:
            return
        if degenerate_run > m:
            col = int(negative[0])
        else:
            col = int(negative[np.argmin(reduced[negative])])
        column = T[:m, col]
        rows = np.flatnonzero(column > TOL)
        if rows.size == 0:
            raise UnboundedError("objective is unbounded")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        degenerate_run = degenerate_run + 1 if best <= TOL else 0
        _pivot(T, row, col)
        basis[row] = col
    raise RuntimeError("simplex iteration limit reached")


def linprog(
    c: np.ndarray,
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
) -> LPResult:
    """Minimise ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    The primal solution and the constraint duals are recomputed from the
    final basis with a direct solve, which removes most of the error that
    accumulates over pivots.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    # columns: x (n) | slacks (m_ub) | artificials (m)
    A = np.zeros((m, n + m_ub))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign

    n_real = n + m_ub
    T = np.zeros((m + 1, n_real + m + 1))
    T[:m, :n_real] = A
    T[:m, n_real : n_real + m] = np.eye(m)
    T[:m, -1] = b
    basis = []
    needs_art = np.ones(m, dtype=bool)
    for i in range(m):
        if i < m_ub and sign[i] > 0:
            basis.append(n + i)  # slack is already a unit column
            needs_art[i] = False
        else:
            basis.append(n_real + i)
    max_iter = 50 * (n_real + m) + 1000

    # phase one: minimise the sum of artificials that are in use
    if needs_art.any():
        T[m, n_real : n_real + m] = needs_art.astype(float)
        for i in np.flatnonzero(needs_art):
            T[m] -= T[i]
        allowed = np.ones(n_real + m, dtype=bool)
        allowed[n_real:] = False
        _iterate(T, basis, allowed, max_iter)
        if T[m, -1] < -1e-9 * max(1.0, np.abs(b).max()):
            raise InfeasibleError("constraints are infeasible")
        # drive leftover artificials out of the basis
        for i in range(m):
            if basis[i] >= n_real:
                candidates = np.flatnonzero(np.abs(T[i, :n_real]) > 1e-9)
                if candidates.size:
                    _pivot(T, i, int(candidates[0]))
                    basis[i] = int(candidates[0])

    keep = [i for i in range(m) if basis[i] < n_real]
    cost = np.concatenate([c, np.zeros(m_ub)])
    T[m, :] = 0.0
    T[m, :n_real] = cost
    for i in keep:
        T[m] -= cost[basis[i]] * T[i]
    allowed = np.zeros(n_real + m, dtype=bool)
    allowed[:n_real] = True
    _iterate(T, basis, allowed, max_iter)

    keep = [i for i in range(m) if basis[i] < n_real]
    cols = [basis[i] for i in keep]
    B = A[keep][:, cols]
    xb = np.linalg.solve(B, b[keep])
    y = np.zeros(m)
    y[keep] = np.linalg.solve(B.T, cost[cols])
    full = np.zeros(n_real)
    full[cols] = xb
    x = full[:n]
    return LPResult(x=x, fun=float(c @ x), basis=cols, duals=y * sign)
