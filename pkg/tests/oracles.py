"""Independent reference implementations used only by the tests.

None of these share code with the package: they are deliberately naive.
"""

import itertools

import numpy as np


def brute_force_combinations(times, lookahead, tol=1e-9):
    """All id sequences (no feints) with total < L and total + min_time >= L.

    ``times`` maps id -> total time. Grows every sequence whose total stays
    below ``L`` one level at a time, then filters by the window.
    """
    tmin = min(times.values())
    level = [((), 0.0)]
    out = set()
    while level:
        nxt = []
        for seq, total in level:
            for i, t in times.items():
                if total + t < lookahead - tol:
                    nxt.append((seq + (i,), total + t))
        for seq, total in nxt:
            if total + tmin >= lookahead - tol:
                out.add(seq)
        level = nxt
    return out


def support_enumeration_value(A):
    """Value of the zero-sum game ``A`` (row player maximises).

    Tries every pair of equal-size supports, solves the indifference
    equations and keeps the first pair that forms an equilibrium.
    """
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    best = None
    for k in range(1, min(m, n) + 1):
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                sub = A[np.ix_(rows, cols)]
                # x over rows: x @ sub = v * 1, sum x = 1
                M = np.zeros((k + 1, k + 1))
                M[:k, :k] = sub.T
                M[:k, k] = -1.0
                M[k, :k] = 1.0
                rhs = np.zeros(k + 1)
                rhs[k] = 1.0
                N = np.zeros((k + 1, k + 1))
                N[:k, :k] = sub
                N[:k, k] = -1.0
                N[k, :k] = 1.0
                try:
                    xs = np.linalg.solve(M, rhs)
                    ys = np.linalg.solve(N, rhs)
                except np.linalg.LinAlgError:
                    continue
                x, v = xs[:k], xs[k]
                y, w = ys[:k], ys[k]
                if x.min() < -1e-9 or y.min() < -1e-9 or abs(v - w) > 1e-7:
                    continue
                xf = np.zeros(m)
                xf[list(rows)] = x
                yf = np.zeros(n)
                yf[list(cols)] = y
                if (xf @ A).min() >= v - 1e-7 and (A @ yf).max() <= v + 1e-7:
                    return float(v)
    return best


def fictitious_play_bounds(A, iters=20000):
    """Lower and upper bounds on the game value from fictitious play."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    rc = np.zeros(m)
    cc = np.zeros(n)
    i, j = 0, 0
    lo, hi = -np.inf, np.inf
    for t in range(1, iters + 1):
        rc[i] += 1
        cc[j] += 1
        lo = max(lo, (rc / t @ A).min())
        hi = min(hi, (A @ (cc / t)).max())
        i = int(np.argmax(A @ cc))
        j = int(np.argmin(rc @ A))
    return lo, hi


def palindrome_ok(poses, eps):
    n = len(poses)
    return all(np.linalg.norm(np.subtract(poses[k], poses[n - 1 - k])) <= eps for k in range(n))
