"""Ground truth: exact minimum edit distance of the pattern to a text suffix, per position."""

from __future__ import annotations

import sys
from functools import lru_cache

import numpy as np

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    pass


def oracle_all_positions(P: str, T: str, budget: int = DEFAULT_BUDGET) -> list[int]:
    """Entry l-1 is min over a of ED(T[a..l], P), for every text position l.

    Full semi-global DP, one numpy column over the pattern per text symbol.
    """
    m, n = len(P), len(T)
    if m * n > budget:
        raise BudgetExceeded(f"{m} x {n} cells exceed the budget of {budget}")
    if m == 0:
        return [0] * n
    pat = np.array([ord(c) for c in P], dtype=np.int64)
    rows = np.arange(m + 1, dtype=np.int64)
    col = rows.copy()
    out = np.empty(n, dtype=np.int64)
    cand = np.empty(m + 1, dtype=np.int64)
    for ell, ch in enumerate(T):
        # diagonal and horizontal moves; row 0 stays 0 (free text prefix)
        cand[0] = 0
        np.minimum(col[:-1] + (pat != ord(ch)), col[1:] + 1, out=cand[1:])
        # vertical moves: D[i] = min_j<=i (cand[j] + i - j)
        np.minimum.accumulate(cand - rows, out=col)
        col += rows
        out[ell] = col[m]
    return out.tolist()


def oracle_recursive(P: str, T: str) -> list[int]:
    """Independent memoized recursion for small inputs."""
    m = len(P)
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10 * (m + len(T)) + 1000))
    try:

        @lru_cache(maxsize=None)
        def best(i: int, j: int) -> int:
            # least cost aligning P[:i] against some suffix of T[:j]
            if i == 0:
                return 0
            if j == 0:
                return i
            return min(
                best(i - 1, j - 1) + (P[i - 1] != T[j - 1]),
                best(i - 1, j) + 1,
                best(i, j - 1) + 1,
            )

        return [best(m, j) for j in range(1, len(T) + 1)]
    finally:
        sys.setrecursionlimit(old)


def edit_distance(a: str, b: str) -> int:
    """Plain quadratic edit distance (test oracle)."""
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]
