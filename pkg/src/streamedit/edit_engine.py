"""Threshold edit distance kernels and the online fallback matcher.

``ed_bounded`` and ``ed_suffix_min`` use diagonal extension (O(k^2)
extension steps, each run of equal characters measured by slice
comparison), so their cost does not grow with block length when the
blocks are similar.  Inputs are grammars or plain strings.
"""

from __future__ import annotations

from typing import NamedTuple, Union

from .grammar_core import Grammar, evaluate


class _OverK:
    __slots__ = ()

    def __repr__(self) -> str:
        return "OverK"

    def __bool__(self) -> bool:
        return False


OVER_K = _OverK()


class SuffixMatch(NamedTuple):
    d: int
    start: int  # 1-based start of the best suffix in x


Blockish = Union[Grammar, str]


def _text(g: Blockish) -> str:
    return g if isinstance(g, str) else evaluate(g)


def _lcp(a: str, i: int, b: str, j: int) -> int:
    """Length of the longest common prefix of a[i:] and b[j:]."""
    n = min(len(a) - i, len(b) - j)
    if n <= 0 or a[i] != b[j]:
        return 0
    if n < 8:
        t = 1
        while t < n and a[i + t] == b[j + t]:
            t += 1
        return t
    if a[i:i + n] == b[j:j + n]:
        return n
    lo, hi = 1, n  # a[i:i+lo] matches, a[i:i+hi] does not
    step = 8
    while lo + step < hi and a[i:i + lo + step] == b[j:j + lo + step]:
        lo += step
        step *= 2
    hi = min(hi, lo + step)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a[i:i + mid] == b[j:j + mid]:
            lo = mid
        else:
            hi = mid
    return lo


def ed_str(a: str, b: str, k: int) -> int:
    """Edit distance of ``a`` and ``b`` if it is at most ``k``, else ``k + 1``."""
    if k < 0:
        return 0 if a == b else k + 1
    n, m = len(a), len(b)
    if abs(n - m) > k:
        return k + 1
    # strip the common prefix and suffix
    p = _lcp(a, 0, b, 0)
    if p == n and p == m:
        return 0
    a, b = a[p:], b[p:]
    n, m = n - p, m - p
    s = 0
    while s < n and s < m and a[n - 1 - s] == b[m - 1 - s]:
        s += 1
    if s:
        a, b = a[:n - s], b[:m - s]
        n, m = n - s, m - s
    if n == 0 or m == 0:
        return max(n, m)
    target = m - n
    # row[diag] = furthest i reached on diagonal diag (j = i + diag)
    prev = {0: _lcp(a, 0, b, 0)}
    if target == 0 and prev[0] >= n:
        return 0
    neg = -1
    for d in range(1, k + 1):
        cur = {}
        for diag in range(-d, d + 1):
            i = max(prev.get(diag, neg) + 1, prev.get(diag + 1, neg) + 1, prev.get(diag - 1, neg))
            if i > n:
                i = n
            if i + diag > m:
                i = m - diag
            if i < 0 or i + diag < 0:
                continue
            i += _lcp(a, i, b, i + diag)
            cur[diag] = i
        if cur.get(target, -1) >= n:
            return d
        prev = cur
    return k + 1


def ed_bounded(gx: Blockish, gy: Blockish, k: int):
    """Exact edit distance (an int) when it is at most ``k``, else ``OVER_K``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    d = ed_str(_text(gx), _text(gy), k)
    return d if d <= k else OVER_K


def suffix_min_str(x: str, y: str, k: int) -> tuple[int, int]:
    """(d, 0-based start) of the best suffix of ``x`` against ``y``; d = k+1 when none is within ``k``.

    Among minimizers the longest suffix (smallest start) is returned.
    """
    rx, ry = x[::-1], y[::-1]
    n, m = len(rx), len(ry)
    if m == 0:
        return 0, n  # the empty suffix matches exactly
    # align all of ry against a prefix of rx: done when j reaches m
    neg = -1
    first = _lcp(rx, 0, ry, 0)
    if first >= m:
        # every diagonal reaching j = m at cost 0 is diagonal 0
        return 0, n - m
    prev = {0: first}
    for d in range(1, k + 1):
        cur = {}
        best_i = -1
        for diag in range(-d, d + 1):
            i = max(prev.get(diag, neg) + 1, prev.get(diag + 1, neg) + 1, prev.get(diag - 1, neg))
            if i > n:
                i = n
            if i + diag > m:
                i = m - diag
            if i < 0 or i + diag < 0:
                continue
            i += _lcp(rx, i, ry, i + diag)
            cur[diag] = i
            if i + diag == m and i > best_i:
                best_i = i
        if best_i >= 0:
            return d, n - best_i
        prev = cur
    return k + 1, -1


def ed_suffix_min(gx: Blockish, gy: Blockish, k: int) -> SuffixMatch | None:
    """Minimum edit distance between ``y`` and any suffix of ``x``; None if all exceed ``k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    d, start = suffix_min_str(_text(gx), _text(gy), k)
    if d > k:
        return None
    return SuffixMatch(d, start + 1)


class FallbackState:
    """Semi-global DP column over the pattern, kept as bit vectors.

    Bit ``i`` of ``vp`` (``vn``) says that column entry ``i + 1`` is one
    more (less) than entry ``i``; entry 0 is always 0 because the text
    prefix is free.  ``score`` is the bottom entry, the least edit
    distance between the pattern and a suffix of the text read so far.
    """

    __slots__ = ("P", "k", "peq", "mask", "high", "vp", "vn", "score")

    def __init__(self, pattern: str, k: int):
        if k < 0:
            raise ValueError("k must be non-negative")
        self.P = pattern
        self.k = k
        m = len(pattern)
        peq: dict[str, int] = {}
        for i, c in enumerate(pattern):
            peq[c] = peq.get(c, 0) | (1 << i)
        self.peq = peq
        self.mask = (1 << m) - 1
        self.high = 1 << (m - 1) if m else 0
        self.vp = self.mask
        self.vn = 0
        self.score = m

    def step(self, a: str) -> int | None:
        """Consume one text symbol; return the current distance or None when above ``k``."""
        if not self.P:
            return 0
        mask, vp, vn = self.mask, self.vp, self.vn
        eq = self.peq.get(a, 0)
        xv = eq | vn
        xh = (((eq & vp) + vp) & mask ^ vp) | eq
        hp = vn | (~(xh | vp) & mask)
        hn = vp & xh
        if hp & self.high:
            self.score += 1
        elif hn & self.high:
            self.score -= 1
        hp = (hp << 1) & mask
        hn = (hn << 1) & mask
        self.vp = hn | (~(xv | hp) & mask)
        self.vn = hp & xv
        return self.score if self.score <= self.k else None

    def words(self) -> int:
        # two bit vectors of |P| bits, the pattern and its match masks
        return 2 * ((len(self.P) + 63) // 64) + len(self.P) + len(self.peq) * ((len(self.P) + 63) // 64)


def online_fallback_step(state: FallbackState, a: str) -> tuple[FallbackState, int | None]:
    return state, state.step(a)
