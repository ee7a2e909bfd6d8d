"""Locally consistent decomposition of a string into grammar blocks.

The parse forest is built level by level.  Each level first collapses
maximal runs ``a^r`` into power nodes and then pairs neighbours greedily
between local minima of a pairwise hash ``C_i`` of the node content.
Pair nodes created at a level whose base span is at most ``span_cap``
are *marked* when an ``independence``-wise hash ``H_i`` of their
fingerprint hits zero; the leftmost leaf of every marked node (plus
position 0) starts a block.  A block's grammar is the forest restricted
to the block interval, with a fresh start symbol chained over the
covering nodes.

Two implementations of the same map exist on purpose:
:func:`decompose_batch` rebuilds everything from scratch, and
:class:`RollingDecomposer` appends one symbol at a time, recomputing
only the unstable tail of every level.  Positions are 0-based inside
this module; the public block boundaries reported by
:meth:`BlockSeq.boundaries` are 1-based.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .grammar_core import EMPTY, PAIR, POWER, Grammar, Rule, canonicalize
from .rand_hash import P61, HashFamily, SeedTree, field_stream, sample_family

# Node layout: (fp, span, kind, left, right, key)
#   terminal: left = char code, right = None
#   pair:     left, right = child nodes
#   power:    left = base node, right = repetition count; key = base fp
FP, SPAN, KIND, LEFT, RIGHT, KEY = range(6)
TERM, PAIRK, POWK = 0, 1, 2

# Mean number of markable pair nodes per base position (measured on
# random strings over a 26-letter alphabet with the default marking knobs).
MARK_DENSITY = 0.6


class Oversize(Exception):
    """A block grammar exceeded the size cap (reported as a flag, not raised by the batch path)."""


class DefinitenessViolation(Exception):
    pass


@dataclass(frozen=True)
class DecompParams:
    n: int
    k: int
    L: int
    R: int
    S: int
    beta: int
    seeds: SeedTree
    independence: int = 64
    span_cap: int = 32
    mark_levels: int = 2
    span_min: int = 2
    depth: int = 3
    context: int = 0

    def __post_init__(self) -> None:
        if self.beta < 2:
            raise ValueError("beta must be at least 2")
        if self.S < self.beta:
            raise ValueError("S must be at least beta")
        if self.R < 1:
            raise ValueError("R must be positive")
        if not 1 <= self.mark_levels <= self.depth:
            raise ValueError("mark_levels must lie in [1, depth]")

    @staticmethod
    def levels_for(n: int) -> int:
        return math.ceil(math.log(max(n, 2)) / math.log(1.5)) + 3

    @classmethod
    def for_bounds(
        cls,
        n: int,
        k: int,
        seeds: SeedTree,
        *,
        beta: int | None = None,
        R: int | None = None,
        S: int | None = None,
        independence: int | None = None,
        span_cap: int = 32,
        span_min: int = 2,
        mark_levels: int = 2,
        depth: int = 3,
        context: int = 0,
    ) -> "DecompParams":
        L = cls.levels_for(n)
        if beta is None:
            beta = max(64, k * math.ceil(math.log2(max(n, 2))))
        if S is None:
            S = 8 * beta
        if R is None:
            R = 4 * L
        if independence is None:
            independence = min(S, 64)
        depth = min(L, depth)
        return cls(n, k, L, R, S, beta, seeds, independence, span_cap, min(depth, mark_levels), span_min, depth, context)

    @property
    def mark_range(self) -> int:
        return max(2, round(self.beta * MARK_DENSITY))


class Hashes:
    """Sampled functions for one decomposition instance (one matcher copy)."""

    def __init__(self, params: DecompParams):
        self.params = params
        seeds = params.seeds
        stream = field_stream(seeds.child("kr-base").seed)
        base = next(stream)
        while base < 2:
            base = next(stream)
        self.base = base
        self.levels = params.depth
        self.mark_levels = params.mark_levels
        self.C: list[HashFamily] = [
            sample_family(seeds.child("C", i).seed, "pairwise", P61) for i in range(params.L + 1)
        ]
        rng = params.mark_range
        self.H: list[HashFamily] = [
            sample_family(seeds.child("H", i).seed, "twise", rng, params.independence)
            for i in range(params.L + 1)
        ]
        self.span_cap = params.span_cap
        self.span_min = params.span_min
        self.context = params.context
        self.ctx_pow = pow(base, params.context, P61)
        self._pow = [1]
        for _ in range(4096):
            self._pow.append(self._pow[-1] * base % P61)
        self._marks: dict[tuple[int, int], bool] = {}
        self._inv: dict[int, int] = {}

    def bpow(self, e: int) -> int:
        if e < 4097:
            return self._pow[e]
        return pow(self.base, e, P61)

    def term(self, c: int) -> tuple:
        fp = c + 1
        return (fp, 1, TERM, c, None, fp)

    def pair(self, u: tuple, v: tuple) -> tuple:
        fp = (u[0] * self.bpow(v[1]) + v[0]) % P61
        return (fp, u[1] + v[1], PAIRK, u, v, fp)

    def power(self, b: tuple, cnt: int) -> tuple:
        # fp(b^cnt) = fp(b) * (g^cnt - 1) / (g - 1) with g = base^span(b)
        s = b[1]
        inv = self._inv.get(s)
        if inv is None:
            g = self.bpow(s)
            inv = 0 if g == 1 else pow(g - 1, P61 - 2, P61)
            self._inv[s] = inv
        if inv == 0:
            fp = b[0] * cnt % P61
        else:
            fp = b[0] * ((self.bpow(s * cnt) - 1) % P61) % P61 * inv % P61
        return (fp, s * cnt, POWK, b, cnt, b[KEY])

    def chash(self, level: int, key: int) -> int:
        a, b = self.C[level].coeffs
        return (a * key + b) % P61

    def eligible(self, level: int, node: tuple, start: int) -> bool:
        sp = node[SPAN]
        return level <= self.mark_levels and self.span_min <= sp <= self.span_cap and start >= self.context

    def marked(self, level: int, node: tuple, ctx: int) -> bool:
        """Whether an eligible pair node starts a block.

        ``ctx`` is the fingerprint of the ``context`` base symbols before
        the node; the hashed key is the fingerprint of context and node
        together, which keeps the decision content-diverse on tiny alphabets.
        """
        x = (ctx * self.bpow(node[SPAN]) + node[0]) % P61
        ck = (level, x)
        hit = self._marks.get(ck)
        if hit is None:
            f = self.H[level]
            acc = 0
            for c in f.coeffs:
                acc = (acc * x + c) % P61
            hit = acc % f.range == 0
            if len(self._marks) > 1 << 16:
                self._marks.clear()
            self._marks[ck] = hit
        return hit


# --------------------------------------------------------------------------
# Level reduction (batch form)


class ReducedLevel(NamedTuple):
    nodes: list
    starts: list
    created: list  # True where the node is a pair formed at this level


def run_collapse(nodes: Sequence[tuple], starts: Sequence[int], hashes: Hashes) -> tuple[list, list]:
    out, out_s = [], []
    i, n = 0, len(nodes)
    while i < n:
        j = i + 1
        fp = nodes[i][0]
        while j < n and nodes[j][0] == fp:
            j += 1
        out.append(nodes[i] if j - i == 1 else hashes.power(nodes[i], j - i))
        out_s.append(starts[i])
        i = j
    return out, out_s


def reduce_level(
    nodes: Sequence[tuple], starts: Sequence[int], level: int, hashes: Hashes, chash=None
) -> ReducedLevel:
    """One reduction step: collapse runs, then pair between local minima.

    ``chash`` overrides the local-minimum hash (a callable on node keys);
    by default the level's pairwise function ``C_level`` is used.
    """
    ys, ystarts = run_collapse(nodes, starts, hashes)
    if chash is None:
        keys = [hashes.chash(level, y[KEY]) for y in ys]
    else:
        keys = [chash(y[KEY]) for y in ys]
    q = len(ys)
    out, out_s, created = [], [], []
    u = 0
    while u < q:
        v = u + 1
        if v < q and not (keys[v] < keys[u] and (v + 1 >= q or keys[v] < keys[v + 1])):
            out.append(hashes.pair(ys[u], ys[v]))
            created.append(True)
            out_s.append(ystarts[u])
            u += 2
        else:
            out.append(ys[u])
            created.append(False)
            out_s.append(ystarts[u])
            u += 1
    return ReducedLevel(out, out_s, created)


def prefix_fps(x: str, base: int) -> list[int]:
    """Karp-Rabin fingerprints of all prefixes of ``x`` (terminal c counts as c + 1)."""
    pre = [0]
    acc = 0
    for ch in x:
        acc = (acc * base + ord(ch) + 1) % P61
        pre.append(acc)
    return pre


def build_forest(x: str, hashes: Hashes) -> tuple[list[list], list[list], list[int]]:
    """Levels 0..depth of the forest, plus the sorted mark positions."""
    nodes = [hashes.term(ord(ch)) for ch in x]
    starts = list(range(len(x)))
    all_nodes, all_starts = [nodes], [starts]
    pre = prefix_fps(x, hashes.base)
    w, bw = hashes.context, hashes.ctx_pow
    marks = set()
    for level in range(1, hashes.levels + 1):
        red = reduce_level(nodes, starts, level, hashes)
        for node, st, cr in zip(red.nodes, red.starts, red.created):
            if cr and hashes.eligible(level, node, st):
                if hashes.marked(level, node, (pre[st] - pre[st - w] * bw) % P61):
                    marks.add(st)
        nodes, starts = red.nodes, red.starts
        all_nodes.append(nodes)
        all_starts.append(starts)
    return all_nodes, all_starts, sorted(marks)


def mark_boundaries(length: int, marks: Iterable[int]) -> list[int]:
    """Sorted 0-based block starts: position 0 plus every mark."""
    if length == 0:
        return []
    return sorted({0, *(m for m in marks if 0 <= m < length)})


def blocks_from_boundaries(bounds: Sequence[int], length: int) -> list[tuple[int, int]]:
    """Half-open block intervals from sorted block starts."""
    return [(b, bounds[i + 1] if i + 1 < len(bounds) else length) for i, b in enumerate(bounds)]


# --------------------------------------------------------------------------
# Block grammars


def _cover(node: tuple, start: int, lo: int, hi: int, hashes: Hashes, out: list) -> None:
    """Append the maximal sub-nodes of ``node`` (at ``start``) lying inside [lo, hi)."""
    end = start + node[SPAN]
    if end <= lo or start >= hi:
        return
    if lo <= start and end <= hi:
        out.append(node)
        return
    kind = node[KIND]
    if kind == PAIRK:
        u = node[LEFT]
        _cover(u, start, lo, hi, hashes, out)
        _cover(node[RIGHT], start + u[SPAN], lo, hi, hashes, out)
        return
    # power: full copies inside the interval collapse to one power node
    base = node[LEFT]
    w = base[SPAN]
    first = max(0, (lo - start + w - 1) // w)  # first copy starting at or after lo
    last = min(node[RIGHT], (hi - start) // w)  # copies [first, last) fully inside
    if first > 0 and start + first * w > lo:
        _cover(base, start + (first - 1) * w, lo, hi, hashes, out)
    if last > first:
        cnt = last - first
        out.append(base if cnt == 1 else hashes.power(base, cnt))
    elif last < first:
        # interval lies strictly inside a single copy
        _cover(base, start + last * w, lo, hi, hashes, out)
        return
    if last < node[RIGHT] and start + last * w < hi:
        _cover(base, start + last * w, lo, hi, hashes, out)


def grammar_of_cover(cover: Sequence[tuple]) -> Grammar:
    """Canonical grammar whose start chains the covering nodes left to right."""
    if not cover:
        return EMPTY
    ids: dict[int, int] = {}
    rules: list[Rule] = []
    nxt = [-2]

    def sym(node: tuple) -> int:
        if node[KIND] == TERM:
            return node[LEFT]
        s = ids.get(node[0])
        if s is not None:
            return s
        # iterative post-order so deep forests do not hit the recursion limit
        stack = [(node, False)]
        while stack:
            nd, done = stack.pop()
            if nd[KIND] == TERM or nd[0] in ids:
                continue
            if done:
                sid = nxt[0]
                nxt[0] -= 1
                if nd[KIND] == PAIRK:
                    rules.append(Rule(sid, PAIR, _sid(nd[LEFT]), _sid(nd[RIGHT])))
                else:
                    rules.append(Rule(sid, POWER, _sid(nd[LEFT]), nd[RIGHT]))
                ids[nd[0]] = sid
                continue
            stack.append((nd, True))
            if nd[KIND] == PAIRK:
                stack.append((nd[RIGHT], False))
                stack.append((nd[LEFT], False))
            else:
                stack.append((nd[LEFT], False))
        return ids[node[0]]

    def _sid(nd: tuple) -> int:
        return nd[LEFT] if nd[KIND] == TERM else ids[nd[0]]

    syms = [sym(nd) for nd in cover]
    if len(syms) == 1:
        s = syms[0]
        if s >= 0:
            return Grammar((), s)
        return canonicalize(Grammar(tuple(rules), s))
    # right-nested chain: # -> c1 X1, X1 -> c2 X2, ...
    tail = syms[-1]
    for s in reversed(syms[1:-1]):
        sid = nxt[0]
        nxt[0] -= 1
        rules.append(Rule(sid, PAIR, s, tail))
        tail = sid
    rules.append(Rule(-1, PAIR, syms[0], tail))
    return canonicalize(Grammar(tuple(rules), -1))


def block_grammar(top: Sequence[tuple], top_starts: Sequence[int], lo: int, hi: int, hashes: Hashes) -> Grammar:
    j = bisect_right(top_starts, lo) - 1
    j = max(j, 0)
    cover: list = []
    while j < len(top) and top_starts[j] < hi:
        _cover(top[j], top_starts[j], lo, hi, hashes, cover)
        j += 1
    return grammar_of_cover(cover)


# --------------------------------------------------------------------------
# Batch decomposition


@dataclass
class BlockSeq:
    grammars: list[Grammar]
    total_len: int
    intervals: list[tuple[int, int]] = field(default_factory=list)
    oversize: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.grammars)

    def boundaries(self) -> list[int]:
        """1-based block start positions."""
        return [lo + 1 for lo, _ in self.intervals]


def decompose_batch(x: str, params: DecompParams, hashes: Hashes | None = None) -> BlockSeq:
    if hashes is None:
        hashes = Hashes(params)
    if not x:
        return BlockSeq([], 0)
    levels, starts, marks = build_forest(x, hashes)
    bounds = mark_boundaries(len(x), marks)
    intervals = blocks_from_boundaries(bounds, len(x))
    top, top_s = levels[-1], starts[-1]
    grammars, oversize = [], []
    for idx, (lo, hi) in enumerate(intervals):
        g = block_grammar(top, top_s, lo, hi, hashes)
        if g.size > params.S:
            oversize.append(idx)
        grammars.append(g)
    return BlockSeq(grammars, len(x), intervals, oversize)


# --------------------------------------------------------------------------
# --------------------------------------------------------------------------
# Rolling decomposition
#
# Each level keeps two record lists with absolute indexing (list index +
# offset, since old records are trimmed from the front):
#   x: (node, start, lo, hi, created)  lo/hi index the previous level's runs
#   y: (node, start, lo, hi, key)      lo/hi index this level's x; key = C_i value


class _Lvl:
    __slots__ = ("x", "xoff", "y", "yoff", "marks")

    def __init__(self) -> None:
        self.x: list = []
        self.xoff = 0
        self.y: list = []
        self.yoff = 0
        self.marks: list = []  # sorted start positions of marked nodes of this level


class RollingDecomposer:
    """Single-writer rolling decomposition of a growing string.

    After each :meth:`append` the blocks are ``definite ++ active`` where
    definite blocks were handed out by earlier calls and never change,
    and at most ``R`` active blocks remain provisional.  Every append
    recomputes only the tail of each level that can still change.
    """

    KEEP = 12  # records kept per level behind the definite frontier

    def __init__(self, params: DecompParams, hashes: Hashes | None = None):
        self.params = params
        self.hashes = hashes if hashes is not None else Hashes(params)
        self.R = params.R
        self.levels = [_Lvl() for _ in range(self.hashes.levels + 1)]
        self._ck = [h.coeffs for h in self.hashes.C]
        self._eager = self.hashes.mark_levels
        self._pending: int | None = None  # first changed index feeding the lazy levels
        self.pos = 0
        self.frontier = 0  # start of the first active block
        self.bounds: list[int] = []  # active block starts, first one is the frontier
        self.raw: list[str] = []
        self.pre: list[int] = [0]  # pre[j]: fingerprint of the first raw_off + j symbols
        self.raw_off = 0
        self.failed = False
        self.oversize = False
        self.emitted = 0

    # -- public -----------------------------------------------------------

    def append(self, ch: str) -> list[tuple[Grammar, str]]:
        """Append one symbol; return the blocks that just became definite."""
        h = self.hashes
        pos = self.pos
        self.levels[0].x.append((h.term(ord(ch)), pos, -1, -1, False))
        self.raw.append(ch)
        self.pre.append((self.pre[-1] * h.base + ord(ch) + 1) % P61)
        self.pos = pos + 1
        change, pmin = pos, pos
        for i in range(1, self._eager + 1):
            res = self._rebuild(i, change)
            if res is None:
                break
            change, p = res
            if p < pmin:
                pmin = p
        else:
            # levels above the marking ones only shape grammars: update them lazily
            if self._pending is None or change < self._pending:
                self._pending = change
        self._refresh_bounds(pmin)
        nb = len(self.bounds)
        if nb <= self.R:
            return []
        cut = nb - self.R
        b = self.bounds
        out = [self._extract(b[j], b[j + 1]) for j in range(cut)]
        self.frontier = b[cut]
        del b[:cut]
        self.emitted += cut
        self._trim()
        return out

    def _catch_up(self) -> None:
        c = self._pending
        self._pending = None
        if c is None:
            return
        for i in range(self._eager + 1, len(self.levels)):
            res = self._rebuild(i, c)
            if res is None:
                break
            c = res[0]

    def finish(self) -> list[tuple[Grammar, str]]:
        """Hand out every remaining active block (end of input)."""
        out = [self._extract(lo, hi) for lo, hi in self.active_intervals()]
        self.emitted += len(out)
        self.frontier = self.pos
        self.bounds = []
        return out

    def active_intervals(self) -> list[tuple[int, int]]:
        b = self.bounds
        return [(lo, b[j + 1] if j + 1 < len(b) else self.pos) for j, lo in enumerate(b)]

    def active_grammars(self) -> list[Grammar]:
        return [self._extract(lo, hi)[0] for lo, hi in self.active_intervals()]

    def text(self, lo: int, hi: int) -> str:
        off = self.raw_off
        return "".join(self.raw[lo - off:hi - off])

    def state_words(self) -> int:
        """Machine words held by the rolling state (one per record field)."""
        total = len(self.raw) + len(self.bounds)
        for lv in self.levels:
            total += 5 * (len(lv.x) + len(lv.y)) + len(lv.marks)
        return total

    # -- internals --------------------------------------------------------

    def _extract(self, lo: int, hi: int) -> tuple[Grammar, str]:
        self._catch_up()
        top = self.levels[-1]
        x = top.x
        a, b = 0, len(x)
        while a < b:  # last record starting at or before lo
            mid = (a + b) // 2
            if x[mid][1] <= lo:
                a = mid + 1
            else:
                b = mid
        j = max(a - 1, 0)
        cover: list = []
        h = self.hashes
        while j < len(x) and x[j][1] < hi:
            _cover(x[j][0], x[j][1], lo, hi, h, cover)
            j += 1
        g = grammar_of_cover(cover)
        if g.size > self.params.S:
            self.oversize = True
        return g, self.text(lo, hi)

    def _rebuild(self, i: int, c: int) -> tuple[int, int] | None:
        """Recompute level ``i`` after level ``i-1`` changed from index ``c`` on.

        Returns the first changed index of level ``i`` and its start
        position, or None when level ``i`` came out identical.
        """
        h = self.hashes
        lo, hi = self.levels[i - 1], self.levels[i]
        X, xoff = lo.x, lo.xoff
        xend = xoff + len(X)
        # runs of level i-1: restart at the run holding index c-1
        Y, yoff = lo.y, lo.yoff
        k = len(Y) - 1
        cm1 = c - 1
        while k >= 0 and Y[k][3] >= cm1:
            k -= 1
        k += 1
        if k < len(Y):
            xs0 = Y[k][2]
        else:
            xs0 = Y[-1][3] + 1 if Y else xoff
        if xs0 < xoff:
            self.failed = True
            xs0 = xoff
        if c > xs0:
            cnt, scan = c - xs0, c
            base = X[xs0 - xoff][0]
        else:
            cnt, scan, base = 0, xs0, None
        old_y = Y[k:]
        del Y[k:]
        ca, cb = self._ck[i]
        power = h.power
        bfp = base[0] if base is not None else None
        runlo = xs0
        for idx in range(scan, xend):
            node = X[idx - xoff][0]
            if cnt and node[0] == bfp:
                cnt += 1
                continue
            if cnt:
                yn = base if cnt == 1 else power(base, cnt)
                Y.append((yn, X[runlo - xoff][1], runlo, idx - 1, (ca * yn[5] + cb) % P61))
            base, bfp, cnt, runlo = node, node[0], 1, idx
        if cnt:
            yn = base if cnt == 1 else power(base, cnt)
            Y.append((yn, X[runlo - xoff][1], runlo, xend - 1, (ca * yn[5] + cb) % P61))
        cy = k
        for a, b in zip(old_y, Y[k:]):
            if a[0][0] != b[0][0] or a[4] != b[4]:
                break
            cy += 1
        if cy == len(Y) and len(old_y) == len(Y) - k:
            return None
        cy += yoff
        # pairing into level i: restart at the first record reaching cy-2
        Z, zoff = hi.x, hi.xoff
        kz = len(Z) - 1
        cm2 = cy - 2
        while kz >= 0 and Z[kz][3] >= cm2:
            kz -= 1
        kz += 1
        if kz < len(Z):
            u = Z[kz][2]
        else:
            u = Z[-1][3] + 1 if Z else yoff
        if u < yoff:
            self.failed = True
            u = yoff
        old_z = Z[kz:]
        del Z[kz:]
        q = yoff + len(Y)
        pair = h.pair
        while u < q:
            ru = Y[u - yoff]
            v = u + 1
            if v < q:
                rv = Y[v - yoff]
                kv = rv[4]
                if not (kv < ru[4] and (v + 1 >= q or kv < Y[v + 1 - yoff][4])):
                    Z.append((pair(ru[0], rv[0]), ru[1], u, v, True))
                    u += 2
                    continue
            Z.append((ru[0], ru[1], u, u, False))
            u += 1
        cz = kz
        for a, b in zip(old_z, Z[kz:]):
            # equal content can still differ in whether the pair was formed here (only those mark)
            if a[0][0] != b[0][0] or a[4] != b[4]:
                break
            cz += 1
        if cz - kz == len(old_z) and len(Z) == cz:
            return None
        # marks of level i from the first changed record on
        p = Z[cz][1] if cz < len(Z) else old_z[cz - kz][1]
        F = self.frontier
        marks = hi.marks
        cut = bisect_left(marks, p)
        if p < F:
            # a change inside committed territory breaks definiteness
            if cz < len(Z) and Z[cz][1] + Z[cz][0][1] <= F:
                self.failed = True
            if cz - kz < len(old_z) and old_z[cz - kz][1] + old_z[cz - kz][0][1] <= F:
                self.failed = True
            before = marks[cut:bisect_right(marks, F)]
        del marks[cut:]
        if i <= h.mark_levels:
            eligible, marked = h.eligible, h.marked
            pre, poff = self.pre, self.raw_off
            w, bw = h.context, h.ctx_pow
            for t in range(cz, len(Z)):
                r = Z[t]
                st = r[1]
                if r[4] and eligible(i, r[0], st):
                    if marked(i, r[0], (pre[st - poff] - pre[st - w - poff] * bw) % P61):
                        marks.append(st)
        if p < F and marks[cut:bisect_right(marks, F)] != before:
            self.failed = True
        return cz + zoff, p

    def _refresh_bounds(self, pmin: int) -> None:
        b = self.bounds
        del b[bisect_left(b, pmin):]
        F = self.frontier
        lo = max(pmin, F)
        fresh = set()
        if lo == 0:
            fresh.add(0)
        if F >= pmin and F > 0:
            # the frontier must still start a block
            if not any(_contains(lv.marks, F) for lv in self.levels):
                self.failed = True
            fresh.add(F)
        for lv in self.levels:
            m = lv.marks
            if m and m[-1] >= lo:
                fresh.update(m[bisect_left(m, lo):])
        if fresh:
            b.extend(sorted(fresh))

    def _trim(self) -> None:
        F = self.frontier
        keep = self.KEEP
        for lv in self.levels:
            j = _first_reaching(lv.x, F) - keep
            if j > 256:
                del lv.x[:j]
                lv.xoff += j
            j = _first_reaching(lv.y, F) - keep
            if j > 256:
                del lv.y[:j]
                lv.yoff += j
            m = lv.marks
            j = bisect_left(m, F)
            if j > 64:
                del m[:j]
        j = F - self.raw_off - 64
        if j > 4096:
            del self.raw[:j], self.pre[:j]
            self.raw_off += j


def _first_reaching(recs: list, pos: int) -> int:
    """Index of the first record whose start is at least ``pos``."""
    a, b = 0, len(recs)
    while a < b:
        mid = (a + b) // 2
        if recs[mid][1] < pos:
            a = mid + 1
        else:
            b = mid
    return a


def _contains(sorted_list: list[int], x: int) -> bool:
    i = bisect_left(sorted_list, x)
    return i < len(sorted_list) and sorted_list[i] == x


def decompose_incremental(x: str, params: DecompParams, hashes: Hashes | None = None) -> tuple[list[Grammar], list[Grammar], bool]:
    """Feed ``x`` symbol by symbol; return (definite, active, failed)."""
    dec = RollingDecomposer(params, hashes)
    definite: list[Grammar] = []
    for ch in x:
        definite.extend(g for g, _ in dec.append(ch))
    return definite, dec.active_grammars(), dec.failed
