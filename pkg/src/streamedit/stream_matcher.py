"""Streaming k-edit matcher: one randomized copy and the ensemble of copies.

A copy decomposes the pattern into blocks, sends all but the last ``R``
blocks (encoded) to a mismatch engine, then decomposes the text the same
way.  Each text block that becomes definite is committed: its encoding
goes to the engine, and if the engine window is within ``K`` mismatches
of the pattern, the differing block pairs are decoded and their edit
distances summed into ``m_s``.  After every text symbol the report is
``m_{s-d}`` plus the distances between the last ``R`` pattern blocks and
the last ``R`` text blocks, capped at ``k``.  Every finite report is an
upper bound on the true distance; the ensemble returns the minimum over
independently seeded copies.
"""

from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

from .bk_decompose import DecompParams, Hashes, RollingDecomposer
from .edit_engine import FallbackState, ed_str, suffix_min_str
from .grammar_core import GrammarError, evaluate
from .grammar_encode import EncodeError, EncParams, decode, encode
from .mismatch_engine import EngineError, PhaseError, ReferenceEngine
from .rand_hash import SeedTree

INF = math.inf

PATTERN, TEXT, FALLBACK = "pattern", "text", "fallback"


class StreamTooLong(RuntimeError):
    def __init__(self, pos: int, bound: int):
        super().__init__(f"stream length {pos} exceeds the bound N={bound}")
        self.pos = pos


class EnsembleFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class MatchConfig:
    k: int
    N: int
    seed: int = 0
    copies: int | None = None
    beta: int | None = None
    R: int | None = None
    S: int | None = None
    independence: int | None = None
    failure_exponent: int = 2

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.copies is not None and self.copies < 1:
            raise ValueError("copies must be positive")

    @property
    def n_copies(self) -> int:
        if self.copies is not None:
            return self.copies
        return max(1, 2 * math.ceil(math.log2(max(self.N, 2))))

    def decomp_params(self, seeds: SeedTree) -> DecompParams:
        n = self.N ** self.failure_exponent
        return DecompParams.for_bounds(
            n, self.k, seeds, beta=self.beta, R=self.R, S=self.S, independence=self.independence
        )

    @classmethod
    def from_env(cls, **kw) -> "MatchConfig":
        """Fill ``seed`` and ``copies`` from STREAMEDIT_SEED / STREAMEDIT_COPIES when not given."""
        if kw.get("seed") is None:
            kw["seed"] = int(os.environ.get("STREAMEDIT_SEED", "0"))
        if kw.get("copies") is None and os.environ.get("STREAMEDIT_COPIES"):
            kw["copies"] = int(os.environ["STREAMEDIT_COPIES"])
        return cls(**kw)


@dataclass
class _EdCache:
    """Edit distances keyed by (text interval, pattern block), valid across arrivals."""

    store: dict = field(default_factory=dict)

    def get(self, key, a: str, b: str, budget: int) -> int:
        hit = self.store.get(key)
        if hit is not None:
            d, bud = hit
            if d <= bud or bud >= budget:
                return d if d <= budget else budget + 1
        d = ed_str(a, b, budget)
        if len(self.store) > 4096:
            self.store.clear()
        self.store[key] = (d, budget)
        return d


class MatcherCopy:
    def __init__(self, cfg: MatchConfig, index: int):
        self.cfg = cfg
        self.k = cfg.k
        seeds = SeedTree(cfg.seed).child("copy", index)
        self.params = cfg.decomp_params(seeds.child("decomp"))
        self.R = self.params.R
        self.M = 2 * self.params.S
        self.K = (self.k + 1) * self.M
        n_engine = cfg.N ** cfg.failure_exponent * self.M
        self.enc = EncParams.create(self.M, n_engine, seeds.child("enc").seed)
        self.hashes = Hashes(self.params)
        self.phase = PATTERN
        self.dec = RollingDecomposer(self.params, self.hashes)
        self.engine = ReferenceEngine(self.M)
        self.poisoned = False
        self.reason = ""
        self._pat_def: deque = deque()  # definite pattern blocks not yet sent: (grammar, text)
        self.r = 0  # pattern blocks in total (known after end_pattern)
        self.r_sent = 0
        self.pattern_tail: list[str] = []
        self.fallback: FallbackState | None = None
        self.s = 0
        self.definite_ring: deque = deque(maxlen=self.R)  # (start, text) of committed text blocks
        self.m_ring: deque = deque(maxlen=self.R)  # m_{s-R+1..s}
        self.text_len = 0
        self._eds = _EdCache()

    # -- helpers ----------------------------------------------------------

    def poison(self, why: str) -> None:
        if not self.poisoned:
            self.poisoned = True
            self.reason = why

    def _check_dec(self) -> None:
        if self.dec.failed:
            self.poison("decomposition lost definiteness")
        elif self.dec.oversize:
            self.poison("block grammar over the size cap")

    # -- pattern phase ----------------------------------------------------

    def push_pattern_symbol(self, a: str) -> None:
        if self.phase != PATTERN:
            raise PhaseError("pattern phase is over")
        if self.poisoned:
            return
        self._pat_def.extend(self.dec.append(a))
        self._check_dec()
        if self.poisoned:
            return
        t = len(self.dec.bounds)
        while self._pat_def and len(self._pat_def) + t > 2 * self.R:
            self._send_pattern_block(self._pat_def.popleft()[0])

    def _send_pattern_block(self, g) -> None:
        try:
            self.engine.feed_pattern_many(encode(g, self.enc).coords)
        except EncodeError as exc:
            self.poison(f"encoding failed: {exc}")
        self.r_sent += 1

    def end_pattern(self) -> None:
        if self.phase != PATTERN:
            raise PhaseError("end_pattern called twice")
        if not self.poisoned:
            rest = list(self._pat_def) + self.dec.finish()
            self._check_dec()
        self._pat_def.clear()
        if self.poisoned:
            # a poisoned copy never falls back: its pattern blocks are incomplete
            self.phase = TEXT
            self.engine = None
            return
        self.r = self.r_sent + len(rest)
        if self.r <= self.R:
            # short pattern: every block is still here, so the pattern is too
            self.phase = FALLBACK
            self.fallback = FallbackState("".join(t for _, t in rest), self.k)
            self.engine = None
            self.dec = None
            return
        head = len(rest) - self.R
        for g, _ in rest[:head]:
            self._send_pattern_block(g)
        self.pattern_tail = [t for _, t in rest[head:]]
        self.engine.end_pattern()
        self.phase = TEXT
        self.dec = RollingDecomposer(self.params, self.hashes)

    # -- text phase -------------------------------------------------------

    def push_text_symbol(self, a: str) -> float:
        self.text_len += 1
        if self.phase == FALLBACK:
            v = self.fallback.step(a)
            return INF if v is None else v
        if self.phase != TEXT:
            raise PhaseError("text before end_pattern")
        if self.poisoned:
            return INF
        dec = self.dec
        newly = dec.append(a)
        self._check_dec()
        if self.poisoned:
            return INF
        lo = dec.frontier - sum(len(t) for _, t in newly)
        for g, text in newly:
            self.commit_grammar(g, text, lo)
            lo += len(text)
            if self.poisoned:
                return INF
        return self.query_distance()

    def commit_grammar(self, g, text: str, start: int = -1) -> None:
        try:
            self.engine.feed_text_many(encode(g, self.enc).coords)
        except EncodeError as exc:
            self.poison(f"encoding failed: {exc}")
            return
        self.s += 1
        committed = self.r - self.R  # pattern blocks held by the engine
        m = INF
        if self.s >= committed:
            try:
                m = self._window_value()
            except (EngineError, EncodeError, GrammarError) as exc:
                self.poison(f"mismatch recovery failed: {exc}")
                return
        self.m_ring.append(m)
        self.definite_ring.append((start, text))

    def _window_value(self) -> float:
        ham = self.engine.query_window(self.K)
        if ham is None:
            return INF
        if ham == 0:
            return 0
        recs = self.engine.recover_mismatches()
        M = self.M
        chunks: dict[int, int] = {}
        for rec in recs:
            idx = (rec.pos - 1) // M
            chunks[idx] = chunks.get(idx, 0) + 1
        if any(c != M for c in chunks.values()):
            raise EncodeError("partial mismatch run")
        budget = self.k
        total = 0
        for idx in sorted(chunks):
            tc, pc = self.engine.window_chunk(idx)
            tx = evaluate(decode(tc, self.enc))
            px = evaluate(decode(pc, self.enc))
            if idx == 0:
                d, _ = suffix_min_str(tx, px, budget - total)
            else:
                d = ed_str(tx, px, budget - total)
            total += d
            if total > budget:
                return INF
        return total

    def query_distance(self) -> float:
        t = len(self.dec.bounds)
        d = self.R - t
        committed = self.r - self.R
        idx = self.s - d  # index of the m value to use
        if idx < max(committed, 1) or idx < self.s - len(self.m_ring) + 1:
            return INF
        total = self.m_ring[idx - self.s - 1]
        if total > self.k:
            return INF
        k = self.k
        tail = self.pattern_tail
        ring = self.definite_ring
        cache = self._eds
        for i in range(d):
            start, text = ring[len(ring) - d + i]
            total += cache.get((start, -1, i), text, tail[i], k - total)
            if total > k:
                return INF
        dec = self.dec
        for j, (lo, hi) in enumerate(dec.active_intervals()):
            i = d + j
            total += cache.get((lo, hi, i), dec.text(lo, hi), tail[i], k - total)
            if total > k:
                return INF
        return total

    # -- accounting -------------------------------------------------------

    def state_words(self) -> dict[str, int]:
        """Live words per component; the engine's pattern and window are listed separately."""
        out = {
            "decomposer": self.dec.state_words() if self.dec is not None else 0,
            "pattern_tail": sum(len(t) for t in self.pattern_tail),
            "definite_ring": sum(len(t) + 1 for _, t in self.definite_ring),
            "m_ring": len(self.m_ring),
            "fallback": self.fallback.words() if self.fallback is not None else 0,
            "engine_pattern": self.engine.pattern_words() if self.engine is not None else 0,
            "engine_window": self.engine.window_words() if self.engine is not None else 0,
        }
        return out


class Ensemble:
    """Independent copies; the report is the minimum over their reports."""

    def __init__(self, cfg: MatchConfig, shortcut_fallback: bool = True):
        self.cfg = cfg
        self.shortcut_fallback = shortcut_fallback
        self.copies = [MatcherCopy(cfg, i) for i in range(cfg.n_copies)]
        self.pos = 0
        self.phase = PATTERN
        self.last: list[float] = []
        self._exact: MatcherCopy | None = None

    def push_pattern_symbol(self, a: str) -> None:
        if self.phase != PATTERN:
            raise PhaseError("pattern phase is over")
        self._advance()
        for c in self.copies:
            c.push_pattern_symbol(a)

    def end_pattern(self) -> None:
        if self.phase != PATTERN:
            raise PhaseError("end_pattern called twice")
        for c in self.copies:
            c.end_pattern()
        self.phase = TEXT
        # a copy in fallback mode is exact, so it alone decides every report
        if self.shortcut_fallback:
            self._exact = next((c for c in self.copies if c.phase == FALLBACK), None)

    def push_text_symbol(self, a: str) -> float:
        if self.phase != TEXT:
            raise PhaseError("text before end_pattern")
        self._advance()
        if self._exact is not None:
            v = self._exact.push_text_symbol(a)
            self.last = [v]
            return v
        reports = [c.push_text_symbol(a) for c in self.copies]
        self.last = reports
        if all(c.poisoned for c in self.copies):
            raise EnsembleFailure("every copy is poisoned")
        return min(reports)

    def _advance(self) -> None:
        self.pos += 1
        if self.pos > self.cfg.N:
            raise StreamTooLong(self.pos, self.cfg.N)

    @property
    def fallback(self) -> bool:
        return any(c.phase == FALLBACK for c in self.copies)

    def state_words(self) -> list[dict[str, int]]:
        return [c.state_words() for c in self.copies]


def run_match(pattern: Iterable[str], text: Iterable[str], cfg: MatchConfig) -> Iterable[float]:
    """Yield one report per text symbol (an int, or ``math.inf`` for above k)."""
    ens = Ensemble(cfg)
    for a in pattern:
        ens.push_pattern_symbol(a)
    ens.end_pattern()
    for a in text:
        yield ens.push_text_symbol(a)
