"""Streaming K-mismatch engine over encoded grammar coordinates.

:class:`MismatchEngine` is the interface the matcher talks to.
:class:`ReferenceEngine` implements it exactly: it stores the pattern and
the most recent pattern-length window of text, grouped into chunks of
``chunk`` coordinates (one chunk per committed grammar), so a query at a
chunk boundary only inspects chunks whose keys differ.  A small-space
engine can replace it behind the same interface.
"""

from __future__ import annotations

from collections import deque
from operator import ne
from typing import NamedTuple, Protocol, Sequence


class EngineError(RuntimeError):
    pass


class PhaseError(EngineError):
    pass


class WindowIncomplete(EngineError):
    pass


class StalenessError(EngineError):
    pass


class MismatchRecord(NamedTuple):
    pos: int  # 1-based coordinate within the pattern
    text_sym: int
    pat_sym: int


class MismatchEngine(Protocol):
    def feed_pattern(self, sym: int) -> None: ...
    def end_pattern(self) -> None: ...
    def feed_text(self, sym: int) -> None: ...
    def query_window(self, K: int) -> int | None: ...
    def recover_mismatches(self) -> list[MismatchRecord]: ...


class ReferenceEngine:
    """Exact engine; ``query_window`` returns the Hamming distance or None when above ``K``."""

    def __init__(self, chunk: int):
        if chunk < 1:
            raise ValueError("chunk size must be positive")
        self.chunk = chunk
        self._pat: list[tuple[int, ...]] = []
        self._pat_keys: list[int] = []
        self._buf: list[int] = []
        self._text_phase = False
        self._win: deque = deque()
        self._fed = 0  # text coordinates received
        self._query_at = -1  # text length at the last successful query
        self._diff: list[int] = []  # chunk indices that differed at that query

    # pattern phase

    def feed_pattern(self, sym: int) -> None:
        if self._text_phase:
            raise PhaseError("pattern already ended")
        self._buf.append(sym)
        if len(self._buf) == self.chunk:
            self._push_pattern_chunk(tuple(self._buf))
            self._buf = []

    def feed_pattern_many(self, syms: Sequence[int]) -> None:
        if self._text_phase:
            raise PhaseError("pattern already ended")
        if not self._buf and len(syms) == self.chunk:
            self._push_pattern_chunk(tuple(syms))
            return
        for s in syms:
            self.feed_pattern(s)

    def _push_pattern_chunk(self, c: tuple[int, ...]) -> None:
        self._pat.append(c)
        self._pat_keys.append(hash(c))

    def end_pattern(self) -> None:
        if self._text_phase:
            raise PhaseError("end_pattern called twice")
        if self._buf:
            # a trailing partial chunk is padded with zeros, which never occur as coordinates
            self._buf.extend([0] * (self.chunk - len(self._buf)))
            self._push_pattern_chunk(tuple(self._buf))
            self._buf = []
        self._text_phase = True

    @property
    def pattern_length(self) -> int:
        return len(self._pat) * self.chunk + (len(self._buf) if not self._text_phase else 0)

    # text phase

    def feed_text(self, sym: int) -> None:
        if not self._text_phase:
            raise PhaseError("text before end_pattern")
        self._buf.append(sym)
        self._fed += 1
        if len(self._buf) == self.chunk:
            self._push_text_chunk(tuple(self._buf))
            self._buf = []

    def feed_text_many(self, syms: Sequence[int]) -> None:
        if not self._text_phase:
            raise PhaseError("text before end_pattern")
        if not self._buf and len(syms) == self.chunk:
            self._fed += self.chunk
            self._push_text_chunk(tuple(syms))
            return
        for s in syms:
            self.feed_text(s)

    def _push_text_chunk(self, c: tuple[int, ...]) -> None:
        self._win.append((hash(c), c))
        if len(self._win) > len(self._pat):
            self._win.popleft()

    def query_window(self, K: int) -> int | None:
        if not self._text_phase:
            raise PhaseError("query before end_pattern")
        if self._buf:
            raise EngineError("queries are only answered at chunk boundaries")
        npat = len(self._pat)
        if npat == 0:
            return None
        if len(self._win) < npat:
            raise WindowIncomplete(f"window holds {len(self._win)} of {npat} chunks")
        total = 0
        diff = []
        for idx, ((key, c), pk, p) in enumerate(zip(self._win, self._pat_keys, self._pat)):
            if key == pk and c == p:
                continue
            total += sum(map(ne, c, p))
            diff.append(idx)
            if total > K:
                self._query_at = -1
                return None
        self._query_at = self._fed
        self._diff = diff
        return total

    def recover_mismatches(self) -> list[MismatchRecord]:
        if self._query_at != self._fed:
            raise StalenessError("no valid query for the current window")
        out = []
        M = self.chunk
        for idx in self._diff:
            c, p = self._win[idx][1], self._pat[idx]
            base = idx * M
            out.extend(MismatchRecord(base + j + 1, a, b) for j, (a, b) in enumerate(zip(c, p)) if a != b)
        return out

    def window_chunk(self, idx: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """(text, pattern) coordinates of window chunk ``idx`` (0-based); for decoding."""
        return self._win[idx][1], self._pat[idx]

    def pattern_chunk(self, idx: int) -> tuple[int, ...]:
        return self._pat[idx]

    @property
    def pattern_chunks(self) -> int:
        return len(self._pat)

    def pattern_words(self) -> int:
        return len(self._pat) * self.chunk

    def window_words(self) -> int:
        return len(self._win) * self.chunk + len(self._buf)
