"""Fixed-length randomized encoding of grammars.

A canonical grammar is serialized to one packed word per rule.  Every
coordinate of the encoding carries a payload word together with a tag
derived from a Karp-Rabin fingerprint of the whole serialization, so two
different grammars disagree in every coordinate unless the fingerprint
collides, while the payload words alone still decode the grammar.

Coordinate ``i`` is the integer ``word_i * P61 + tag_i + 1`` which lies
in ``[1, 2 * alpha]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grammar_core import EMPTY, PAIR, POWER, Grammar, GrammarError, Rule, canonicalize
from .rand_hash import P61, field_stream

FIELD_BITS = 48
FIELD_MASK = (1 << FIELD_BITS) - 1
KIND_PAIR, KIND_POWER, KIND_TERMINAL_START = 1, 2, 3
PAD = 0
WORD_BITS = 2 + 3 * FIELD_BITS
LIMB_BITS = 60


class EncodeError(ValueError):
    pass


class TooBig(EncodeError):
    pass


class Malformed(EncodeError):
    pass


class TagMismatch(EncodeError):
    pass


@dataclass(frozen=True)
class EncParams:
    M: int
    alpha: int
    eval_points: tuple[int, ...]
    fp_base: int
    p: int = P61

    def __post_init__(self) -> None:
        if len(self.eval_points) != self.M:
            raise ValueError("need exactly M evaluation points")
        if len(set(self.eval_points)) != self.M:
            raise ValueError("evaluation points must be distinct")
        if self.alpha < (1 << WORD_BITS) * P61 // 2:
            raise ValueError("alpha too small to hold a coordinate")

    @property
    def payload_slots(self) -> int:
        return self.M

    @classmethod
    def create(cls, M: int, n_bound: int, seed: int) -> "EncParams":
        """Sample parameters with 2M/alpha <= 1/n_bound."""
        need = max(2 * M * max(n_bound, 1), (1 << WORD_BITS) * P61 // 2)
        alpha = 1 << math.ceil(math.log2(need))
        stream = field_stream(seed)
        fp_base = next(stream)
        while fp_base < 2:
            fp_base = next(stream)
        x0 = next(stream) or 1
        step = next(stream) or 1
        # an arithmetic progression of nonzero residues: distinct for M < P61
        pts = []
        v = x0
        for _ in range(M):
            if v == 0:
                v = (v + step) % P61
            pts.append(v)
            v = (v + step) % P61
        if len(set(pts)) != M:
            raise ValueError("evaluation points collided")
        return cls(M, alpha, tuple(pts), fp_base)


@dataclass(frozen=True)
class EncodedGrammar:
    coords: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.coords)


def _sym_code(s: int) -> int:
    # terminals even, nonterminals odd; canonical ids stay small
    code = 2 * s if s >= 0 else -2 * s - 1
    if code > FIELD_MASK:
        raise TooBig(f"symbol {s} does not fit a {FIELD_BITS}-bit field")
    return code


def _sym_decode(code: int) -> int:
    return code // 2 if code % 2 == 0 else -(code + 1) // 2


def serialize(g: Grammar, slots: int) -> list[int]:
    """Packed rule words padded with ``PAD`` to exactly ``slots`` entries."""
    c = canonicalize(g)
    if c.start is None:
        words = []
    elif c.start >= 0:
        words = [KIND_TERMINAL_START | (_sym_code(c.start) << 2)]
    else:
        words = []
        for r in c.rules:
            kind = KIND_PAIR if r.kind == PAIR else KIND_POWER
            if r.kind == POWER and r.b > FIELD_MASK:
                raise TooBig(f"exponent {r.b} does not fit")
            b = _sym_code(r.b) if r.kind == PAIR else r.b
            words.append(kind | (_sym_code(r.lhs) << 2) | (_sym_code(r.a) << 50) | (b << 98))
    if len(words) > slots:
        raise TooBig(f"grammar of size {len(words)} exceeds {slots} slots")
    return words + [PAD] * (slots - len(words))


def deserialize(words: list[int] | tuple[int, ...]) -> Grammar:
    rules = []
    ended = False
    for w in words:
        if w == PAD:
            ended = True
            continue
        if ended:
            raise Malformed("record after padding")
        if w < 0 or w >> WORD_BITS:
            raise Malformed("word out of range")
        kind = w & 3
        lhs = _sym_decode((w >> 2) & FIELD_MASK)
        a = _sym_decode((w >> 50) & FIELD_MASK)
        braw = (w >> 98) & FIELD_MASK
        if kind == KIND_TERMINAL_START:
            if len(words) and words[0] != w or any(x != PAD for x in words[1:]):
                raise Malformed("terminal start must be the only record")
            if lhs < 0:
                raise Malformed("terminal start carries a nonterminal")
            return Grammar((), lhs)
        if kind == KIND_PAIR:
            rules.append(Rule(lhs, PAIR, a, _sym_decode(braw)))
        elif kind == KIND_POWER:
            rules.append(Rule(lhs, POWER, a, braw))
        else:
            raise Malformed(f"unknown record kind {kind}")
    if not rules:
        return EMPTY
    try:
        g = Grammar(tuple(rules), -1)
        if canonicalize(g) != g:
            raise Malformed("records are not in canonical form")
    except GrammarError as exc:
        raise Malformed(str(exc)) from exc
    return g


def fingerprint(words: list[int], base: int) -> int:
    """Karp-Rabin fingerprint of the serialization split into 60-bit limbs (each limb counts as limb + 1)."""
    acc = 0
    lmask = (1 << LIMB_BITS) - 1
    end = len(words)
    while end and words[end - 1] == PAD:
        end -= 1
    for w in words[:end]:
        for shift in (0, 60, 120):
            acc = (acc * base + ((w >> shift) & lmask) + 1) % P61
    pads = 3 * (len(words) - end)
    if pads:
        # each pad limb maps acc -> acc * base + 1
        g = pow(base, pads, P61)
        acc = (acc * g + (g - 1) * pow(base - 1, P61 - 2, P61)) % P61
    return acc


def _tags(f: int, ep: EncParams) -> list[int]:
    return [x * f % P61 for x in ep.eval_points]


def encode_words(words: list[int], ep: EncParams) -> EncodedGrammar:
    f = fingerprint(words, ep.fp_base)
    return EncodedGrammar(tuple(w * P61 + t + 1 for w, t in zip(words, _tags(f, ep))))


def encode(g: Grammar, ep: EncParams) -> EncodedGrammar:
    return encode_words(serialize(g, ep.M), ep)


def split(e: EncodedGrammar | tuple[int, ...]) -> tuple[list[int], list[int]]:
    coords = e.coords if isinstance(e, EncodedGrammar) else e
    words, tags = [], []
    for c in coords:
        if c < 1:
            raise Malformed("coordinate below 1")
        w, t = divmod(c - 1, P61)
        words.append(w)
        tags.append(t)
    return words, tags


def decode(e: EncodedGrammar | tuple[int, ...], ep: EncParams) -> Grammar:
    words, tags = split(e)
    if len(words) != ep.M:
        raise Malformed(f"expected {ep.M} coordinates, got {len(words)}")
    if tags != _tags(fingerprint(words, ep.fp_base), ep):
        raise TagMismatch("stored tags disagree with the payload")
    return deserialize(words)
