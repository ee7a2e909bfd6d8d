"""Deterministic straight-line grammars with pair and power rules.

Symbols are plain ints.  A non-negative int is a terminal and stands for
the character ``chr(code)``; a negative int is a nonterminal.  After
:func:`canonicalize` the start nonterminal is ``-1`` and the remaining
nonterminals are ``-2, -3, ...`` in first-visit depth-first order.

Two degenerate shapes are allowed besides ordinary grammars: a grammar
whose start is a terminal (it derives that one character and has no
rules) and the empty grammar (``start is None``, derives ``""``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

PAIR = "pair"
POWER = "power"
DEFAULT_MAX_LEN = 1 << 24


class GrammarError(ValueError):
    pass


class CycleDetected(GrammarError):
    pass


class TooLong(GrammarError):
    pass


class Undefined(GrammarError):
    pass


class OutOfRange(GrammarError):
    pass


class NonDeterministic(GrammarError):
    pass


class Rule(NamedTuple):
    lhs: int
    kind: str
    a: int
    b: int  # second symbol of a pair, exponent of a power

    def __str__(self) -> str:
        if self.kind == PAIR:
            return f"{sym_name(self.lhs)} -> {sym_name(self.a)} {sym_name(self.b)}"
        return f"{sym_name(self.lhs)} -> {sym_name(self.a)} ^ {self.b}"


def is_terminal(sym: int) -> bool:
    return sym >= 0


def sym_name(sym: int) -> str:
    if sym >= 0:
        return repr(chr(sym))
    if sym == -1:
        return "#"
    return f"N{-sym - 1}"


@dataclass(frozen=True)
class Grammar:
    rules: tuple[Rule, ...]
    start: int | None
    _size: list = field(default_factory=list, compare=False, repr=False)

    def __post_init__(self) -> None:
        seen = set()
        for r in self.rules:
            if r.lhs >= 0:
                raise GrammarError(f"terminal {r.lhs} used as a left-hand side")
            if r.lhs in seen:
                raise NonDeterministic(f"two rules for {sym_name(r.lhs)}")
            seen.add(r.lhs)
            if r.kind == POWER:
                if r.b < 2:
                    raise GrammarError(f"power exponent {r.b} < 2")
            elif r.kind != PAIR:
                raise GrammarError(f"unknown rule kind {r.kind!r}")
        if self.start is None:
            if self.rules:
                raise GrammarError("empty grammar cannot carry rules")
        elif self.start < 0 and self.start not in seen:
            raise Undefined(f"start {sym_name(self.start)} has no rule")

    @classmethod
    def build(cls, rules: Iterable[Rule | tuple], start: int | None) -> "Grammar":
        """Construct a grammar, substituting away power rules with exponent 1."""
        rules = [Rule(*r) for r in rules]
        alias = {r.lhs: r.a for r in rules if r.kind == POWER and r.b == 1}

        def resolve(s: int) -> int:
            hops = 0
            while s in alias:
                s = alias[s]
                hops += 1
                if hops > len(alias):
                    raise CycleDetected("cycle of unit power rules")
            return s

        kept = []
        for r in rules:
            if r.lhs in alias:
                continue
            b = resolve(r.b) if r.kind == PAIR else r.b
            kept.append(Rule(r.lhs, r.kind, resolve(r.a), b))
        return cls(tuple(kept), None if start is None else resolve(start))

    @property
    def size(self) -> int:
        return len(self.rules)

    def rule_map(self) -> dict[int, Rule]:
        return {r.lhs: r for r in self.rules}

    def __len__(self) -> int:
        return len(self.rules)


EMPTY = Grammar((), None)


def _sizes(g: Grammar) -> dict[int, int]:
    """Evaluation size of every reachable nonterminal, by one memoized DFS."""
    rules = g.rule_map()
    sizes: dict[int, int] = {}
    if g.start is None or g.start >= 0:
        return sizes
    on_stack = set()
    stack = [(g.start, False)]
    while stack:
        sym, done = stack.pop()
        if done:
            on_stack.discard(sym)
            r = rules[sym]
            if r.kind == PAIR:
                sizes[sym] = _sz(sizes, r.a) + _sz(sizes, r.b)
            else:
                sizes[sym] = _sz(sizes, r.a) * r.b
            continue
        if sym in sizes:
            continue
        if sym in on_stack:
            raise CycleDetected(f"cycle through {sym_name(sym)}")
        r = rules.get(sym)
        if r is None:
            raise Undefined(f"{sym_name(sym)} has no rule")
        on_stack.add(sym)
        stack.append((sym, True))
        children = (r.a, r.b) if r.kind == PAIR else (r.a,)
        for c in children:
            if c < 0 and c not in sizes:
                if c in on_stack:
                    raise CycleDetected(f"cycle through {sym_name(c)}")
                stack.append((c, False))
    return sizes


def _sz(sizes: dict[int, int], sym: int) -> int:
    return 1 if sym >= 0 else sizes[sym]


def eval_size(g: Grammar) -> int:
    if g._size:
        return g._size[0]
    if g.start is None:
        n = 0
    elif g.start >= 0:
        n = 1
    else:
        n = _sizes(g)[g.start]
    g._size.append(n)
    return n


def evaluate(g: Grammar, max_len: int = DEFAULT_MAX_LEN) -> str:
    """Expand ``g`` to its terminal string."""
    n = eval_size(g)
    if n > max_len:
        raise TooLong(f"expansion of {n} symbols exceeds {max_len}")
    if g.start is None:
        return ""
    if g.start >= 0:
        return chr(g.start)
    rules = g.rule_map()
    memo: dict[int, str] = {}

    def expand(sym: int) -> str:
        if sym >= 0:
            return chr(sym)
        s = memo.get(sym)
        if s is None:
            r = rules[sym]
            s = expand(r.a) + expand(r.b) if r.kind == PAIR else expand(r.a) * r.b
            memo[sym] = s
        return s

    # bottom-up over the DFS finishing order keeps recursion shallow
    for sym in _post_order(g, rules):
        expand(sym)
    return memo[g.start]


def _post_order(g: Grammar, rules: dict[int, Rule]) -> list[int]:
    order: list[int] = []
    seen = set()
    stack = [(g.start, False)]
    while stack:
        sym, done = stack.pop()
        if done:
            order.append(sym)
            continue
        if sym in seen:
            continue
        seen.add(sym)
        stack.append((sym, True))
        r = rules[sym]
        for c in ((r.b, r.a) if r.kind == PAIR else (r.a,)):
            if c < 0 and c not in seen:
                stack.append((c, False))
    return order


def reachable(g: Grammar) -> Grammar:
    """Drop rules not reachable from the start symbol."""
    if g.start is None or g.start >= 0:
        return Grammar((), g.start)
    rules = g.rule_map()
    keep = set(_post_order(g, rules))
    return Grammar(tuple(r for r in g.rules if r.lhs in keep), g.start)


def suffix_grammar(g: Grammar, m: int) -> Grammar:
    """Grammar for ``evaluate(g)[m-1:]`` (``m`` is 1-based).

    Walks the derivation path to position ``m`` and adds at most two
    fresh rules per level for the right remnants, so the result has at
    most ``|g| + 2 * depth`` rules.
    """
    n = eval_size(g)
    if m < 1 or m > n:
        raise OutOfRange(f"suffix start {m} outside [1, {n}]")
    if m == 1:
        return g
    sizes = _sizes(g)
    rules = g.rule_map()
    new_rules: list[Rule] = []
    next_id = min([r.lhs for r in g.rules] + [0]) - 1

    def fresh(kind: str, a: int, b: int) -> int:
        nonlocal next_id
        sym = next_id
        next_id -= 1
        new_rules.append(Rule(sym, kind, a, b))
        return sym

    def power(a: int, cnt: int) -> int:
        return a if cnt == 1 else fresh(POWER, a, cnt)

    sym, off = g.start, m - 1  # drop the first `off` symbols of eval(sym)
    pending: list[int] = []  # right remnants to append after the slice
    while off > 0:
        r = rules[sym]
        if r.kind == PAIR:
            left = _sz(sizes, r.a)
            if off < left:
                pending.append(r.b)
                sym = r.a
            else:
                sym, off = r.b, off - left
                continue
        else:
            w = _sz(sizes, r.a)
            skip, off = divmod(off, w)
            cnt = r.b - skip
            if off == 0:
                sym = power(r.a, cnt)
                break
            if cnt > 1:
                pending.append(power(r.a, cnt - 1))
            sym = r.a
    for tail in reversed(pending):
        sym = fresh(PAIR, sym, tail)
    return reachable(Grammar(g.rules + tuple(new_rules), sym))


def canonicalize(g: Grammar) -> Grammar:
    """Renumber nonterminals in first-visit depth-first order from the start."""
    if g.start is None or g.start >= 0:
        return Grammar((), g.start)
    rules = g.rule_map()
    ren: dict[int, int] = {}
    stack = [g.start]
    while stack:
        sym = stack.pop()
        if sym >= 0 or sym in ren:
            continue
        r = rules.get(sym)
        if r is None:
            raise Undefined(f"{sym_name(sym)} has no rule")
        ren[sym] = -1 - len(ren)
        if r.kind == PAIR:
            stack.append(r.b)
            stack.append(r.a)
        else:
            stack.append(r.a)
    out = []
    for old, new in ren.items():
        r = rules[old]
        a = ren.get(r.a, r.a)
        b = ren.get(r.b, r.b) if r.kind == PAIR else r.b
        out.append(Rule(new, r.kind, a, b))
    out.sort(key=lambda r: -r.lhs)
    canon = Grammar(tuple(out), -1)
    _sizes(canon)  # cycle check
    return canon


def dump(g: Grammar) -> str:
    """One rule per line, start first, canonical ids."""
    c = canonicalize(g)
    if c.start is None:
        return "# -> ''"
    if c.start >= 0:
        return f"# -> {sym_name(c.start)}"
    return "\n".join(str(r) for r in c.rules)


def grammar_from_string(s: str) -> Grammar:
    """Balanced pair grammar for ``s`` (runs collapse to power rules); test helper."""
    if not s:
        return EMPTY
    syms: list[int] = []
    rules: list[Rule] = []
    nxt = -2
    i = 0
    while i < len(s):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        if j - i >= 2:
            rules.append(Rule(nxt, POWER, ord(s[i]), j - i))
            syms.append(nxt)
            nxt -= 1
        else:
            syms.append(ord(s[i]))
        i = j
    while len(syms) > 1:
        merged = []
        for t in range(0, len(syms) - 1, 2):
            rules.append(Rule(nxt, PAIR, syms[t], syms[t + 1]))
            merged.append(nxt)
            nxt -= 1
        if len(syms) % 2:
            merged.append(syms[-1])
        syms = merged
    return canonicalize(Grammar(tuple(rules), syms[0]) if syms[0] < 0 else Grammar((), syms[0]))
