import random

import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def naive_expand(g) -> str:
    """Rewrite the start symbol until only terminals remain (independent of evaluate)."""
    if g.start is None:
        return ""
    rules = g.rule_map()
    seq = [g.start]
    while any(s < 0 for s in seq):
        out = []
        for s in seq:
            if s >= 0:
                out.append(s)
                continue
            r = rules[s]
            out.extend([r.a, r.b] if r.kind == "pair" else [r.a] * r.b)
        seq = out
    return "".join(map(chr, seq))


def random_grammar(rnd: random.Random, n_rules: int, alphabet: str = "abc"):
    """Random acyclic grammar: rule i only refers to terminals and rules defined before it."""
    from streamedit.grammar_core import PAIR, POWER, Grammar, Rule

    rules = []
    syms = [ord(c) for c in alphabet]
    for i in range(n_rules):
        lhs = -2 - i
        if rnd.random() < 0.3:
            rules.append(Rule(lhs, POWER, rnd.choice(syms), rnd.randint(2, 4)))
        else:
            rules.append(Rule(lhs, PAIR, rnd.choice(syms), rnd.choice(syms)))
        syms.append(lhs)
    top = rules[-1]
    rules[-1] = top._replace(lhs=-1)
    return Grammar(tuple(rules), -1)


@pytest.fixture
def rnd():
    return random.Random(12345)
