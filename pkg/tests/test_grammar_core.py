import random

import pytest
from hypothesis import given, strategies as st

from conftest import naive_expand, random_grammar
from streamedit.grammar_core import (
    EMPTY, PAIR, POWER, CycleDetected, Grammar, GrammarError, NonDeterministic, OutOfRange, Rule, TooLong,
    Undefined, canonicalize, dump, eval_size, evaluate, grammar_from_string, suffix_grammar,
)

A, B = ord("a"), ord("b")


def test_single_power_rule():
    assert evaluate(Grammar((Rule(-1, POWER, A, 3),), -1)) == "aaa"


def test_pair_of_powers():
    g = Grammar((Rule(-1, PAIR, -2, -3), Rule(-2, POWER, A, 2), Rule(-3, POWER, B, 2)), -1)
    assert evaluate(g) == "aabb"


def test_nested_doubling_matches_naive_rewriter():
    g = Grammar((Rule(-1, PAIR, -2, -2), Rule(-2, PAIR, -3, -3), Rule(-3, POWER, A, 2)), -1)
    assert evaluate(g) == naive_expand(g) == "a" * 8


def test_eval_size_examples():
    g = Grammar((Rule(-1, PAIR, -2, -3), Rule(-2, POWER, A, 5), Rule(-3, POWER, B, 7)), -1)
    assert eval_size(g) == 12
    assert eval_size(Grammar((Rule(-1, PAIR, -2, -2), Rule(-2, POWER, A, 2)), -1)) == 4


def test_exponent_one_is_rejected_or_normalized():
    with pytest.raises(GrammarError):
        Grammar((Rule(-1, POWER, A, 1),), -1)
    g = Grammar.build([(-1, PAIR, -2, B), (-2, POWER, A, 1)], -1)
    assert evaluate(g) == "ab" and all(r.kind == PAIR for r in g.rules)


def test_errors():
    with pytest.raises(CycleDetected):
        evaluate(Grammar((Rule(-1, PAIR, -2, A), Rule(-2, PAIR, -1, A)), -1))
    with pytest.raises(NonDeterministic):
        Grammar((Rule(-1, PAIR, A, B), Rule(-1, PAIR, B, A)), -1)
    with pytest.raises(Undefined):
        evaluate(Grammar((Rule(-1, PAIR, -5, A),), -1))
    with pytest.raises(TooLong):
        evaluate(Grammar((Rule(-1, POWER, A, 100),), -1), max_len=10)


def test_random_fifty_rule_grammars_size_matches_eval():
    rnd = random.Random(7)
    for _ in range(50):
        g = random_grammar(rnd, 50)
        assert eval_size(g) == len(naive_expand(g)) == len(evaluate(g))


def test_suffix_examples():
    g = Grammar((Rule(-1, POWER, A, 4),), -1)
    assert evaluate(suffix_grammar(g, 2)) == "aaa"
    h = grammar_from_string("abcabc")
    assert evaluate(suffix_grammar(h, 4)) == "abc"
    assert evaluate(suffix_grammar(h, 1)) == "abcabc"
    with pytest.raises(OutOfRange):
        suffix_grammar(h, 7)


@given(st.text(alphabet="ab", min_size=1, max_size=60), st.data())
def test_suffix_property(s, data):
    g = grammar_from_string(s)
    m = data.draw(st.integers(1, len(s)))
    h = suffix_grammar(g, m)
    assert evaluate(h) == s[m - 1:]
    assert h.size <= 3 * max(g.size, 1) + 2


@given(st.integers(0, 10**6))
def test_suffix_on_random_grammars(seed):
    rnd = random.Random(seed)
    g = random_grammar(rnd, rnd.randint(1, 12))
    x = evaluate(g)
    m = rnd.randint(1, len(x))
    assert evaluate(suffix_grammar(g, m)) == x[m - 1:]


def test_canonicalize_examples():
    g = grammar_from_string("abcabcab")
    assert canonicalize(g) == g
    perm = Grammar((Rule(-1, PAIR, -7, -9), Rule(-9, POWER, B, 2), Rule(-7, POWER, A, 3)), -1)
    perm2 = Grammar((Rule(-1, PAIR, -3, -2), Rule(-2, POWER, B, 2), Rule(-3, POWER, A, 3)), -1)
    assert canonicalize(perm) == canonicalize(perm2)


@given(st.integers(0, 10**6))
def test_canonicalize_idempotent_and_eval_preserving(seed):
    g = random_grammar(random.Random(seed), 10)
    c = canonicalize(g)
    assert canonicalize(c) == c
    assert evaluate(c) == evaluate(g)


def test_dump_format():
    g = Grammar((Rule(-1, PAIR, -2, -3), Rule(-2, POWER, A, 2), Rule(-3, POWER, B, 3)), -1)
    lines = dump(g).splitlines()
    assert lines[0].startswith("# -> ")
    assert any("^ 3" in ln for ln in lines)
    assert evaluate(EMPTY) == ""
