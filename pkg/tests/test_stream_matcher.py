import math
import random

import pytest

from streamedit.bk_decompose import decompose_batch
from streamedit.grammar_core import canonicalize
from streamedit.grammar_encode import decode
from streamedit.mismatch_engine import PhaseError
from streamedit.oracle import oracle_all_positions
from streamedit.stream_matcher import (
    FALLBACK, INF, TEXT, Ensemble, EnsembleFailure, MatchConfig, MatcherCopy, StreamTooLong, run_match,
)
from streamedit.workloads import mutate, random_string

FAST = dict(beta=64, R=4)


def _feed(target, P, T):
    for a in P:
        target.push_pattern_symbol(a)
    target.end_pattern()
    return [target.push_text_symbol(a) for a in T]


def test_first_symbol():
    c = MatcherCopy(MatchConfig(k=1, N=100, **FAST), 0)
    c.push_pattern_symbol("a")
    assert len(c.dec.active_intervals()) == 1 and c.r_sent == 0


def test_pattern_blocks_match_batch():
    rnd = random.Random(1)
    P = random_string(rnd, 10**4, 4)
    c = MatcherCopy(MatchConfig(k=1, N=2 * 10**4, beta=32, R=6), 0)
    for a in P:
        c.push_pattern_symbol(a)
    assert not c.poisoned
    eng = c.engine
    sent = [decode(eng.pattern_chunk(i), c.enc) for i in range(eng.pattern_chunks)]
    held = [canonicalize(g) for g, _ in c._pat_def] + [canonicalize(g) for g in c.dec.active_grammars()]
    want = [canonicalize(g) for g in decompose_batch(P, c.params).grammars]
    assert sent + held == want
    c.end_pattern()
    assert c.phase == TEXT and eng.pattern_length == (c.r - c.R) * c.M


def test_short_pattern_falls_back():
    c = MatcherCopy(MatchConfig(k=1, N=100, **FAST), 0)
    c.push_pattern_symbol("a")
    c.push_pattern_symbol("b")
    c.end_pattern()
    assert c.phase == FALLBACK
    with pytest.raises(PhaseError):
        c.end_pattern()
    with pytest.raises(PhaseError):
        c.push_pattern_symbol("a")


def test_poisoned_pattern_pushes_are_noops():
    c = MatcherCopy(MatchConfig(k=1, N=1000, **FAST), 0)
    c.dec.oversize = True
    c.push_pattern_symbol("a")
    assert c.poisoned
    before = c.dec.pos
    c.push_pattern_symbol("b")
    assert c.dec.pos == before
    c.end_pattern()
    assert c.push_text_symbol("a") == INF


def test_exact_occurrence_k0():
    rnd = random.Random(2)
    P = random_string(rnd, 400, 4)
    out = _feed(Ensemble(MatchConfig(k=0, N=800, seed=1, **FAST)), P, P)
    assert out[-1] == 0


def test_one_substitution_k1():
    rnd = random.Random(3)
    P = random_string(rnd, 500, 26)
    occ = P[:250] + ("a" if P[250] != "a" else "b") + P[251:]
    T = random_string(rnd, 300, 26) + occ + random_string(rnd, 100, 26)
    cfg = MatchConfig(k=1, N=len(P) + len(T), seed=4, **FAST)
    out = _feed(Ensemble(cfg, shortcut_fallback=False), P, T)
    orc = oracle_all_positions(P, T)
    assert orc[299 + len(occ)] == 1 and out[299 + len(occ)] == 1
    assert all(v >= o for v, o in zip(out, orc))


def test_noise_is_over_k():
    rnd = random.Random(4)
    P = random_string(rnd, 500, 26)
    T = random_string(rnd, 800, 26)
    assert min(oracle_all_positions(P, T)) > 2
    assert all(v == INF for v in _feed(Ensemble(MatchConfig(k=2, N=1300, **FAST)), P, T))


def test_k0_matches_exact_matcher():
    rnd = random.Random(5)
    P = random_string(rnd, 300, 2)
    T = random_string(rnd, 100, 2) + P + random_string(rnd, 50, 2) + P
    out = _feed(Ensemble(MatchConfig(k=0, N=len(P) + len(T), seed=2, **FAST)), P, T)
    for i, v in enumerate(out, 1):
        assert (v == 0) == T[:i].endswith(P)


def test_interior_edits_sum():
    rnd = random.Random(6)
    P = random_string(rnd, 900, 26)
    occ = P[:450] + P[451:600] + "z" + P[600:]  # a deletion and an insertion
    T = random_string(rnd, 200, 26) + occ + random_string(rnd, 60, 26)
    end = 200 + len(occ)
    orc = oracle_all_positions(P, T)
    ens = Ensemble(MatchConfig(k=3, N=len(P) + len(T), seed=3, **FAST), shortcut_fallback=False)
    out = _feed(ens, P, T)
    assert out[end - 1] == orc[end - 1] == 2
    assert all(v >= o for v, o in zip(out, orc))


def test_too_many_edits_is_over_k():
    rnd = random.Random(7)
    P = random_string(rnd, 900, 26)
    occ = list(P)
    for pos in (100, 300, 500, 700):
        occ[pos] = "#"
    T = random_string(rnd, 100, 26) + "".join(occ)
    assert min(oracle_all_positions(P, T)) == 4
    out = _feed(Ensemble(MatchConfig(k=3, N=len(P) + len(T), **FAST), shortcut_fallback=False), P, T)
    assert all(v == INF for v in out)


def test_early_stream_is_over_k_and_state_bounds():
    rnd = random.Random(8)
    P = random_string(rnd, 800, 4)
    c = MatcherCopy(MatchConfig(k=2, N=3000, seed=5, **FAST), 0)
    for a in P:
        c.push_pattern_symbol(a)
    c.end_pattern()
    assert c.phase == TEXT
    T = P[:200]
    assert all(c.push_text_symbol(a) == INF for a in T)
    for a in random_string(rnd, 1500, 4):
        c.push_text_symbol(a)
        assert len(c.definite_ring) <= c.R and len(c.m_ring) <= c.R
        assert len(c.dec.bounds) <= c.R


def test_every_copy_is_an_upper_bound():
    rnd = random.Random(9)
    for trial in range(4):
        sig = [2, 4, 26][trial % 3]
        P = random_string(rnd, 600, sig)
        T = random_string(rnd, 200, sig) + mutate(P, 2, rnd, sig) + random_string(rnd, 100, sig)
        orc = oracle_all_positions(P, T)
        ens = Ensemble(MatchConfig(k=2, N=len(P) + len(T), seed=trial, **FAST), shortcut_fallback=False)
        for a in P:
            ens.push_pattern_symbol(a)
        ens.end_pattern()
        for a, o in zip(T, orc):
            ens.push_text_symbol(a)
            assert all(v >= o for v in ens.last)


def test_fallback_mode_is_exact():
    rnd = random.Random(10)
    P = random_string(rnd, 40, 4)
    T = random_string(rnd, 300, 4) + mutate(P, 1, rnd, 4)
    cfg = MatchConfig(k=2, N=400, **FAST)
    ens = Ensemble(cfg)
    out = _feed(ens, P, T)
    assert ens.fallback
    assert out == [o if o <= 2 else INF for o in oracle_all_positions(P, T)]


def test_ensemble_minimum_and_masking():
    ens = Ensemble(MatchConfig(k=5, N=100, copies=3, **FAST))
    for c, v in zip(ens.copies, (INF, 2, 5)):
        c.push_text_symbol = lambda a, v=v: v
    ens.phase = TEXT
    assert ens.push_text_symbol("a") == 2
    for c, v in zip(ens.copies, (3, 3, 3)):
        c.push_text_symbol = lambda a, v=v: v
    assert ens.push_text_symbol("a") == 3


def test_poisoned_copy_is_masked():
    rnd = random.Random(11)
    P = random_string(rnd, 600, 26)
    ens = Ensemble(MatchConfig(k=1, N=2000, copies=2, seed=1, **FAST), shortcut_fallback=False)
    for a in P:
        ens.push_pattern_symbol(a)
    ens.end_pattern()
    ens.copies[0].dec.oversize = True
    out = [ens.push_text_symbol(a) for a in random_string(rnd, 100, 26) + P]
    assert ens.copies[0].poisoned
    assert out[-1] == 0 or ens.copies[1].poisoned
    for c in ens.copies:
        c.poison("test")
    with pytest.raises(EnsembleFailure):
        ens.push_text_symbol("a")


def test_copy_count_and_stream_bound():
    assert MatchConfig(k=1, N=1000).n_copies == 2 * math.ceil(math.log2(1000))
    out = run_match("ab", "abab", MatchConfig(k=0, N=6))
    assert list(out) == [INF, 0, INF, 0]
    with pytest.raises(StreamTooLong):
        list(run_match("ab", "abab", MatchConfig(k=0, N=5)))


def test_determinism():
    rnd = random.Random(12)
    P = random_string(rnd, 500, 4)
    T = random_string(rnd, 700, 4)
    cfg = MatchConfig(k=2, N=1200, seed=9, copies=3, **FAST)
    assert list(run_match(P, T, cfg)) == list(run_match(P, T, cfg))
