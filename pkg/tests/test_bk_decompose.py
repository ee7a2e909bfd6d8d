import random

import pytest
from hypothesis import given, strategies as st

from streamedit.bk_decompose import (
    DecompParams, Hashes, RollingDecomposer, blocks_from_boundaries, decompose_batch, decompose_incremental,
    mark_boundaries, reduce_level,
)
from streamedit.edit_engine import ed_str, suffix_min_str
from streamedit.grammar_core import evaluate
from streamedit.oracle import oracle_all_positions
from streamedit.rand_hash import SeedTree
from streamedit.workloads import mutate, random_string


def params(seed=0, n=10**5, k=2, **kw):
    kw.setdefault("beta", 32)
    kw.setdefault("R", 6)
    return DecompParams.for_bounds(n, k, SeedTree(seed), **kw)


def _concat(bs):
    return "".join(evaluate(g) for g in bs.grammars)


def test_param_invariants():
    p = DecompParams.for_bounds(10**6, 3, SeedTree(0))
    assert p.L == DecompParams.levels_for(10**6) == 38
    assert p.R == 4 * p.L and p.S >= p.beta >= 64
    with pytest.raises(ValueError):
        DecompParams.for_bounds(100, 1, SeedTree(0), beta=1)
    with pytest.raises(ValueError):
        DecompParams.for_bounds(100, 1, SeedTree(0), beta=64, S=10)


def test_empty_input():
    bs = decompose_batch("", params())
    assert bs.grammars == [] and bs.total_len == 0


def test_long_run():
    x = "a" * 10**4
    p = params(beta=64)
    bs = decompose_batch(x, p)
    assert _concat(bs) == x and not bs.oversize
    assert all(g.size <= p.S for g in bs.grammars)


def test_random_26_letters_many_seeds():
    rnd = random.Random(0)
    x = random_string(rnd, 5000, 26)
    for seed in range(100):
        assert _concat(decompose_batch(x, params(seed, beta=64))) == x


@given(st.text("ab", max_size=300), st.integers(0, 1000))
def test_concat_identity(x, seed):
    bs = decompose_batch(x, params(seed, beta=8, S=64))
    assert _concat(bs) == x
    assert bs.boundaries()[:1] == ([1] if x else [])


def test_reduce_level_examples():
    h = Hashes(params())
    nodes = [h.term(ord(c)) for c in "aaaa"]
    red = reduce_level(nodes, list(range(4)), 1, h)
    assert len(red.nodes) == 1 and red.nodes[0][1] == 4
    vals = {ord("a"): 0, ord("b"): 1}
    ab = [h.term(ord(c)) for c in "ab"]
    red = reduce_level(ab, [0, 1], 1, h, chash=lambda key: vals[key - 1])
    assert len(red.nodes) == 1 and red.created == [True]


def test_reduce_level_never_grows():
    rnd = random.Random(3)
    h = Hashes(params())
    for _ in range(50):
        s = random_string(rnd, rnd.randint(2, 200), rnd.choice([2, 4]))
        nodes = [h.term(ord(c)) for c in s]
        red = reduce_level(nodes, list(range(len(s))), 1, h)
        assert len(red.nodes) < len(nodes)


def test_alternating_string_shrinks():
    x = "ab" * 512
    good = 0
    for seed in range(100):
        p = params(seed, n=1024)
        h = Hashes(p)
        nodes, starts = [h.term(ord(c)) for c in x], list(range(len(x)))
        for level in range(1, p.L + 1):
            nodes, starts, _ = reduce_level(nodes, starts, level, h)
        good += len(nodes) <= 8
    assert good >= 95


def test_boundary_arithmetic():
    assert mark_boundaries(120, [39, 96]) == [0, 39, 96]
    assert blocks_from_boundaries([0, 39, 96], 120) == [(0, 39), (39, 96), (96, 120)]
    assert mark_boundaries(50, []) == [0]


def test_no_marks_single_block():
    x = "abcdefghij" * 3
    bs = decompose_batch(x, params(beta=10**6, S=10**6))
    assert bs.intervals == [(0, len(x))]


def test_boundaries_local_in_shared_region():
    rnd = random.Random(8)
    core = random_string(rnd, 2000, 26)
    for seed in range(5):
        p = params(seed, beta=32)
        u = random_string(rnd, 300, 26) + core + random_string(rnd, 100, 26)
        v = random_string(rnd, 50, 26) + core + random_string(rnd, 400, 26)
        bu = {b - 300 for b in decompose_batch(u, p).boundaries()}
        bv = {b - 50 for b in decompose_batch(v, p).boundaries()}
        inner = lambda s: {b for b in s if 200 <= b <= 1800}
        assert inner(bu) == inner(bv)


def test_incremental_examples():
    p = params(R=3, beta=4, S=32)
    d, a, failed = decompose_incremental("abracadabrax", p)
    assert not failed and d + a == decompose_batch("abracadabrax", p).grammars
    dec = RollingDecomposer(p)
    assert dec.append("z") == [] and len(dec.active_grammars()) == 1


@given(st.text("abc", max_size=400), st.integers(0, 10**6), st.sampled_from([3, 6, 12]))
def test_incremental_equals_batch(x, seed, R):
    p = params(seed, beta=8, S=64, R=R)
    d, a, failed = decompose_incremental(x, p)
    assert d + a == decompose_batch(x, p).grammars


def test_incremental_long_streams():
    for seed in range(3):
        rnd = random.Random(seed)
        x = random_string(rnd, 10**4, [2, 4, 26][seed])
        p = params(seed, beta=32, R=8)
        dec = RollingDecomposer(p)
        d = []
        for ch in x:
            new = dec.append(ch)
            assert len(new) <= 4 * p.R * p.L
            assert len(dec.bounds) <= p.R
            d.extend(g for g, _ in new)
        assert d + dec.active_grammars() == decompose_batch(x, p).grammars


def test_definiteness_default_R():
    rnd = random.Random(1)
    for t in range(30):
        p = DecompParams.for_bounds(6000, 2, SeedTree(t), beta=16)
        x = random_string(rnd, rnd.randint(1500, 3000), rnd.choice([2, 4, 26]))
        z = random_string(rnd, rnd.randint(1, 800), 4)
        gx, gxz = decompose_batch(x, p), decompose_batch(x + z, p)
        s, R = len(gx), p.R
        assert gxz.grammars[: max(0, s - R)] == gx.grammars[: max(0, s - R)]
        assert len(x) <= sum(hi - lo for lo, hi in gxz.intervals[: min(s + R, len(gxz))])


def test_alignment_rate_recorded():
    ok = tot = 0
    for trial in range(60):
        rnd = random.Random(trial)
        sig = rnd.choice([2, 4, 26])
        k = rnd.choice([0, 1, 2, 5, 10])
        P = random_string(rnd, 600, sig)
        T = random_string(rnd, 200, sig) + mutate(P, rnd.randint(0, k), rnd, sig)
        best = oracle_all_positions(P, T)[-1]
        p = DecompParams.for_bounds(10**6, k, SeedTree(trial), beta=64, R=8)
        h = Hashes(p)
        bp, bt = decompose_batch(P, p, h), decompose_batch(T, p, h)
        pp = [P[a:b] for a, b in bp.intervals]
        tt = [T[a:b] for a, b in bt.intervals]
        if len(pp) > len(tt):
            continue
        al = tt[-len(pp):]
        d = suffix_min_str(al[0], pp[0], k)[0] + sum(ed_str(a, b, k) for a, b in zip(al[1:], pp[1:]))
        tot += 1
        ok += d == best
    print(f"block alignment success {ok}/{tot} = {ok / tot:.3f}")
    assert ok / tot > 0.6
