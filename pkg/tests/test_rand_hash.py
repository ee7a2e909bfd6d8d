import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from streamedit.rand_hash import P61, BadRange, HashFamily, SeedTree, derive_seed, eval_hash, field_stream, sample_family


def test_same_seed_same_family():
    assert sample_family(99, "pairwise", 16) == sample_family(99, "pairwise", 16)
    assert sample_family(99, "twise", 16, t=8) == sample_family(99, "twise", 16, t=8)


def test_shapes():
    f = sample_family(3, "pairwise", 16)
    assert len(f.coeffs) == 2 and f.coeffs[0] != 0
    assert len(sample_family(3, "twise", 16, t=5).coeffs) == 5


def test_bad_range():
    with pytest.raises(BadRange):
        sample_family(1, "pairwise", 1)


def test_eval_examples():
    assert eval_hash(HashFamily("pairwise", (1, 0), 13, 13), 7) == 7
    # (3*2 + 5) mod 13 = 11, 11 mod 4 = 3
    assert eval_hash(HashFamily("pairwise", (3, 5), 13, 4), 2) == 3
    zero = HashFamily("twise", (0, 0, 0, 0), P61, 16, 4)
    assert all(eval_hash(zero, x) == 0 for x in range(100))


def test_twise_is_horner():
    f = HashFamily("twise", (2, 3, 5), 101, 101, 3)
    for x in range(50):
        assert eval_hash(f, x) == (2 * x * x + 3 * x + 5) % 101


def test_pairwise_uniformity():
    f = sample_family(2024, "pairwise", 16)
    n = 10**5
    counts = Counter(eval_hash(f, x) for x in range(n))
    exp = n / 16
    sd = math.sqrt(n * (1 / 16) * (15 / 16))
    assert len(counts) == 16
    assert all(abs(c - exp) <= 5 * sd for c in counts.values())


@given(st.integers(0, 2**64 - 1), st.integers(0, P61 - 1), st.integers(2, 1000))
def test_output_in_range(seed, x, r):
    for kind in ("pairwise", "twise"):
        assert 0 <= eval_hash(sample_family(seed, kind, r, t=4), x) < r


def test_seed_tree_determinism_and_separation():
    a = SeedTree(7).child("copy", 1).child("decomp")
    assert a.seed == SeedTree(7).child("copy", 1).child("decomp").seed
    seeds = {SeedTree(7).child("copy", i).seed for i in range(200)}
    assert len(seeds) == 200
    assert derive_seed(7, ("copy", 1)) != derive_seed(8, ("copy", 1))


def test_field_stream_in_field():
    it = field_stream(5)
    vals = [next(it) for _ in range(1000)]
    assert all(0 <= v < P61 for v in vals) and len(set(vals)) == 1000
