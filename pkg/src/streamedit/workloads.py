"""Random inputs with planted approximate occurrences (benchmarks and statistical checks)."""

from __future__ import annotations

import random
import string
from typing import NamedTuple

ALPHABET = string.ascii_lowercase


class PlantedCase(NamedTuple):
    pattern: str
    text: str
    k: int
    edits: int
    occ_end: int  # 1-based text position where the planted copy ends


def random_string(rnd: random.Random, n: int, sigma: int) -> str:
    sym = ALPHABET[:sigma]
    return "".join(rnd.choice(sym) for _ in range(n))


def mutate(s: str, edits: int, rnd: random.Random, sigma: int) -> str:
    """Apply ``edits`` random single-symbol edits (insert, delete or substitute)."""
    sym = ALPHABET[:sigma]
    out = list(s)
    for _ in range(edits):
        op = rnd.randrange(3) if out else 0
        p = rnd.randrange(len(out) + (op == 0))
        if op == 0:
            out.insert(p, rnd.choice(sym))
        elif op == 1:
            del out[p]
        elif sigma > 1:
            out[p] = rnd.choice([c for c in sym if c != out[p]])
    return "".join(out)


def planted_case(
    rnd: random.Random,
    *,
    sigma: int,
    k: int,
    pattern_len: tuple[int, int],
    prefix_len: tuple[int, int],
    suffix_len: tuple[int, int],
    edits: int | None = None,
) -> PlantedCase:
    """Noise, then the pattern with ``edits`` random edits (default: uniform in [0, k]), then noise."""
    P = random_string(rnd, rnd.randint(*pattern_len), sigma)
    j = rnd.randint(0, k) if edits is None else edits
    pre = random_string(rnd, rnd.randint(*prefix_len), sigma)
    occ = mutate(P, j, rnd, sigma)
    suf = random_string(rnd, rnd.randint(*suffix_len), sigma)
    return PlantedCase(P, pre + occ + suf, k, j, len(pre) + len(occ))
