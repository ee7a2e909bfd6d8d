"""Seeded hash families over the Mersenne field and seed derivation.

All randomness in the package flows from one 64-bit master seed.  A
:class:`SeedTree` names a node of the derivation tree; its ``seed`` is a
strong mix of the master seed and the path, so the same path always
yields the same stream.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Iterator

P61 = (1 << 61) - 1
MASK64 = (1 << 64) - 1


class BadRange(ValueError):
    pass


def derive_seed(master: int, *path: tuple[str, int]) -> int:
    h = hashlib.blake2b(digest_size=8, person=b"streamedit-seed")
    h.update(struct.pack("<Q", master & MASK64))
    for label, index in path:
        raw = label.encode("utf-8")
        h.update(struct.pack("<I", len(raw)))
        h.update(raw)
        h.update(struct.pack("<q", index))
    return int.from_bytes(h.digest(), "little")


@dataclass(frozen=True)
class SeedTree:
    master: int
    path: tuple[tuple[str, int], ...] = ()

    def child(self, label: str, index: int = 0) -> "SeedTree":
        return SeedTree(self.master, self.path + ((label, index),))

    @property
    def seed(self) -> int:
        return derive_seed(self.master, *self.path)


def field_stream(seed: int) -> Iterator[int]:
    """Counter-mode generator of uniform elements of GF(P61)."""
    key = struct.pack("<Q", seed & MASK64)
    counter = 0
    while True:
        block = hashlib.blake2b(struct.pack("<Q", counter), digest_size=64, key=key).digest()
        counter += 1
        for off in range(0, 64, 8):
            v = int.from_bytes(block[off:off + 8], "little") & P61
            if v != P61:  # reject the one value outside [0, p)
                yield v


@dataclass(frozen=True)
class HashFamily:
    kind: str  # "pairwise" or "twise"
    coeffs: tuple[int, ...]
    p: int = P61
    range: int = P61
    t: int = field(default=2)

    def __post_init__(self) -> None:
        if self.range > self.p or self.range < 1:
            raise BadRange(f"range {self.range} outside [1, p]")
        if self.kind == "pairwise":
            if len(self.coeffs) != 2 or self.coeffs[0] == 0:
                raise ValueError("pairwise family needs (a, b) with a != 0")
        elif self.kind == "twise":
            if len(self.coeffs) != self.t:
                raise ValueError("t-wise family needs exactly t coefficients")
        else:
            raise ValueError(f"unknown family kind {self.kind!r}")

    def __call__(self, x: int) -> int:
        return eval_hash(self, x)


def sample_family(seed: int, kind: str = "pairwise", range_: int = P61, t: int = 2) -> HashFamily:
    if range_ < 2:
        raise BadRange(f"range must be at least 2, got {range_}")
    stream = field_stream(seed)
    if kind == "pairwise":
        a = next(stream)
        while a == 0:
            a = next(stream)
        return HashFamily("pairwise", (a, next(stream)), P61, range_, 2)
    if kind == "twise":
        if t < 1:
            raise ValueError("t must be positive")
        return HashFamily("twise", tuple(next(stream) for _ in range(t)), P61, range_, t)
    raise ValueError(f"unknown family kind {kind!r}")


def eval_hash(f: HashFamily, x: int) -> int:
    p = f.p
    if f.kind == "pairwise":
        a, b = f.coeffs
        return ((a * x + b) % p) % f.range
    acc = 0
    for c in f.coeffs:
        acc = (acc * x + c) % p
    return acc % f.range
