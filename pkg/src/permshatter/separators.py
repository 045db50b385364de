"""Two-part partition systems of [n] that separate pairs of elements.

``binary_splits`` separates every unordered pair with ``ceil(log2 n)``
partitions. ``separating_system`` separates every ordered pair ``(x, y)``
(some partition has ``x`` in A and ``y`` in B) by giving each element a
distinct ``floor(r/2)``-subset of ``[r]`` as its code; no code contains
another, so each ordered pair is served.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import DomainError


@dataclass(frozen=True)
class PartitionSystem:
    ground: int
    parts: tuple[frozenset[int], ...]  # A-sides; B is the complement in [ground]

    def __post_init__(self) -> None:
        parts = tuple(frozenset(a) for a in self.parts)
        object.__setattr__(self, "parts", parts)
        for a in parts:
            if a and (min(a) < 1 or max(a) > self.ground):
                raise DomainError(f"partition side {sorted(a)} leaves [1, {self.ground}]")
        if len(set(parts)) != len(parts):
            raise DomainError("duplicate partitions")

    def __len__(self) -> int:
        return len(self.parts)

    def pairs(self) -> list[tuple[frozenset[int], frozenset[int]]]:
        everything = frozenset(range(1, self.ground + 1))
        return [(a, everything - a) for a in self.parts]

    def codes(self) -> list[int]:
        """``codes[x - 1]`` has bit i set iff x lies in the A-side of partition i."""
        if len(self.parts) <= 63:
            return self._code_array().tolist()
        out = [0] * self.ground
        for i, a in enumerate(self.parts):
            for x in a:
                out[x - 1] |= 1 << i
        return out

    def _code_array(self) -> np.ndarray:
        out = np.zeros(self.ground, dtype=np.int64)
        for i, a in enumerate(self.parts):
            idx = np.fromiter(a, dtype=np.int64, count=len(a)) - 1
            out[idx] |= 1 << i
        return out

    def to_json(self) -> dict:
        return {"ground": self.ground, "parts": [sorted(a) for a in self.parts]}

    @classmethod
    def from_json(cls, doc: dict) -> PartitionSystem:
        return cls(int(doc["ground"]), tuple(frozenset(a) for a in doc["parts"]))


def binary_splits(n: int) -> PartitionSystem:
    if n < 2:
        raise DomainError("binary_splits needs n >= 2")
    bits = (n - 1).bit_length()
    xs = np.arange(n)
    parts = tuple(frozenset((np.nonzero((xs >> i & 1) == 0)[0] + 1).tolist()) for i in range(bits))
    return PartitionSystem(n, parts)


def sperner_length(n: int) -> int:
    """Smallest r with ``C(r, floor(r/2)) >= n``."""
    r = 1
    while math.comb(r, r // 2) < n:
        r += 1
    return r


def colex_subsets(r: int, h: int) -> Iterator[tuple[int, ...]]:
    """``h``-subsets of ``{0..r-1}`` in colexicographic order, lazily."""
    if h == 0:
        yield ()
        return
    for top in range(h - 1, r):
        for rest in colex_subsets(top, h - 1):
            yield rest + (top,)


def separating_system(n: int) -> PartitionSystem:
    if n < 2:
        raise DomainError("separating_system needs n >= 2")
    r = sperner_length(n)
    sides: list[list[int]] = [[] for _ in range(r)]
    for x, code in enumerate(itertools.islice(colex_subsets(r, r // 2), n), 1):
        for i in code:
            sides[i].append(x)
    return PartitionSystem(n, tuple(frozenset(a) for a in sides))


def verify_separating(system: PartitionSystem, ordered: bool) -> tuple[bool, tuple[int, int] | None]:
    """Check pair separation; on failure return the lexicographically least bad pair.

    Unordered: ``x < y`` must land on different sides somewhere.
    Ordered: for ``x != y`` some partition has ``x`` in A and ``y`` in B.
    """
    n = system.ground
    if not ordered:
        first: dict[int, int] = {}
        best = None
        for x, c in enumerate(system.codes(), 1):
            if c in first:
                pair = (first[c], x)
                best = pair if best is None or pair < best else best
            else:
                first[c] = x
        return best is None, best
    if len(system) <= 63:
        c = system._code_array()
        c = c.astype(np.int16 if len(system) < 16 else np.int32 if len(system) < 32 else np.int64)
        # (x, y) unserved iff code(x) is a subset of code(y)
        bad = (c[:, None] & ~c[None, :]) == 0
        np.fill_diagonal(bad, False)
        if not bad.any():
            return True, None
        x, y = np.argwhere(bad)[0]
        return False, (int(x) + 1, int(y) + 1)
    codes = system.codes()
    for x in range(n):
        for y in range(n):
            if x != y and codes[x] & ~codes[y] == 0:
                return False, (x + 1, y + 1)
    return True, None
