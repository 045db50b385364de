"""Permutations of [n] in one-line notation, pattern restriction and families.

Elements are 1-based throughout. A permutation ``P = (p_1, ..., p_n)`` is an
ordering of ``1..n``; ``position(P, a)`` is the 1-based index of ``a`` in it.
Patterns in ``S_k`` are identified by their Lehmer-code rank, so the
increasing pattern has rank 0 and ranks follow lexicographic order.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

KTuple = tuple[int, ...]


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class FamilyFormatError(DomainError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


def _check_perm(order: Sequence[int]) -> None:
    n = len(order)
    if n < 1:
        raise DomainError("a permutation needs n >= 1")
    seen = bytearray(n + 1)
    for v in order:
        if not 1 <= v <= n:
            raise DomainError(f"entry {v} out of range 1..{n}")
        if seen[v]:
            raise DomainError(f"entry {v} repeated")
        seen[v] = 1


@dataclass(frozen=True)
class Permutation:
    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        _check_perm(self.order)

    @property
    def n(self) -> int:
        return len(self.order)

    @cached_property
    def positions(self) -> tuple[int, ...]:
        # positions[a] = pos(P, a); index 0 unused
        pos = [0] * (self.n + 1)
        for i, v in enumerate(self.order, 1):
            pos[v] = i
        return tuple(pos)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def decreasing(cls, n: int) -> Permutation:
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def from_key(cls, n: int, key) -> Permutation:
        """Order ``1..n`` ascending by ``key(x)``; the key must be injective."""
        return cls(tuple(sorted(range(1, n + 1), key=key)))

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.order)) + ")"


def as_permutation(p: Permutation | Sequence[int]) -> Permutation:
    return p if isinstance(p, Permutation) else Permutation(tuple(p))


def position(P: Permutation | Sequence[int], a: int) -> int:
    P = as_permutation(P)
    if not 1 <= a <= P.n:
        raise DomainError(f"element {a} out of range 1..{P.n}")
    return P.positions[a]


def reverse(P: Permutation | Sequence[int]) -> Permutation:
    P = as_permutation(P)
    return Permutation(P.order[::-1])


def restrict(P: Permutation | Sequence[int], keep: Iterable[int]) -> Permutation:
    """Restrict ``P`` to the elements in ``keep`` and relabel them ``1..|keep|``
    preserving their relative values."""
    P = as_permutation(P)
    keep = sorted(set(keep))
    relabel = {v: i for i, v in enumerate(keep, 1)}
    return Permutation(tuple(relabel[v] for v in P.order if v in relabel))


def pattern_sequence(P: Permutation | Sequence[int], X: Sequence[int]) -> tuple[int, ...]:
    """The pattern of ``S_k`` order-isomorphic to ``P`` restricted to ``X``."""
    P = as_permutation(P)
    xs = sorted(X)
    if len(set(xs)) != len(xs):
        raise DomainError(f"tuple {tuple(X)} has repeated elements")
    for x in xs:
        if not 1 <= x <= P.n:
            raise DomainError(f"element {x} out of range 1..{P.n}")
    pos = P.positions
    by_position = sorted(range(len(xs)), key=lambda i: pos[xs[i]])
    return tuple(i + 1 for i in by_position)


def rank_pattern(p: Sequence[int]) -> int:
    """Lehmer-code rank of a permutation of ``1..k``."""
    p = tuple(p)
    k = len(p)
    if sorted(p) != list(range(1, k + 1)):
        raise DomainError(f"{p} is not a permutation of 1..{k}")
    rank = 0
    for i, v in enumerate(p):
        smaller_later = sum(1 for w in p[i + 1:] if w < v)
        rank += smaller_later * math.factorial(k - 1 - i)
    return rank


def unrank_pattern(k: int, r: int) -> tuple[int, ...]:
    if k < 1:
        raise DomainError("pattern length must be >= 1")
    if not 0 <= r < math.factorial(k):
        raise DomainError(f"rank {r} out of range for k={k}")
    pool = list(range(1, k + 1))
    out = []
    for i in range(k - 1, -1, -1):
        d, r = divmod(r, math.factorial(i))
        out.append(pool.pop(d))
    return tuple(out)


def pattern_of(P: Permutation | Sequence[int], X: Sequence[int]) -> int:
    return rank_pattern(pattern_sequence(P, X))


def ktuples(n: int, k: int) -> Iterator[KTuple]:
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return itertools.combinations(range(1, n + 1), k)


@dataclass(frozen=True)
class Family:
    n: int
    members: tuple[Permutation, ...] = field(default=())

    def __post_init__(self) -> None:
        members = tuple(as_permutation(p) for p in self.members)
        object.__setattr__(self, "members", members)
        for p in members:
            if p.n != self.n:
                raise DomainError(f"member {p} has ground size {p.n}, expected {self.n}")

    @classmethod
    def of(cls, members: Iterable[Permutation | Sequence[int]]) -> Family:
        members = [as_permutation(p) for p in members]
        if not members:
            raise DomainError("cannot infer ground size of an empty family")
        return cls(members[0].n, tuple(members))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.members)

    @property
    def m(self) -> int:
        return len(self.members)

    @cached_property
    def position_matrix(self) -> np.ndarray:
        """``(m, n + 1)`` int32 array with ``[i, a] = pos(P_i, a)``; column 0 unused."""
        out = np.zeros((self.m, self.n + 1), dtype=np.int32)
        for i, p in enumerate(self.members):
            out[i, 1:] = np.asarray(p.positions[1:], dtype=np.int32)
        return out

    def reversed_members(self) -> Family:
        return Family(self.n, tuple(reverse(p) for p in self.members))

    def restrict(self, keep: Iterable[int]) -> Family:
        keep = sorted(set(keep))
        return Family(len(keep), tuple(restrict(p, keep) for p in self.members))

    def relabel(self, sigma: Sequence[int]) -> Family:
        """Apply the value map ``a -> sigma[a - 1]`` to every member."""
        sigma = as_permutation(sigma)
        if sigma.n != self.n:
            raise DomainError("relabeling must act on the same ground set")
        return Family(self.n, tuple(Permutation(tuple(sigma.order[v - 1] for v in p)) for p in self))

    def sorted(self) -> Family:
        return Family(self.n, tuple(sorted(self.members, key=lambda p: p.order)))

    def as_lists(self) -> list[list[int]]:
        return [list(p.order) for p in self.members]


def format_family(family: Family) -> str:
    lines = [f"n={family.n} m={family.m}"]
    lines += [" ".join(map(str, p.order)) for p in family]
    return "\n".join(lines) + "\n"


_HEADER = re.compile(r"^\s*n=(\d+)\s+m=(\d+)\s*$")


def parse_family(text: str) -> Family:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FamilyFormatError(1, "empty family file")
    head = _HEADER.match(lines[0])
    if not head:
        raise FamilyFormatError(1, f"expected header 'n=<n> m=<m>', got {lines[0]!r}")
    n, m = int(head.group(1)), int(head.group(2))
    if n < 1:
        raise FamilyFormatError(1, "n must be >= 1")
    if len(lines) - 1 != m:
        raise FamilyFormatError(len(lines), f"header declares m={m} but {len(lines) - 1} rows follow")
    members = []
    for lineno, line in enumerate(lines[1:], 2):
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError:
            raise FamilyFormatError(lineno, f"non-integer entry in {line!r}") from None
        if len(row) != n:
            raise FamilyFormatError(lineno, f"expected {n} entries, got {len(row)}")
        seen = set()
        for v in row:
            if not 1 <= v <= n:
                raise FamilyFormatError(lineno, f"entry {v} out of range 1..{n}")
            if v in seen:
                raise FamilyFormatError(lineno, f"duplicate entry {v}")
            seen.add(v)
        members.append(Permutation(tuple(row)))
    return Family(n, tuple(members))


def read_family(path: str | Path) -> Family:
    return parse_family(Path(path).read_text(encoding="utf-8"))


def write_family(family: Family, path: str | Path) -> None:
    Path(path).write_text(format_family(family), encoding="utf-8")
