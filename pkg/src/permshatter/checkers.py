"""Shattering checkers: per-tuple order counts, coverage sweeps, fixed-pattern
coverage and the iterated monotone-subsequence (Erdos-Szekeres) extractor."""
from __future__ import annotations

import bisect
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .core import DomainError, Family, KTuple, pattern_of, rank_pattern, unrank_pattern

MATERIALIZE_CAP = 10**7
CHUNK = 1 << 18
MAX_SWEEP_K = 6


def count_orders(family: Family, X: Sequence[int]) -> int:
    if family.m == 0:
        raise DomainError("count_orders needs a non-empty family")
    return len({pattern_of(P, X) for P in family})


@lru_cache(maxsize=None)
def _comparison_table(k: int) -> np.ndarray:
    """Map a pairwise-comparison code to the Lehmer rank of the pattern.

    Bit ``b`` of the code, for the ``b``-th pair ``(i, j)`` with ``i < j``,
    is set when the i-th smallest tuple element precedes the j-th.
    """
    pairs = list(itertools.combinations(range(k), 2))
    table = np.full(1 << len(pairs), -1, dtype=np.int32)
    for order in itertools.permutations(range(k)):
        # order lists tuple indices by position
        where = [0] * k
        for p, i in enumerate(order):
            where[i] = p
        code = sum(1 << b for b, (i, j) in enumerate(pairs) if where[i] < where[j])
        table[code] = rank_pattern(tuple(i + 1 for i in order))
    return table


def tuple_ranks(family: Family, tuples: np.ndarray) -> np.ndarray:
    """Pattern ranks for a ``(T, k)`` array of 1-based tuples; returns ``(T, m)``."""
    T, k = tuples.shape
    if k > MAX_SWEEP_K:
        raise DomainError(f"vectorized sweeps support k <= {MAX_SWEEP_K}")
    pos = family.position_matrix  # (m, n+1)
    cols = [pos[:, tuples[:, i]] for i in range(k)]  # each (m, T)
    code = np.zeros((family.m, T), dtype=np.int32)
    for b, (i, j) in enumerate(itertools.combinations(range(k), 2)):
        code |= (cols[i] < cols[j]).astype(np.int32) << b
    return _comparison_table(k)[code].T


@lru_cache(maxsize=32)
def _all_combinations(m: int, k: int) -> np.ndarray:
    """Every k-subset of ``range(m)`` as rows, lexicographic; meant for small ``C(m, k)``.

    The (k-1)-subsets starting at ``a + 1`` or later form a suffix of the
    lexicographic (k-1)-table, so each leading element needs one slice.
    """
    if k == 0:
        return np.zeros((1, 0), dtype=np.int32)
    if k > m:
        return np.zeros((0, k), dtype=np.int32)
    if k == 1:
        return np.arange(m, dtype=np.int32)[:, None]
    tail = _all_combinations(m, k - 1)
    # rows of ``tail`` whose first element is below a + 1
    skip = np.cumsum([math.comb(m - b - 1, k - 2) for b in range(m)])
    lead = np.repeat(np.arange(m - k + 1, dtype=np.int32), [len(tail) - skip[a] for a in range(m - k + 1)])
    rest = np.concatenate([tail[skip[a]:] for a in range(m - k + 1)])
    out = np.column_stack([lead, rest])
    out.flags.writeable = False
    return out


def _combination_blocks(lo: int, m: int, k: int, chunk: int) -> Iterator[np.ndarray]:
    """Lexicographic k-subsets of ``range(lo, m)`` in blocks of roughly ``chunk`` rows."""
    if k == 0 or math.comb(m - lo, k) <= chunk:
        yield _all_combinations(m - lo, k) + lo
        return
    for a in range(lo, m - k + 1):
        for rest in _combination_blocks(a + 1, m, k - 1, chunk):
            yield np.column_stack([np.full(len(rest), a, dtype=np.int32), rest])


def _tuple_chunks(n: int, k: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """1-based k-tuples of ``[n]`` in lexicographic order, batched to roughly ``chunk`` rows."""
    pending, size = [], 0
    for block in _combination_blocks(0, n, k, chunk):
        pending.append(block)
        size += len(block)
        if size >= chunk:
            yield np.concatenate(pending) + 1
            pending, size = [], 0
    if size:
        yield np.concatenate(pending) + 1


def _distinct_counts(ranks: np.ndarray, k: int) -> np.ndarray:
    if math.factorial(k) <= 64:
        masks = np.bitwise_or.reduce(np.left_shift(np.uint64(1), ranks.astype(np.uint64)), axis=1)
        return np.bitwise_count(masks).astype(np.int32)
    s = np.sort(ranks, axis=1)
    return 1 + (np.diff(s, axis=1) != 0).sum(axis=1).astype(np.int32)


def _sweep(family: Family, k: int, workers: int = 1, chunk: int = CHUNK):
    """Yield ``(tuples, counts, ranks)`` per chunk, in lexicographic tuple order."""
    if family.m == 0:
        raise DomainError("sweeps need a non-empty family")
    if not 1 <= k <= family.n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={family.n}")

    def work(tuples):
        ranks = tuple_ranks(family, tuples)
        return tuples, _distinct_counts(ranks, k), ranks

    chunks = _tuple_chunks(family.n, k, chunk)
    if workers <= 1:
        yield from map(work, chunks)
    else:
        with ThreadPoolExecutor(workers) as pool:
            yield from pool.map(work, chunks)


@dataclass
class CoverageReport:
    n: int
    k: int
    m: int
    total_tuples: int
    min_count: int
    shattered_count: int
    unshattered_count: int
    unshattered_witnesses: list[KTuple] = field(default_factory=list)
    per_tuple_counts: np.ndarray | None = None  # lexicographic tuple order

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.shattered_count, self.total_tuples)

    def count_for(self, X: Sequence[int]) -> int:
        if self.per_tuple_counts is None:
            raise DomainError("per-tuple counts were not materialized")
        return int(self.per_tuple_counts[lex_index(self.n, sorted(X))])

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "min_count": self.min_count,
            "shattered_count": self.shattered_count,
            "total_tuples": self.total_tuples,
            "fraction": str(self.fraction),
            "unshattered_witnesses": [list(x) for x in self.unshattered_witnesses],
        }


def lex_index(n: int, X: Sequence[int]) -> int:
    """Index of a sorted tuple in the lexicographic enumeration of ``ktuples(n, k)``."""
    k = len(X)
    idx, prev = 0, 0
    for i, x in enumerate(X):
        for v in range(prev + 1, x):
            idx += math.comb(n - v, k - i - 1)
        prev = x
    return idx


def coverage(
    family: Family,
    k: int,
    *,
    witness_limit: int = 10,
    materialize_cap: int = MATERIALIZE_CAP,
    workers: int = 1,
) -> CoverageReport:
    total = math.comb(family.n, k) if 1 <= k <= family.n else 0
    full = math.factorial(k)
    keep = total <= materialize_cap
    parts = []
    min_count, shattered = full, 0
    witnesses: list[KTuple] = []
    for tuples, counts, _ in _sweep(family, k, workers):
        if keep:
            parts.append(counts.astype(np.int16 if full < 2**15 else np.int32))
        min_count = min(min_count, int(counts.min()))
        shattered += int((counts == full).sum())
        if len(witnesses) < witness_limit:
            bad = np.nonzero(counts < full)[0][: witness_limit - len(witnesses)]
            witnesses += [tuple(int(v) for v in tuples[i]) for i in bad]
    return CoverageReport(
        n=family.n,
        k=k,
        m=family.m,
        total_tuples=total,
        min_count=min_count,
        shattered_count=shattered,
        unshattered_count=total - shattered,
        unshattered_witnesses=witnesses,
        per_tuple_counts=np.concatenate(parts) if keep else None,
    )


def satisfies_partial(family: Family, k: int, t: int, workers: int = 1) -> tuple[bool, KTuple | None]:
    """Whether every k-tuple shows at least ``t`` orders; else the least failing tuple."""
    if not 1 <= t <= math.factorial(k):
        raise DomainError(f"t={t} outside 1..{k}!")
    for tuples, counts, _ in _sweep(family, k, workers):
        bad = np.nonzero(counts < t)[0]
        if bad.size:
            return False, tuple(int(v) for v in tuples[bad[0]])
    return True, None


def satisfies_total(family: Family, k: int, workers: int = 1) -> tuple[bool, KTuple | None]:
    return satisfies_partial(family, k, math.factorial(k), workers)


def follows_everywhere(family: Family, pattern: int | Sequence[int], k: int | None = None) -> tuple[bool, KTuple | None]:
    """Whether every k-tuple follows ``pattern`` in some member.

    ``pattern`` is a one-line pattern or a rank (then ``k`` is required).
    """
    if isinstance(pattern, int):
        if k is None:
            raise DomainError("k is required when the pattern is given by rank")
        pattern = unrank_pattern(k, pattern)
    r = rank_pattern(pattern)
    k = len(pattern)
    if k > family.n:
        raise DomainError(f"pattern length {k} exceeds ground size {family.n}")
    for tuples, _, ranks in _sweep(family, k):
        bad = np.nonzero(~(ranks == r).any(axis=1))[0]
        if bad.size:
            return False, tuple(int(v) for v in tuples[bad[0]])
    return True, None


def longest_increasing(seq: Sequence[int]) -> list[int]:
    """A longest strictly increasing subsequence, by patience sorting."""
    tops: list[int] = []  # smallest tail value per pile
    top_idx: list[int] = []
    back = [-1] * len(seq)
    for i, v in enumerate(seq):
        p = bisect.bisect_left(tops, v)
        if p == len(tops):
            tops.append(v)
            top_idx.append(i)
        else:
            tops[p] = v
            top_idx[p] = i
        back[i] = top_idx[p - 1] if p else -1
    out = []
    i = top_idx[-1] if top_idx else -1
    while i >= 0:
        out.append(seq[i])
        i = back[i]
    return out[::-1]


def longest_monotone(seq: Sequence[int]) -> list[int]:
    """Longer of the longest increasing and decreasing subsequences; ties go to increasing."""
    inc = longest_increasing(seq)
    dec = [-v for v in longest_increasing([-v for v in seq])]
    return inc if len(inc) >= len(dec) else dec


def es_witness(family: Family) -> list[int]:
    """Iteratively restrict ``[n]`` to a longest monotone subsequence of each member.

    Every tuple inside the returned set appears in at most two orders across
    the family (each member lists it either increasingly or decreasingly).
    """
    if family.m == 0:
        raise DomainError("es_witness needs a non-empty family")
    alive = set(range(1, family.n + 1))
    for P in family:
        seq = [v for v in P if v in alive]
        alive = set(longest_monotone(seq))
    return sorted(alive)


def iroot(x: int, e: int) -> int:
    """Largest ``r`` with ``r ** e <= x`` for ``x >= 0``."""
    if x < 2:
        return x
    r = int(round(x ** (1.0 / e)))
    while r**e > x:
        r -= 1
    while (r + 1) ** e <= x:
        r += 1
    return r


def es_guarantee(n: int, m: int) -> int:
    """``floor((n-1)^(1/2^m)) + 1``, the size bound for ``es_witness``."""
    return iroot(n - 1, 2**m) + 1


def shattered_fraction(family: Family, k: int, workers: int = 1) -> Fraction:
    return coverage(family, k, witness_limit=0, materialize_cap=0, workers=workers).fraction

