import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import all_perms, brute_counts, brute_orders, families, permutations
from permshatter import checkers
from permshatter.constructions import q34
from permshatter.core import DomainError, Family, Permutation, pattern_of, rank_pattern


@given(families(min_n=3, max_n=6))
def test_sweep_matches_pairwise_comparison(fam):
    for k in range(1, min(fam.n, 4) + 1):
        rep = checkers.coverage(fam, k)
        assert rep.per_tuple_counts.tolist() == brute_counts(fam, k)


@given(families(min_n=3, max_n=6), st.data())
def test_count_orders_matches_brute_force(fam, data):
    X = data.draw(st.lists(st.integers(1, fam.n), min_size=3, max_size=3, unique=True))
    assert checkers.count_orders(fam, X) == brute_orders(fam, X)


@given(families(min_n=5, max_n=7, max_m=8))
def test_sort_based_counts_match_mask_counts(fam):
    # k = 5 has 120 orders, beyond one 64-bit mask
    rep = checkers.coverage(fam, 5)
    assert rep.per_tuple_counts.tolist() == brute_counts(fam, 5)


def test_tuple_ranks_agree_with_pattern_of():
    fam = Family.of(all_perms(5))
    tuples = np.array(list(itertools.combinations(range(1, 6), 3)), dtype=np.int32)
    ranks = checkers.tuple_ranks(fam, tuples)
    for i, X in enumerate(tuples.tolist()):
        assert ranks[i].tolist() == [pattern_of(P, X) for P in fam]


def test_chunked_sweep_is_chunk_independent():
    fam = Family.of([(3, 1, 4, 5, 9, 2, 6, 8, 7), tuple(range(9, 0, -1)), tuple(range(1, 10))])
    whole = np.concatenate([c for _, c, _ in checkers._sweep(fam, 3)])
    pieces = np.concatenate([c for _, c, _ in checkers._sweep(fam, 3, chunk=7)])
    threaded = np.concatenate([c for _, c, _ in checkers._sweep(fam, 3, workers=3)])
    assert whole.tolist() == pieces.tolist() == threaded.tolist()


@pytest.mark.parametrize("n, k, chunk", [(7, 3, 5), (10, 4, 17), (12, 1, 4), (9, 9, 3), (30, 5, 999), (6, 2, 1 << 18)])
def test_tuple_chunks_enumerate_lexicographically(n, k, chunk):
    got = np.concatenate(list(checkers._tuple_chunks(n, k, chunk)))
    assert got.tolist() == [list(X) for X in itertools.combinations(range(1, n + 1), k)]


def test_q34_is_perfect():
    rep = checkers.coverage(q34(), 3)
    assert (rep.min_count, rep.shattered_count, rep.total_tuples) == (6, 4, 4)
    assert rep.fraction == 1
    assert checkers.satisfies_total(q34(), 3) == (True, None)


def test_witnesses_are_least_tuples():
    fam = Family.of([(1, 2, 3, 4, 5), (5, 4, 3, 2, 1)])
    rep = checkers.coverage(fam, 3, witness_limit=3)
    assert rep.unshattered_witnesses == [(1, 2, 3), (1, 2, 4), (1, 2, 5)]
    assert rep.unshattered_count == 10
    assert checkers.satisfies_partial(fam, 3, 2) == (True, None)
    assert checkers.satisfies_partial(fam, 3, 3) == (False, (1, 2, 3))


def test_count_for_uses_lexicographic_index():
    fam = Family.of([(1, 2, 3, 4, 5), (2, 5, 1, 3, 4), (4, 3, 5, 1, 2)])
    rep = checkers.coverage(fam, 3)
    for X in itertools.combinations(range(1, 6), 3):
        assert rep.count_for(X) == brute_orders(fam, X)
    assert [checkers.lex_index(6, X) for X in itertools.combinations(range(1, 7), 3)] == list(range(20))


def test_large_runs_skip_materialization():
    fam = Family.of([tuple(range(1, 11))])
    rep = checkers.coverage(fam, 3, materialize_cap=10)
    assert rep.per_tuple_counts is None
    with pytest.raises(DomainError):
        rep.count_for((1, 2, 3))


def test_empty_family_and_bad_k():
    with pytest.raises(DomainError):
        checkers.count_orders(Family(3, ()), (1, 2, 3))
    with pytest.raises(DomainError):
        checkers.coverage(Family.of([(1, 2)]), 3)
    with pytest.raises(DomainError):
        checkers.satisfies_partial(q34(), 3, 7)


def test_follows_everywhere():
    ok, witness = checkers.follows_everywhere(q34(), (2, 1, 3))
    assert ok and witness is None
    fam = Family.of([(1, 2, 3, 4), (1, 3, 2, 4)])
    assert checkers.follows_everywhere(fam, (1, 2, 3)) == (True, None)
    assert checkers.follows_everywhere(fam, rank_pattern((1, 3, 2)), k=3) == (False, (1, 2, 4))


@given(families(min_n=3, max_n=6), st.permutations((1, 2, 3)))
def test_follows_everywhere_matches_brute_force(fam, pattern):
    r = rank_pattern(pattern)
    expected = all(
        any(pattern_of(P, X) == r for P in fam) for X in itertools.combinations(range(1, fam.n + 1), 3)
    )
    assert checkers.follows_everywhere(fam, tuple(pattern))[0] == expected


def _brute_longest(seq, increasing):
    for size in range(len(seq), 0, -1):
        for sub in itertools.combinations(seq, size):
            pairs = zip(sub, sub[1:])
            if all((a < b) if increasing else (a > b) for a, b in pairs):
                return size
    return 0


@given(st.lists(st.integers(0, 30), max_size=12, unique=True))
def test_longest_increasing_is_longest(seq):
    inc = checkers.longest_increasing(seq)
    assert len(inc) == _brute_longest(seq, True)
    assert all(a < b for a, b in zip(inc, inc[1:]))
    it = iter(seq)
    assert all(v in it for v in inc)  # is a subsequence


@given(st.lists(st.integers(0, 30), min_size=1, max_size=12, unique=True))
def test_longest_monotone_is_longest(seq):
    best = checkers.longest_monotone(seq)
    assert len(best) == max(_brute_longest(seq, True), _brute_longest(seq, False))


def test_monotone_tie_prefers_increasing():
    assert checkers.longest_monotone([2, 1, 3]) == [1, 3]
    assert checkers.longest_monotone([3, 1, 2]) == [1, 2]
    assert checkers.longest_monotone([3, 2, 1]) == [3, 2, 1]
    assert checkers.longest_monotone([1]) == [1]


@given(families(min_n=2, max_n=40, max_m=3))
def test_es_witness_guarantee(fam):
    w = checkers.es_witness(fam)
    assert len(w) >= checkers.es_guarantee(fam.n, fam.m)
    for X in itertools.combinations(w, 3):
        assert checkers.count_orders(fam, X) <= 2


def test_iroot_exact():
    assert [checkers.iroot(x, 2) for x in (0, 1, 3, 4, 15, 16, 17)] == [0, 1, 1, 2, 3, 4, 4]
    assert checkers.iroot(10**40, 4) == 10**10
    assert checkers.iroot(10**40 - 1, 4) == 10**10 - 1
    assert checkers.es_guarantee(17, 2) == 3
    assert checkers.es_guarantee(257, 3) == 3


def test_shattered_fraction_of_all_permutations():
    assert checkers.shattered_fraction(Family.of(all_perms(4)), 3) == Fraction(1)
    assert checkers.shattered_fraction(Family.of([(1, 2, 3, 4)]), 2) == 0
