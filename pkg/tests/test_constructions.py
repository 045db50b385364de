import itertools
import math

import pytest
from hypothesis import given, strategies as st

from conftest import brute_orders, permutations
from permshatter import checkers
from permshatter.constructions import (
    CodedGround,
    Q34_PATTERNS,
    UnsupportedError,
    blockwise,
    box_step,
    build,
    choose_box,
    fractional_family,
    first_level_shattered,
    greedy_shattering_family,
    kcube_step,
    levelwise,
    little_construction,
    normalize_with_identity,
    perfect_family,
    q34,
    shatter_family,
    shatter_plan,
    verify_trace,
)
from permshatter.core import DomainError, Family, Permutation, position


@given(st.integers(2, 5), st.integers(1, 4), st.data())
def test_coded_ground_round_trip(b, L, data):
    g = CodedGround(b, L)
    x = data.draw(st.integers(1, g.size))
    code = g.encode(x)
    assert len(code) == L and all(1 <= d <= b for d in code)
    assert g.decode(code) == x
    assert g.digit_matrix()[x - 1].tolist() == list(code)


def test_coded_ground_is_most_significant_first():
    g = CodedGround(4, 2)
    assert g.encode(1) == (1, 1) and g.encode(2) == (1, 2) and g.encode(5) == (2, 1)
    assert g.first_diff(1, 2) == 2 and g.first_diff(1, 5) == 1
    with pytest.raises(DomainError):
        g.first_diff(3, 3)


@given(permutations(3), st.integers(1, 3))
def test_blockwise_follows_pattern_at_first_difference(P, L):
    g = CodedGround(3, L)
    Q = blockwise(P.order, g)
    for x, y in itertools.combinations(range(1, g.size + 1), 2):
        i = g.first_diff(x, y)
        dx, dy = g.encode(x)[i - 1], g.encode(y)[i - 1]
        assert (position(Q, x) < position(Q, y)) == (position(P, dx) < position(P, dy))


@given(st.integers(2, 4), st.integers(1, 3), st.data())
def test_levelwise_direction_per_level(b, L, data):
    g = CodedGround(b, L)
    up = data.draw(st.sets(st.integers(1, L)))
    Q = levelwise(up, g)
    for x, y in itertools.combinations(range(1, g.size + 1), 2):
        i = g.first_diff(x, y)
        x_first = position(Q, x) < position(Q, y)
        # x < y means x has the smaller digit at level i
        assert x_first == (i in up)


def test_q34_patterns():
    assert q34().as_lists()[0] == [1, 2, 3, 4]
    assert len(set(Q34_PATTERNS)) == 6


def test_perfect_families():
    assert perfect_family(3) == q34().sorted()
    for k in (2, 3, 4):
        fam = perfect_family(k)
        assert (fam.n, fam.m) == (k + 1, math.factorial(k))
        assert checkers.satisfies_total(fam, k) == (True, None)
    with pytest.raises(UnsupportedError):
        perfect_family(5)


def test_normalize_with_identity_keeps_counts():
    base = Family.of([(2, 3, 1), (3, 2, 1), (1, 3, 2), (2, 1, 3)])
    norm = normalize_with_identity(base)
    assert Permutation.identity(3) in norm.members
    assert checkers.coverage(norm, 3).per_tuple_counts.tolist() == checkers.coverage(base, 3).per_tuple_counts.tolist()


SMALL_BASE = Family.of([(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1)])


def test_little_construction_on_three():
    fam = little_construction(SMALL_BASE)
    assert fam.n == 27
    assert fam.m == SMALL_BASE.m + 3 + 1
    assert checkers.satisfies_partial(fam, 3, 4) == (True, None)


def test_little_construction_drops_duplicate_decreasing():
    base = Family.of([(1, 2, 3), (2, 1, 3), (3, 2, 1), (1, 3, 2)])
    fam = little_construction(base)
    assert fam.m == 7
    assert len(set(fam.members)) == fam.m
    assert checkers.satisfies_partial(fam, 3, 4) == (True, None)


def test_little_construction_rejects_weak_base():
    with pytest.raises(DomainError):
        little_construction(Family.of([(1, 2, 3), (3, 2, 1)]))


def test_kcube_step_from_q34():
    fam = kcube_step(q34(), 2, 3)
    assert (fam.n, fam.m) == (8, 18)
    rep = checkers.coverage(fam, 3)
    assert rep.shattered_count == 56 and rep.min_count == 6
    with pytest.raises(DomainError):
        kcube_step(q34(), 3, 3)


@pytest.mark.parametrize("sides", [(2, 2, 2), (1, 2, 2), (1, 1, 4)])
def test_box_step_shatters_every_triple(sides):
    fam = box_step(q34(), sides)
    assert fam.n == math.prod(sides) and fam.m == 18
    assert checkers.satisfies_total(fam, 3) == (True, None)


def test_box_step_mixed_sides():
    base = kcube_step(q34(), 2, 3)
    fam = box_step(base, (2, 2, 3))
    assert (fam.n, fam.m) == (12, 54)
    assert checkers.satisfies_total(fam, 3) == (True, None)


def test_box_step_rejects_oversized_projection():
    with pytest.raises(DomainError):
        box_step(q34(), (2, 2, 0))
    with pytest.raises(DomainError):
        box_step(q34(), (3, 3, 3))


def test_box_choice_and_plans():
    assert choose_box(4, 3, 8) == (2, 2, 2)
    assert shatter_plan(3, 8) == [(2, 2, 2)]
    assert shatter_plan(3, 64) == [(2, 2, 2), (2, 2, 4), (4, 4, 4)]
    assert shatter_plan(3, 9) == [(2, 2, 2), (2, 2, 3)]
    assert shatter_plan(4, 100) == [(2, 2, 2, 2), (2, 2, 2, 4), (3, 3, 3, 3), (2, 2, 5, 5)]
    assert shatter_plan(3, 4) == []


@pytest.mark.parametrize("k, N", [(3, 4), (3, 5), (3, 9), (3, 20), (4, 8), (4, 12)])
def test_shatter_family_small(k, N):
    fam = shatter_family(k, N)
    assert fam.n == N
    assert checkers.satisfies_total(fam, k) == (True, None)


def test_greedy_seed_for_four():
    fam = greedy_shattering_family(4, 6)
    assert fam.members[0] == Permutation.identity(6)
    assert checkers.satisfies_total(fam, 4) == (True, None)


def test_fractional_small_levels():
    fam, guaranteed = fractional_family(1)
    assert fam == q34() and guaranteed == 4
    fam, guaranteed = fractional_family(2)
    assert (fam.n, fam.m, guaranteed) == (16, 6, 272)
    assert checkers.coverage(fam, 3).shattered_count == 272


def test_first_level_rule_matches_checker():
    fam, _ = fractional_family(2)
    rep = checkers.coverage(fam, 3)
    for X in itertools.combinations(range(1, 17), 3):
        if first_level_shattered(2, X):
            assert rep.count_for(X) == 6


@pytest.mark.parametrize("kind, params", [("q34", {}), ("perfect", {"k": 2}), ("kcube", {"base": None, "n": 2, "k": 3}), ("shatter", {"k": 3, "N": 10}), ("fractional", {"r": 2}), ("little", {"base": SMALL_BASE})])
def test_build_traces_verify(kind, params):
    if kind == "kcube":
        params = {**params, "base": q34()}
    built = build(kind, **params)
    ok, _ = verify_trace(built.family, built.trace)
    assert ok
    assert built.trace.to_json()["recipe"] == kind


def test_build_unknown_kind():
    with pytest.raises(DomainError):
        build("nope")
