import itertools
import math

from hypothesis import HealthCheck, settings, strategies as st

from permshatter.core import Family, Permutation

settings.register_profile(
    "repo",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@st.composite
def permutations(draw, n):
    return Permutation(tuple(draw(st.permutations(range(1, n + 1)))))


@st.composite
def families(draw, min_n=1, max_n=7, min_m=1, max_m=5):
    n = draw(st.integers(min_n, max_n))
    m = draw(st.integers(min_m, max_m))
    return Family(n, tuple(draw(permutations(n)) for _ in range(m)))


def brute_orders(family, X):
    """Number of distinct relative orders of X, compared pairwise by positions."""
    seen = set()
    for P in family:
        seen.add(tuple(sorted(X, key=lambda a: P.order.index(a))))
    return len(seen)


def brute_counts(family, k):
    return [brute_orders(family, X) for X in itertools.combinations(range(1, family.n + 1), k)]


def all_perms(n):
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


def total(k):
    return math.factorial(k)
