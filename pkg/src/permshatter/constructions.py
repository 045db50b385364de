"""Explicit permutation-family constructions.

Every construction here is deterministic. The block-structured ones identify
``x`` in ``[b^L]`` with its base-``b`` digit string (most significant digit
first) and decide the order of ``x`` and ``y`` at the first digit where they
differ. That rule is realized by sorting on a per-element key vector, which
is exactly a lexicographic comparison of the keys.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import checkers
from .core import DomainError, Family, Permutation, position
from .separators import separating_system

# Q_1..Q_6; shared by q34 and fractional_family
Q34_PATTERNS: tuple[tuple[int, ...], ...] = (
    (1, 2, 3, 4),
    (2, 4, 1, 3),
    (3, 4, 1, 2),
    (1, 4, 3, 2),
    (4, 2, 3, 1),
    (3, 2, 1, 4),
)


class UnsupportedError(DomainError):
    """Parameters are valid in principle but outside what is implemented."""


@dataclass(frozen=True)
class CodedGround:
    """``[base ** length]`` with each element identified by its digit string."""

    base: int
    length: int

    def __post_init__(self) -> None:
        if self.base < 2 or self.length < 1:
            raise DomainError("need base >= 2 and length >= 1")

    @property
    def size(self) -> int:
        return self.base**self.length

    def encode(self, x: int) -> tuple[int, ...]:
        if not 1 <= x <= self.size:
            raise DomainError(f"{x} outside [1, {self.size}]")
        x -= 1
        digits = []
        for _ in range(self.length):
            x, d = divmod(x, self.base)
            digits.append(d + 1)
        return tuple(reversed(digits))

    def decode(self, code: Sequence[int]) -> int:
        if len(code) != self.length or any(not 1 <= d <= self.base for d in code):
            raise DomainError(f"bad code {tuple(code)}")
        x = 0
        for d in code:
            x = x * self.base + (d - 1)
        return x + 1

    def first_diff(self, x: int, y: int) -> int:
        """1-based index of the first differing digit; undefined for ``x == y``."""
        if x == y:
            raise DomainError("first_diff is undefined for equal elements")
        for i, (a, b) in enumerate(zip(self.encode(x), self.encode(y)), 1):
            if a != b:
                return i
        raise AssertionError("unreachable")

    def digit_matrix(self) -> np.ndarray:
        """``(size, length)`` array of 1-based digits, row ``x - 1`` for element ``x``."""
        return mixed_radix_digits((self.base,) * self.length)


def mixed_radix_digits(sides: Sequence[int]) -> np.ndarray:
    total = math.prod(sides)
    x = np.arange(total, dtype=np.int64)
    cols = []
    for s in reversed(sides):
        x, d = np.divmod(x, s)
        cols.append(d + 1)
    return np.stack(cols[::-1], axis=1)


def _order_by_keys(keys: np.ndarray) -> Permutation:
    """Sort elements ``1..N`` by key rows lexicographically (column 0 most significant)."""
    order = np.lexsort(keys.T[::-1]) + 1
    return Permutation(tuple(order.tolist()))


def blockwise(pattern: Sequence[int], ground: CodedGround) -> Permutation:
    """Apply a permutation of ``[base]`` to the blocks at every level."""
    pattern = Permutation(tuple(pattern))
    if pattern.n != ground.base:
        raise DomainError(f"pattern on [{pattern.n}] cannot order blocks of base {ground.base}")
    pos = np.asarray(pattern.positions, dtype=np.int64)
    return _order_by_keys(pos[ground.digit_matrix()])


def levelwise(increasing_levels: set[int] | frozenset[int], ground: CodedGround) -> Permutation:
    """Level ``i`` blocks ascend when ``i`` is in ``increasing_levels``, else descend."""
    digits = ground.digit_matrix()
    sign = np.array([1 if i in increasing_levels else -1 for i in range(1, ground.length + 1)])
    return _order_by_keys(digits * sign)


@dataclass
class ConstructionTrace:
    recipe: str
    parameters: dict = field(default_factory=dict)
    # {"kind": "total", "k": k} | {"kind": "partial", "k": k, "t": t}
    # | {"kind": "fraction", "k": k, "shattered_at_least": c}
    claimed_guarantee: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"recipe": self.recipe, "parameters": self.parameters, "claimed_guarantee": self.claimed_guarantee}


def verify_trace(family: Family, trace: ConstructionTrace, workers: int = 1) -> tuple[bool, dict]:
    """Check a trace's claimed guarantee against the emitted family."""
    claim = trace.claimed_guarantee
    k = claim["k"]
    if claim["kind"] == "total":
        ok, witness = checkers.satisfies_total(family, k, workers)
        return ok, {"witness": witness}
    if claim["kind"] == "partial":
        ok, witness = checkers.satisfies_partial(family, k, claim["t"], workers)
        return ok, {"witness": witness}
    if claim["kind"] == "fraction":
        report = checkers.coverage(family, k, materialize_cap=0, workers=workers)
        return report.shattered_count >= claim["shattered_at_least"], {"shattered_count": report.shattered_count}
    raise DomainError(f"unknown guarantee kind {claim['kind']!r}")


def q34() -> Family:
    return Family(4, tuple(Permutation(q) for q in Q34_PATTERNS))


def perfect_family(k: int) -> Family:
    """k! permutations of ``[k+1]`` shattering every k-tuple, found by exhaustive search."""
    if k not in (2, 3, 4):
        raise UnsupportedError(f"perfect_family supports k in {{2, 3, 4}}, got {k}")
    from .oracle import max_shattered

    report = max_shattered(k + 1, k, math.factorial(k))
    if report.optimum != k + 1:
        raise AssertionError(f"search found only {report.optimum} shattered {k}-tuples on [{k + 1}]")
    return report.witness


def normalize_with_identity(base: Family) -> Family:
    """Relabel ``base`` so it contains the increasing permutation.

    Relabeling values keeps the number of orders of every tuple, so coverage
    guarantees survive.
    """
    identity = Permutation.identity(base.n)
    if identity in base.members:
        return base
    first = base.members[0]
    return base.relabel([position(first, a) for a in range(1, base.n + 1)])


def little_construction(base: Family, n: int | None = None) -> Family:
    """From a family on ``[n]`` with 4 orders on every triple, build one on ``[n^n]``.

    Members: the base applied blockwise (one per base member), one level-wise
    ascending/descending permutation per partition of ``separating_system(n)``,
    and the fully decreasing permutation unless already present.
    """
    n = base.n if n is None else n
    if base.n != n:
        raise DomainError(f"base family lives on [{base.n}], expected [{n}]")
    if n < 3:
        raise DomainError("little_construction needs n >= 3")
    ok, witness = checkers.satisfies_partial(base, 3, 4)
    if not ok:
        raise DomainError(f"base family covers fewer than 4 orders on triple {witness}")
    base = normalize_with_identity(base)
    ground = CodedGround(n, n)
    members = [blockwise(P.order, ground) for P in base]
    for a, _ in separating_system(n).pairs():
        members.append(levelwise(a, ground))
    down = Permutation.decreasing(ground.size)
    if down not in members:
        members.append(down)
    return Family(ground.size, tuple(members))


def box_step(base: Family, sides: Sequence[int], check: bool = True) -> Family:
    """Lift a k-shattering family on ``[g]`` to the box ``[s_1] x ... x [s_k]``.

    For each base member ``P`` and direction ``j`` the new permutation orders
    points by where their coordinate-``j``-omitted projection sits in ``P``,
    ties by ascending element. Each projection is encoded in mixed radix and
    must fit in ``[g]``.
    """
    k = len(sides)
    if k < 2 or min(sides) < 1:
        raise DomainError(f"bad box sides {tuple(sides)}")
    for j in range(k):
        proj = math.prod(s for i, s in enumerate(sides) if i != j)
        if proj > base.n:
            raise DomainError(f"projection of size {proj} does not fit the base ground [{base.n}]")
    if check:
        ok, witness = checkers.satisfies_total(base, k)
        if not ok:
            raise DomainError(f"base family does not shatter {witness}")
    digits = mixed_radix_digits(sides)
    total = digits.shape[0]
    elements = np.arange(1, total + 1)
    members = []
    for P in base:
        pos = np.asarray(P.positions, dtype=np.int64)
        for j in range(k):
            rest = [i for i in range(k) if i != j]
            proj = np.zeros(total, dtype=np.int64)
            for i in rest:
                proj = proj * sides[i] + (digits[:, i] - 1)
            order = np.lexsort((elements, pos[proj + 1])) + 1
            members.append(Permutation(tuple(order.tolist())))
    return Family(total, tuple(members))


def kcube_step(base: Family, n: int, k: int, check: bool = True) -> Family:
    """From a family shattering k-tuples of ``[n^(k-1)]`` build one on ``[n^k]`` of size ``k|base|``."""
    if base.n != n ** (k - 1):
        raise DomainError(f"base ground {base.n} != n^(k-1) = {n ** (k - 1)}")
    return box_step(base, (n,) * k, check)


def _boxes(g: int, k: int):
    """Nondecreasing side tuples (sides >= 2) whose every (k-1)-fold product is at most ``g``.

    The largest projection omits the smallest side, so only ``s_2 * ... * s_k <= g`` binds.
    """

    def tails(count, lo, budget):
        if count == 0:
            yield ()
            return
        s = lo
        while s**count <= budget:
            for rest in tails(count - 1, s, budget // s):
                yield (s,) + rest
            s += 1

    for tail in tails(k - 1, 2, g):
        for smallest in range(2, tail[0] + 1):
            yield (smallest,) + tail


def choose_box(g: int, k: int, target: int) -> tuple[int, ...]:
    """The box for one lifting step from ground ``g``.

    Smallest product reaching ``target`` if one exists, else the largest product;
    ties go to the lexicographically least sides.
    """
    boxes = list(_boxes(g, k))
    if not boxes:
        raise DomainError(f"no box of {k} sides >= 2 fits a base ground of {g}")
    reaching = [b for b in boxes if math.prod(b) >= target]
    if reaching:
        return min(reaching, key=lambda b: (math.prod(b), b))
    return min(boxes, key=lambda b: (-math.prod(b), b))


def greedy_shattering_family(k: int, g: int) -> Family:
    """Deterministic greedy cover of all (k-tuple, pattern) pairs of ``[g]`` by members of ``S_g``.

    Starts from the identity and repeatedly adds the lexicographically least
    permutation covering the most uncovered pairs.
    """
    if math.factorial(g) > 50_000:
        raise UnsupportedError(f"greedy seed over S_{g} is too large")
    perms = list(itertools.permutations(range(1, g + 1)))
    everything = Family(g, tuple(Permutation(p) for p in perms))
    tuples = np.array(list(itertools.combinations(range(1, g + 1), k)), dtype=np.int32)
    ranks = checkers.tuple_ranks(everything, tuples).T  # (perms, tuples)
    covered = np.zeros((len(tuples), math.factorial(k)), dtype=bool)
    cols = np.arange(len(tuples))
    chosen = [0]
    covered[cols, ranks[0]] = True
    while not covered.all():
        gain = (~covered[cols[None, :], ranks]).sum(axis=1)
        best = int(np.argmax(gain))
        chosen.append(best)
        covered[cols, ranks[best]] = True
    return Family(g, tuple(everything.members[i] for i in chosen))


SEED_GROUND = {3: 4, 4: 8}


def shatter_seed(k: int) -> Family:
    if k == 3:
        return perfect_family(3)
    if k == 4:
        return greedy_shattering_family(4, SEED_GROUND[4])
    raise UnsupportedError(f"shatter_family supports k in {{3, 4}}, got {k}")


def shatter_plan(k: int, N: int) -> list[tuple[int, ...]]:
    """Box sides for each lifting step needed to reach a ground of at least ``N``."""
    g = SEED_GROUND.get(k)
    if g is None:
        raise UnsupportedError(f"shatter_family supports k in {{3, 4}}, got {k}")
    plan = []
    while g < N:
        box = choose_box(g, k, N)
        plan.append(box)
        g = math.prod(box)
    return plan


def shatter_family(k: int, N: int) -> Family:
    """A family on ``[N]`` shattering every k-tuple, by iterated lifting then restriction."""
    if N < k:
        raise DomainError(f"need N >= k, got N={N}, k={k}")
    family = shatter_seed(k)
    for box in shatter_plan(k, N):
        family = box_step(family, box, check=False)
    if family.n > N:
        family = family.restrict(range(1, N + 1))
    return family


def fractional_family(r: int) -> tuple[Family, int]:
    """Six permutations of ``[4^r]`` following Q_1..Q_6 at every block level.

    Returns the family and the guaranteed shattered-triple count ``n(n^2-1)/15``.
    """
    if r < 1:
        raise DomainError("fractional_family needs r >= 1")
    ground = CodedGround(4, r)
    family = Family(ground.size, tuple(blockwise(q, ground) for q in Q34_PATTERNS))
    n = ground.size
    return family, n * (n * n - 1) // 15


def first_level_shattered(r: int, triple: Sequence[int]) -> bool:
    """Whether a triple's codes first differ at one common level with three distinct digits there."""
    ground = CodedGround(4, r)
    codes = [ground.encode(x) for x in triple]
    for level in range(r):
        digits = {c[level] for c in codes}
        if len(digits) == 3:
            return True
        if len(digits) == 2:
            return False
    return False


@dataclass
class Built:
    family: Family
    trace: ConstructionTrace


def build(kind: str, **params) -> Built:
    """Dispatch a construction by name and attach its trace."""
    makers: dict[str, Callable[..., Built]] = {
        "q34": _build_q34,
        "perfect": _build_perfect,
        "little": _build_little,
        "kcube": _build_kcube,
        "shatter": _build_shatter,
        "fractional": _build_fractional,
    }
    if kind not in makers:
        raise DomainError(f"unknown construction {kind!r}; choose from {sorted(makers)}")
    return makers[kind](**params)


def _build_q34() -> Built:
    return Built(q34(), ConstructionTrace("q34", {"n": 4}, {"kind": "total", "k": 3}))


def _build_perfect(k: int) -> Built:
    fam = perfect_family(k)
    return Built(fam, ConstructionTrace("perfect", {"k": k, "n": k + 1}, {"kind": "total", "k": k}))


def _build_little(base: Family) -> Built:
    fam = little_construction(base)
    params = {
        "base_n": base.n,
        "base_size": base.m,
        "n": fam.n,
        "separating_system_size": len(separating_system(base.n)),
    }
    return Built(fam, ConstructionTrace("little", params, {"kind": "partial", "k": 3, "t": 4}))


def _build_kcube(base: Family, n: int, k: int) -> Built:
    fam = kcube_step(base, n, k)
    params = {"base_n": base.n, "base_size": base.m, "n": n, "k": k, "ground": fam.n}
    return Built(fam, ConstructionTrace("kcube", params, {"kind": "total", "k": k}))


def _build_shatter(k: int, N: int) -> Built:
    fam = shatter_family(k, N)
    params = {"k": k, "N": N, "plan": [list(b) for b in shatter_plan(k, N)]}
    return Built(fam, ConstructionTrace("shatter", params, {"kind": "total", "k": k}))


def _build_fractional(r: int) -> Built:
    fam, guaranteed = fractional_family(r)
    params = {"r": r, "n": fam.n, "total_triples": math.comb(fam.n, 3)}
    claim = {"kind": "fraction", "k": 3, "shattered_at_least": guaranteed}
    return Built(fam, ConstructionTrace("fractional", params, claim))
