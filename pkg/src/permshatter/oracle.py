"""Exact search for optimal permutation families on tiny ground sets.

Two problems are solved exhaustively:

* ``min_family_size(n, k, t)``: the least ``m`` such that some ``m``
  permutations of ``[n]`` show at least ``t`` orders on every k-tuple;
* ``max_shattered(n, k, m)``: the most k-tuples that ``m`` permutations can
  shatter.

Both reduce to the feasibility question "is there an m-family in which at
least ``target`` tuples reach ``t`` orders?". Families are enumerated as
strictly increasing index sequences into ``S_n`` in lexicographic order with
the first member fixed to the identity (relabeling values preserves every
per-tuple order count, so this loses no optimum). A depth-first search stops
at the first feasible family, which is then the lexicographically least one.

A branch is cut when too few tuples can still reach ``t`` orders. For each
tuple the number of orders it can end with is bounded both by
``|current| + slots`` and by ``|current | union of patterns of all later
candidates|``; the latter uses precomputed suffix unions of the candidate
pattern masks.
"""
from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import checkers
from .core import DomainError, Family, Permutation, format_family

DEFAULT_NODE_BUDGET = 10**11
MAX_N = 7
MAX_K = 4


class SearchRefused(DomainError):
    def __init__(self, message: str, estimate: int) -> None:
        super().__init__(f"{message} (naive reduced search space ~{estimate:.3e} families)")
        self.estimate = estimate


class _BudgetExhausted(Exception):
    pass


@dataclass
class SearchReport:
    problem: dict
    optimum: int | None
    witness: Family | None
    nodes_explored: int
    proof_of_optimality: bool
    wall_time: float = 0.0
    detail: dict = field(default_factory=dict)

    def to_json(self, deterministic: bool = False) -> dict:
        doc = {
            "problem": self.problem,
            "optimum": self.optimum,
            "witness": None if self.witness is None else format_family(self.witness),
            "nodes_explored": self.nodes_explored,
            "proof_of_optimality": self.proof_of_optimality,
        }
        if self.detail:
            doc["detail"] = self.detail
        if not deterministic:
            doc["wall_time"] = round(self.wall_time, 6)
        return doc


class SearchSpace:
    """Candidate permutations of ``[n]`` (lexicographic) and their per-tuple pattern bits."""

    def __init__(self, n: int, k: int) -> None:
        if not 1 <= k <= n:
            raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
        if k > MAX_K:
            raise DomainError(f"exact search supports k <= {MAX_K}")
        if n > MAX_N:
            raise DomainError(f"exact search supports n <= {MAX_N}")
        self.n, self.k = n, k
        self.perms = [Permutation(p) for p in itertools.permutations(range(1, n + 1))]
        tuples = np.array(list(itertools.combinations(range(1, n + 1), k)), dtype=np.int32)
        ranks = checkers.tuple_ranks(Family(n, tuple(self.perms)), tuples).T  # (N, T)
        self.bits = np.left_shift(np.uint64(1), ranks.astype(np.uint64))
        N, T = self.bits.shape
        self.suffix = np.zeros((N + 1, T), dtype=np.uint64)
        self.suffix[:N] = np.bitwise_or.accumulate(self.bits[::-1], axis=0)[::-1]
        self.size = N
        self.tuple_count = T

    def family(self, indices) -> Family:
        return Family(self.n, tuple(self.perms[i] for i in indices))


@lru_cache(maxsize=None)
def _space(n: int, k: int) -> SearchSpace:
    return SearchSpace(n, k)


class _Feasibility:
    """DFS for an m-family (identity first) with >= target tuples reaching t orders."""

    def __init__(self, space: SearchSpace, m: int, t: int, target: int, budget: int) -> None:
        self.s = space
        self.m, self.t, self.target = m, t, target
        self.budget = budget
        self.nodes = 0

    def children(self, last: int, masks: np.ndarray, slots: int) -> tuple[np.ndarray, np.ndarray]:
        """Surviving child indices (ascending) and their masks."""
        s = self.s
        cand = np.arange(last + 1, s.size - slots + 1)
        if cand.size == 0:
            return cand, np.empty((0, s.tuple_count), dtype=np.uint64)
        new = masks[None, :] | s.bits[cand]
        have = np.bitwise_count(new).astype(np.int64)
        reach = np.minimum(have + (slots - 1), np.bitwise_count(new | s.suffix[cand + 1]))
        alive = (reach >= self.t).sum(axis=1)
        keep = alive >= self.target
        return cand[keep], new[keep]

    def leaf_ok(self, masks: np.ndarray) -> bool:
        return int((np.bitwise_count(masks) >= self.t).sum()) >= self.target

    def dfs(self, last: int, masks: np.ndarray, slots: int) -> list[int] | None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise _BudgetExhausted
        if slots == 0:
            return [] if self.leaf_ok(masks) else None
        cand, new = self.children(last, masks, slots)
        for c, child in zip(cand.tolist(), new):
            found = self.dfs(c, child, slots - 1)
            if found is not None:
                return [c] + found
        return None

    def root(self):
        return 0, self.s.bits[0].copy(), self.m - 1


_worker_space: SearchSpace | None = None


def _init_worker(n: int, k: int) -> None:
    global _worker_space
    _worker_space = _space(n, k)


def _run_subtree(args):
    m, t, target, budget, c = args
    search = _Feasibility(_worker_space, m, t, target, budget)
    masks = _worker_space.bits[0] | _worker_space.bits[c]
    try:
        found = search.dfs(c, masks, m - 2)
    except _BudgetExhausted:
        return "budget", search.nodes
    return (None if found is None else [c] + found), search.nodes


def _feasible(space: SearchSpace, m: int, t: int, target: int, budget: int, threads: int):
    """Return ``(indices | None, nodes, exhausted)``; indices include the leading identity."""
    search = _Feasibility(space, m, t, target, budget)
    last, masks, slots = search.root()
    if m == 1:
        search.nodes = 1
        return ([0] if search.leaf_ok(masks) else None), 1, False
    if threads <= 1:
        try:
            found = search.dfs(last, masks, slots)
        except _BudgetExhausted:
            return None, search.nodes, True
        return (None if found is None else [0] + found), search.nodes, False
    cand, _ = search.children(last, masks, slots)
    nodes = 1
    tasks = [(m, t, target, budget, c) for c in cand.tolist()]
    with ProcessPoolExecutor(threads, initializer=_init_worker, initargs=(space.n, space.k)) as pool:
        futures = [pool.submit(_run_subtree, task) for task in tasks]
        for i, fut in enumerate(futures):
            found, used = fut.result()
            nodes += used
            if found == "budget" or nodes > budget:
                for f in futures[i + 1:]:
                    f.cancel()
                return None, nodes, True
            if found is not None:
                for f in futures[i + 1:]:
                    f.cancel()
                return [0] + found, nodes, False
    return None, nodes, False


def _threads(threads: int | None) -> int:
    env = os.environ.get("SHATTER_THREADS")
    if env:
        return max(1, int(env))
    return 1 if threads is None else max(1, threads)


def _check_instance(n: int, k: int, m_hint: int) -> SearchSpace:
    if k > MAX_K or n > MAX_N:
        estimate = math.comb(math.factorial(n) - 1, max(m_hint - 1, 0))
        raise SearchRefused(f"instance n={n}, k={k} exceeds the exact-search cap (n <= {MAX_N}, k <= {MAX_K})", estimate)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    return _space(n, k)


def min_family_size(n: int, k: int, t: int, *, node_budget: int = DEFAULT_NODE_BUDGET, threads: int | None = None) -> SearchReport:
    """Exact ``f_k(n, t)``: smallest family showing >= t orders on every k-tuple."""
    if not 1 <= t <= math.factorial(k):
        raise DomainError(f"t={t} outside 1..{k}!")
    space = _check_instance(n, k, t)
    threads = _threads(threads)
    start = time.perf_counter()
    nodes = 0
    problem = {"kind": "min", "n": n, "k": k, "t": t}
    # fewer than t members cannot show t distinct orders
    for m in range(t, space.size + 1):
        found, used, exhausted = _feasible(space, m, t, space.tuple_count, node_budget - nodes, threads)
        nodes += used
        if exhausted:
            return SearchReport(problem, None, None, nodes, False, time.perf_counter() - start, {"unresolved_size": m})
        if found is not None:
            witness = space.family(found)
            ok, _ = checkers.satisfies_partial(witness, k, t)
            assert ok, "search witness failed re-verification"
            return SearchReport(problem, m, witness, nodes, True, time.perf_counter() - start)
    raise AssertionError("S_n itself should be feasible")


def max_shattered(n: int, k: int, m: int, *, node_budget: int = DEFAULT_NODE_BUDGET, threads: int | None = None) -> SearchReport:
    """Exact maximum number of k-tuples of ``[n]`` shattered by ``m`` distinct permutations.

    Targets are raised past each witness's measured count until a target is
    refuted; the last witness is the lexicographically least optimal family.
    """
    if m < 1:
        raise DomainError("m must be >= 1")
    space = _check_instance(n, k, m)
    if m > space.size:
        raise DomainError(f"only {space.size} distinct permutations of [{n}] exist")
    threads = _threads(threads)
    full = math.factorial(k)
    start = time.perf_counter()
    problem = {"kind": "max", "n": n, "k": k, "m": m}
    best = 0
    witness = space.family(range(m))
    nodes = 0
    target = 1
    while target <= space.tuple_count:
        found, used, exhausted = _feasible(space, m, full, target, node_budget - nodes, threads)
        nodes += used
        if exhausted:
            return SearchReport(problem, best, witness, nodes, False, time.perf_counter() - start)
        if found is None:
            break
        witness = space.family(found)
        best = checkers.coverage(witness, k).shattered_count
        assert best >= target, "search witness failed re-verification"
        target = best + 1
    return SearchReport(problem, best, witness, nodes, True, time.perf_counter() - start)


@dataclass
class ProbeResult:
    k: int
    m: int
    values: list[tuple[int, Fraction | None]]
    non_increasing: bool
    partial: bool

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "values": [{"n": n, "F": None if f is None else str(f)} for n, f in self.values],
            "non_increasing": self.non_increasing,
            "partial": self.partial,
        }


def monotonicity_probe(k: int, m: int, n_range, *, node_budget: int = DEFAULT_NODE_BUDGET, threads: int | None = None) -> ProbeResult:
    """``F_k(n, m)`` for each n in range and whether it is non-increasing in n."""
    values: list[tuple[int, Fraction | None]] = []
    partial = False
    for n in n_range:
        try:
            report = max_shattered(n, k, m, node_budget=node_budget, threads=threads)
        except DomainError:
            values.append((n, None))
            partial = True
            continue
        if not report.proof_of_optimality:
            partial = True
            values.append((n, None))
            continue
        values.append((n, Fraction(report.optimum, math.comb(n, k))))
    known = [f for _, f in values if f is not None]
    return ProbeResult(k, m, values, all(a >= b for a, b in zip(known, known[1:])), partial)


def _insertions(p: tuple[int, ...], x: int):
    for i in range(len(p) + 1):
        yield p[:i] + (x,) + p[i:]


def perfect_family_classes(n: int = 4, k: int = 3) -> dict:
    """Enumerate all k!-families on ``[n]`` shattering every k-tuple, up to relabeling and reversal."""
    space = _space(n, k)
    full = math.factorial(k)
    everything = (1 << full) - 1
    bits = space.bits.astype(object)
    families = []
    for combo in itertools.combinations(range(space.size), full):
        masks = [0] * space.tuple_count
        for c in combo:
            for j in range(space.tuple_count):
                masks[j] |= int(bits[c, j])
        if all(mk == everything for mk in masks):
            families.append(frozenset(space.perms[c].order for c in combo))
    sigmas = list(itertools.permutations(range(1, n + 1)))

    def canon(fam):
        images = []
        for sigma in sigmas:
            relabeled = [tuple(sigma[v - 1] for v in p) for p in fam]
            images.append(tuple(sorted(relabeled)))
            images.append(tuple(sorted(p[::-1] for p in relabeled)))
        return min(images)

    classes = {canon(f) for f in families}
    return {"families": len(families), "classes": len(classes)}


def extension_census() -> dict:
    """Insert element 5 into every member of Q_3(4) in every way; count unshattered triples.

    A 6-family on ``[5]`` shattering 9 or more triples would, after relabeling
    so the unshattered triple (if any) contains 5, restrict to a perfect family
    on ``[4]``. If that perfect family is unique up to relabeling and reversal
    (also checked here), every such family is an extension of Q_3(4).
    """
    from .constructions import Q34_PATTERNS

    least = None
    checked = 0
    worst_example = None
    choices = [list(_insertions(q, 5)) for q in Q34_PATTERNS]
    for members in itertools.product(*choices):
        fam = Family(5, tuple(Permutation(p) for p in members))
        bad = checkers.coverage(fam, 3, materialize_cap=0, witness_limit=0).unshattered_count
        checked += 1
        if least is None or bad < least:
            least, worst_example = bad, fam
    classes = perfect_family_classes(4, 3)
    return {
        "extensions_checked": checked,
        "min_unshattered": least,
        "all_leave_two": least >= 2,
        "perfect_families_on_4": classes["families"],
        "perfect_family_classes_on_4": classes["classes"],
        "best_extension": format_family(worst_example),
    }

