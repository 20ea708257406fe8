"""Exhaustive ground truth for small instances.

Every oracle refuses inputs above its size cap instead of running
unbounded; the caps default to sizes that finish within seconds.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Sequence

from .core import Permutation, pattern_of
from .geometry import PointCloud

DEFAULT_CAPS = {"exact_u": 7, "common_pattern": 10, "bottleneck": 7, "lis": 12}


class OracleRefusal(ValueError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_n: int | None = None  # None: the per-oracle default cap
    time_cap: float | None = 60.0

    def __post_init__(self):
        if self.max_n is not None and self.max_n < 1:
            raise ValueError("max_n must be positive")
        if self.time_cap is not None and self.time_cap <= 0:
            raise ValueError("time_cap must be positive")

    def cap(self, oracle: str) -> int:
        return self.max_n if self.max_n is not None else DEFAULT_CAPS[oracle]

    def admit(self, oracle: str, n: int) -> None:
        if n > self.cap(oracle):
            raise OracleRefusal(f"{oracle}: n={n} exceeds cap {self.cap(oracle)}")


class _Clock:
    def __init__(self, budget: OracleBudget, oracle: str):
        self.deadline = None if budget.time_cap is None else time.monotonic() + budget.time_cap
        self.oracle = oracle

    def tick(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise OracleRefusal(f"{self.oracle}: time cap exceeded")


def _set_partitions(n: int, blocks: int):
    """Restricted growth strings of length n using exactly ``blocks`` labels.

    Position 0 is always in block 0 and new blocks open in order, so each
    set partition appears once.
    """
    rgs = [0] * n

    def rec(i: int, used: int):
        if n - i < blocks - used:
            return
        if i == n:
            if used == blocks:
                yield rgs
            return
        for b in range(min(used + 1, blocks)):
            rgs[i] = b
            yield from rec(i + 1, max(used, b + 1))

    if n == 0:
        return
    yield from rec(1, 1)


def _fits(values: Sequence[int], shapes: list[list[int]], clock: _Clock) -> bool:
    """Can positions of ``values`` be split so block b is order-isomorphic to shapes[b]?"""
    n = len(values)
    filled: list[list[int]] = [[] for _ in shapes]

    def rec(i: int) -> bool:
        if i == n:
            return True
        clock.tick()
        v = values[i]
        tried: set = set()
        for b, shape in enumerate(shapes):
            t = len(filled[b])
            if t == len(shape):
                continue
            # blocks with identical remaining shape and identical prefix behave alike
            sig = (tuple(shape), tuple(filled[b]))
            if sig in tried:
                continue
            tried.add(sig)
            ok = all((v > filled[b][s]) == (shape[t] > shape[s]) for s in range(t))
            if not ok:
                continue
            filled[b].append(v)
            if rec(i + 1):
                return True
            filled[b].pop()
        return False

    return rec(0)


def exact_U(perms: Sequence[Permutation], budget: OracleBudget | None = None) -> int:
    """Smallest number of parts in a decomposition of all ``perms``."""
    budget = budget or OracleBudget()
    perms = list(perms)
    if not perms:
        raise ValueError("need at least one permutation")
    n = len(perms[0])
    if any(len(p) != n for p in perms):
        raise ValueError("permutations differ in length")
    budget.admit("exact_u", n)
    clock = _Clock(budget, "exact_u")
    if all(p == perms[0] for p in perms):
        return 1
    base = perms[0].values
    for ell in range(2, n + 1):
        for rgs in _set_partitions(n, ell):
            clock.tick()
            shapes: list[list[int]] = [[] for _ in range(ell)]
            for pos, b in enumerate(rgs):
                shapes[b].append(base[pos])
            if all(_fits(p.values, shapes, clock) for p in perms[1:]):
                return ell
    return n


def _patterns_of_size(p: Permutation, size: int) -> set:
    return {pattern_of(sub).values for sub in combinations(p.values, size)}


def longest_common_pattern(a: Permutation, b: Permutation, budget: OracleBudget | None = None) -> int:
    """Length of the longest pattern occurring in both ``a`` and ``b``."""
    budget = budget or OracleBudget()
    if len(a) != len(b):
        raise ValueError("permutations differ in length")
    n = len(a)
    budget.admit("common_pattern", n)
    clock = _Clock(budget, "common_pattern")
    for size in range(n, 0, -1):
        clock.tick()
        if _patterns_of_size(a, size) & _patterns_of_size(b, size):
            return size
    return 0


def _dist(p: tuple[float, float], q: tuple[float, float], metric: str) -> float:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    if metric == "euclidean":
        return math.sqrt(dx * dx + dy * dy)
    if metric == "chebyshev":
        return max(abs(dx), abs(dy))
    raise ValueError(f"unknown metric {metric!r}")


def brute_bottleneck(red: PointCloud, blue: PointCloud, metric: str = "euclidean",
                     budget: OracleBudget | None = None) -> float:
    """Minimum over all n! perfect matchings of the longest matched distance."""
    budget = budget or OracleBudget()
    if len(red) != len(blue):
        raise ValueError("cloud sizes differ")
    n = len(red)
    budget.admit("bottleneck", n)
    rp, bp = red.points(), blue.points()
    table = [[_dist(r, b, metric) for b in bp] for r in rp]
    return min(max(table[i][sigma[i]] for i in range(n)) for sigma in permutations(range(n)))


def brute_lis(p: Permutation, budget: OracleBudget | None = None) -> int:
    budget = budget or OracleBudget()
    n = len(p)
    budget.admit("lis", n)
    for size in range(n, 0, -1):
        for sub in combinations(p.values, size):
            if all(x < y for x, y in zip(sub, sub[1:])):
                return size
    return 0


def poisson_tail_bound(lam: float, x: float) -> float:
    """Upper bound (e*lam)^x e^(-lam) / x^x on P(X >= x) for X ~ Poisson(lam), x > lam."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    if not x > lam:
        raise ValueError(f"bound needs x > lambda (got x={x}, lambda={lam})")
    return math.exp(x * (1.0 + math.log(lam)) - lam - x * math.log(x))
