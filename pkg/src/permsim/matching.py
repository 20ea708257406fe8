"""Bottleneck (minimax) perfect matching between two point clouds.

Feasibility at a distance threshold ``t`` is a maximum-cardinality bipartite
matching on the red-blue pairs at distance <= t. Candidate pairs come from
bucketing the blue points into square cells of side >= t and scanning the
3x3 block of cells around each red point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numba import njit

from .geometry import PointCloud

Metric = Literal["euclidean", "chebyshev"]
Mode = Literal["auto", "exact", "threshold-doubling"]

# auto mode switches from exact search to threshold doubling above this size
EXACT_MAX_N = 20_000

# smallest bucket side; any side >= t is correct, this only bounds the key range
_MIN_SIDE = 1e-7


@dataclass(frozen=True)
class BottleneckMatching:
    blue_of_red: np.ndarray  # 0-based blue index matched to each red point
    bottleneck: float
    metric: str = "euclidean"

    def __len__(self) -> int:
        return len(self.blue_of_red)

    def pairs(self) -> list[tuple[int, int]]:
        """Matched (red, blue) pairs, 1-indexed."""
        return [(i + 1, int(b) + 1) for i, b in enumerate(self.blue_of_red)]

    def is_perfect(self) -> bool:
        n = len(self.blue_of_red)
        b = np.asarray(self.blue_of_red)
        return bool(np.all(b >= 0)) and len(np.unique(b)) == n and (n == 0 or b.max() < n)

    def to_json(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs()], "bottleneck": self.bottleneck,
                "metric": self.metric}


@dataclass(frozen=True)
class PartialMatching:
    blue_of_red: np.ndarray  # -1 for unmatched red points
    cardinality: int

    def pairs(self) -> list[tuple[int, int]]:
        return [(i + 1, int(b) + 1) for i, b in enumerate(self.blue_of_red) if b >= 0]


def distances(red: PointCloud, blue: PointCloud, ri, bi, metric: Metric = "euclidean") -> np.ndarray:
    dx = red.xs[ri] - blue.xs[bi]
    dy = red.ys[ri] - blue.ys[bi]
    if metric == "euclidean":
        return np.sqrt(dx * dx + dy * dy)
    if metric == "chebyshev":
        return np.maximum(np.abs(dx), np.abs(dy))
    raise ValueError(f"unknown metric {metric!r}")


def diameter(metric: Metric) -> float:
    return math.sqrt(2.0) if metric == "euclidean" else 1.0


def candidate_edges(red: PointCloud, blue: PointCloud, t: float, metric: Metric = "euclidean"):
    """All (red, blue) index pairs at distance <= t, with their distances."""
    if t < 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    side = max(float(t), _MIN_SIDE)
    rcx = np.floor(red.xs / side).astype(np.int64)
    rcy = np.floor(red.ys / side).astype(np.int64)
    bcx = np.floor(blue.xs / side).astype(np.int64)
    bcy = np.floor(blue.ys / side).astype(np.int64)
    width = int(max(rcy.max(), bcy.max())) + 3
    bkey = (bcx + 1) * width + (bcy + 1)
    border = np.argsort(bkey, kind="stable")
    bkey_sorted = bkey[border]

    red_parts, blue_parts = [], []
    n_red = len(red)
    for ox in (-1, 0, 1):
        for oy in (-1, 0, 1):
            target = (rcx + ox + 1) * width + (rcy + oy + 1)
            lo = np.searchsorted(bkey_sorted, target, side="left")
            hi = np.searchsorted(bkey_sorted, target, side="right")
            counts = hi - lo
            total = int(counts.sum())
            if total == 0:
                continue
            ri = np.repeat(np.arange(n_red, dtype=np.int64), counts)
            starts = np.repeat(lo - np.cumsum(counts) + counts, counts)
            pos = starts + np.arange(total, dtype=np.int64)
            red_parts.append(ri)
            blue_parts.append(border[pos])
    if not red_parts:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty, np.empty(0)
    ri = np.concatenate(red_parts)
    bi = np.concatenate(blue_parts)
    d = distances(red, blue, ri, bi, metric)
    keep = d <= t
    return ri[keep], bi[keep], d[keep]


@njit(cache=True)
def _hopcroft_karp(n_left, n_right, indptr, indices, weights, thr, init):
    # rows are sorted by weight; only the prefix with weight <= thr is live
    end = np.empty(n_left, np.int64)
    for u in range(n_left):
        e = indptr[u]
        while e < indptr[u + 1] and weights[e] <= thr:
            e += 1
        end[u] = e
    match_l = init.copy()
    match_r = np.full(n_right, -1, np.int64)
    # drop warm-start pairs whose edge is absent
    for u in range(n_left):
        v = match_l[u]
        if v < 0:
            continue
        ok = False
        for e in range(indptr[u], end[u]):
            if indices[e] == v:
                ok = True
                break
        if ok and match_r[v] == -1:
            match_r[v] = u
        else:
            match_l[u] = -1
    # greedy fill
    for u in range(n_left):
        if match_l[u] == -1:
            for e in range(indptr[u], end[u]):
                v = indices[e]
                if match_r[v] == -1:
                    match_l[u] = v
                    match_r[v] = u
                    break

    inf = n_left + 1
    dist = np.empty(n_left, np.int64)
    queue = np.empty(n_left, np.int64)
    stack = np.empty(n_left + 1, np.int64)
    it = np.empty(n_left, np.int64)
    while True:
        head = 0
        tail = 0
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0
                queue[tail] = u
                tail += 1
            else:
                dist[u] = inf
        found = False
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(indptr[u], end[u]):
                w = match_r[indices[e]]
                if w == -1:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue[tail] = w
                    tail += 1
        if not found:
            break
        for u in range(n_left):
            it[u] = indptr[u]
        for root in range(n_left):
            if match_l[root] != -1 or dist[root] != 0:
                continue
            sp = 0
            stack[0] = root
            augmented = False
            while sp >= 0 and not augmented:
                x = stack[sp]
                advanced = False
                while it[x] < end[x]:
                    v = indices[it[x]]
                    w = match_r[v]
                    if w == -1:
                        for i in range(sp, -1, -1):
                            a = stack[i]
                            b = indices[it[a]]
                            match_l[a] = b
                            match_r[b] = a
                        augmented = True
                        break
                    if dist[w] == dist[x] + 1:
                        sp += 1
                        stack[sp] = w
                        advanced = True
                        break
                    it[x] += 1
                if not augmented and not advanced:
                    dist[x] = inf
                    sp -= 1
                    if sp >= 0:
                        it[stack[sp]] += 1
    return match_l


@njit(cache=True)
def _rows_by_weight(n_rows, ri, bi, d):
    counts = np.zeros(n_rows + 1, np.int64)
    for e in range(len(ri)):
        counts[ri[e] + 1] += 1
    indptr = np.cumsum(counts)
    fill = indptr[:-1].copy()
    indices = np.empty(len(ri), np.int64)
    weights = np.empty(len(ri), np.float64)
    for e in range(len(ri)):
        u = ri[e]
        indices[fill[u]] = bi[e]
        weights[fill[u]] = d[e]
        fill[u] += 1
    for u in range(n_rows):
        a, b = indptr[u], indptr[u + 1]
        if b - a > 1:
            order = np.argsort(weights[a:b], kind="mergesort")
            indices[a:b] = indices[a:b][order]
            weights[a:b] = weights[a:b][order]
    return indptr, indices, weights


class _Adjacency:
    """Red-side adjacency lists, each sorted by increasing distance."""

    def __init__(self, n_red: int, n_blue: int, ri: np.ndarray, bi: np.ndarray, d: np.ndarray):
        self.n_red = n_red
        self.n_blue = n_blue
        self.indptr, self.indices, self.weights = _rows_by_weight(
            n_red, np.asarray(ri, dtype=np.int64), np.asarray(bi, dtype=np.int64),
            np.asarray(d, dtype=np.float64))

    def max_matching(self, thr: float, init: np.ndarray | None = None) -> np.ndarray:
        """Maximum-cardinality matching on edges of weight <= thr; -1 marks unmatched reds."""
        if init is None:
            init = np.full(self.n_red, -1, dtype=np.int64)
        return _hopcroft_karp(self.n_red, self.n_blue, self.indptr, self.indices, self.weights,
                              float(thr), np.asarray(init, dtype=np.int64))


def _check_inputs(red: PointCloud, blue: PointCloud) -> None:
    if len(red) != len(blue):
        raise ValueError(f"cloud sizes differ: {len(red)} vs {len(blue)}")
    if len(red) == 0:
        raise ValueError("cannot match empty clouds")
    for c in (red, blue):
        if not (np.all(np.isfinite(c.xs)) and np.all(np.isfinite(c.ys))):
            raise ValueError("non-finite coordinate")


def max_matching_under_threshold(red: PointCloud, blue: PointCloud, t: float,
                                 metric: Metric = "euclidean") -> PartialMatching:
    ri, bi, d = candidate_edges(red, blue, t, metric)
    match = _Adjacency(len(red), len(blue), ri, bi, d).max_matching(t)
    return PartialMatching(match, int(np.count_nonzero(match >= 0)))


def doubling_start(n: int) -> float:
    return math.log(n) ** 0.75 / math.sqrt(n) if n >= 2 else 0.0


def _finish(red, blue, match, metric) -> BottleneckMatching:
    d = distances(red, blue, np.arange(len(red)), match, metric)
    return BottleneckMatching(match, float(d.max()), metric)


def _doubling(red, blue, metric, t0):
    n = len(red)
    t = max(t0, _MIN_SIDE)
    diam = diameter(metric)
    while True:
        ri, bi, d = candidate_edges(red, blue, t, metric)
        adj = _Adjacency(n, n, ri, bi, d)
        match = adj.max_matching(t)
        if np.all(match >= 0):
            return match, adj, (ri, bi, d)
        if t >= diam:
            raise AssertionError("complete bipartite graph without perfect matching")
        t = min(2 * t, diam)


def bottleneck_matching(red: PointCloud, blue: PointCloud, mode: Mode = "auto",
                        metric: Metric = "euclidean") -> BottleneckMatching:
    """Perfect matching of red to blue minimising the longest matched edge.

    ``exact`` binary-searches the distinct red-blue distances;
    ``threshold-doubling`` doubles a threshold from log(n)^(3/4)/sqrt(n)
    until a perfect matching exists and keeps that matching, which is within
    a factor 2 of optimal (or below the start threshold).
    """
    _check_inputs(red, blue)
    n = len(red)
    if metric not in ("euclidean", "chebyshev"):
        raise ValueError(f"unknown metric {metric!r}")
    if mode == "auto":
        mode = "exact" if n <= EXACT_MAX_N else "threshold-doubling"
    if n == 1:
        return _finish(red, blue, np.zeros(1, dtype=np.int64), metric)

    match, adj, (ri, bi, d) = _doubling(red, blue, metric, doubling_start(n))
    if mode == "threshold-doubling":
        return _finish(red, blue, match, metric)
    if mode != "exact":
        raise ValueError(f"unknown matching mode {mode!r}")

    # every point must reach its nearest partner, so the optimum is at least
    # the largest nearest-neighbour distance on either side
    near_red = np.full(n, np.inf)
    near_blue = np.full(n, np.inf)
    np.minimum.at(near_red, ri, d)
    np.minimum.at(near_blue, bi, d)
    lower = max(near_red.max(), near_blue.max())

    levels = np.unique(d)
    lo = int(np.searchsorted(levels, lower, side="left"))
    hi = len(levels) - 1
    best = match
    while lo < hi:
        mid = (lo + hi) // 2
        cand = adj.max_matching(levels[mid], best)
        if np.all(cand >= 0):
            hi = mid
            best = cand
        else:
            lo = mid + 1
    if not np.all(best >= 0) or distances(red, blue, np.arange(n), best, metric).max() > levels[lo]:
        best = adj.max_matching(levels[lo])
    return _finish(red, blue, best, metric)
