"""End-to-end decomposition of k permutations into order-isomorphic parts.

The grid construction embeds every permutation as a point cloud, matches
cloud 1 to each other cloud with a bottleneck matching, labels each red
point by the cell offsets of its partners, and splits every label class
into matchings by edge colouring. The baseline covers each permutation by
patience piles and cuts the piles into aligned, equal-length pieces.
"""

from __future__ import annotations

import json
import math
import time
from bisect import bisect_right
from dataclasses import dataclass, field, replace
from typing import Sequence

from .coloring import color_classes, edge_color, max_degree
from .core import Decomposition, Part, Permutation, verify_decomposition
from .geometry import SamplerConfig, embed_permutation, permutation_of_cloud, sample_cloud
from .gridgraph import GridConfig, build_multigraph, grid_size, group_by_label
from .matching import bottleneck_matching


class InternalError(RuntimeError):
    """A produced decomposition failed verification."""


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 2
    sampler: SamplerConfig = field(default_factory=SamplerConfig)
    metric: str = "euclidean"
    matching_mode: str = "auto"
    M_override: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if self.M_override is not None and self.M_override < 1:
            raise ValueError("M_override must be >= 1")


@dataclass
class RunRecord:
    n: int
    k: int
    M: int
    bottleneck: list[float]
    label_count: int
    max_label_degree: int
    part_count: int
    wall_time_ms: float
    seed: int
    method: str = "grid"

    def to_json(self) -> dict:
        return {
            "n": self.n, "k": self.k, "M": self.M, "bottleneck": self.bottleneck,
            "label_count": self.label_count, "max_label_degree": self.max_label_degree,
            "part_count": self.part_count, "wall_time_ms": self.wall_time_ms, "seed": self.seed,
            "method": self.method,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _check(perms: Sequence[Permutation], d: Decomposition) -> Decomposition:
    verdict = verify_decomposition(perms, d)
    if not verdict:
        raise InternalError(f"decomposition failed verification: {verdict.message}")
    return d


def random_permutations(n: int, k: int, cfg: PipelineConfig | None = None) -> list[Permutation]:
    """k independent uniform permutations of length n, reproducible from ``cfg.seed``."""
    cfg = cfg or PipelineConfig(k=k)
    sampler = replace(cfg.sampler, seed=cfg.seed)
    return [permutation_of_cloud(sample_cloud(n, sampler, j)) for j in range(k)]


def decompose(perms: Sequence[Permutation] | None = None, cfg: PipelineConfig | None = None,
              *, fresh: int | None = None) -> tuple[list[Permutation], Decomposition, RunRecord]:
    """Decompose ``perms`` (or ``fresh`` random permutations of that length).

    Returns the permutations actually decomposed, the verified decomposition
    and its run record. Validity does not depend on the randomness; only the
    number of parts does.
    """
    cfg = cfg or PipelineConfig()
    start = time.perf_counter()
    if (perms is None) == (fresh is None):
        raise ValueError("pass exactly one of perms or fresh")
    if fresh is not None:
        if fresh < 2:
            raise ValueError("fresh mode needs n >= 2")
        sampler = replace(cfg.sampler, seed=cfg.seed)
        clouds = [sample_cloud(fresh, sampler, j) for j in range(cfg.k)]
        perms = [permutation_of_cloud(c) for c in clouds]
    else:
        perms = list(perms)
        if len(perms) != cfg.k:
            raise ValueError(f"config expects k={cfg.k}, got {len(perms)} permutations")
        if len({len(p) for p in perms}) != 1:
            raise ValueError("permutations differ in length")
        clouds = [embed_permutation(p, cfg.seed, j) for j, p in enumerate(perms)]
    n, k = len(perms[0]), cfg.k

    matchings = [bottleneck_matching(clouds[0], clouds[j], cfg.matching_mode, cfg.metric)
                 for j in range(1, k)]
    M = cfg.M_override or (grid_size(n, k) if n >= 2 else 1)
    graph = build_multigraph(clouds, matchings, GridConfig(M, k, n))

    parts = []
    max_deg = 0
    groups = group_by_label(graph)
    for label in sorted(groups):
        sub = groups[label]
        edges = sub.edge_list()
        max_deg = max(max_deg, max_degree(edges))
        for cls in color_classes(edge_color(edges), edges):
            if not cls:
                continue
            bound = sub.binding[cls] + 1
            parts.append(Part(tuple(tuple(sorted(bound[:, j].tolist())) for j in range(k))))

    d = _check(perms, Decomposition(n, k, tuple(parts)))
    record = RunRecord(
        n=n, k=k, M=M, bottleneck=[m.bottleneck for m in matchings], label_count=len(groups),
        max_label_degree=max_deg, part_count=len(d),
        wall_time_ms=(time.perf_counter() - start) * 1000.0, seed=cfg.seed,
    )
    return perms, d, record


def patience_piles(p: Permutation, decreasing: bool = True) -> list[list[int]]:
    """Greedy cover of ``p`` by monotone subsequences, as lists of positions.

    With ``decreasing`` each value goes on the leftmost pile whose top is
    larger; the pile count is then the longest increasing subsequence length.
    """
    tops: list[int] = []
    piles: list[list[int]] = []
    for pos, value in enumerate(p.values, start=1):
        key = value if decreasing else -value
        i = bisect_right(tops, key)
        if i == len(tops):
            tops.append(key)
            piles.append([pos])
        else:
            tops[i] = key
            piles[i].append(pos)
    return piles


def baseline_decompose(perms: Sequence[Permutation], *, increasing: bool = False,
                       seed: int = 0) -> tuple[Decomposition, RunRecord]:
    """Cut-and-align of monotone pile covers.

    Piles of each permutation are taken longest first; each step emits a part
    of length equal to the shortest remaining current pile, consuming that
    many leading positions from every permutation's current pile. Prefixes of
    monotone sequences stay monotone and equal-length monotone sequences are
    order-isomorphic.
    """
    start = time.perf_counter()
    perms = list(perms)
    if len({len(p) for p in perms}) != 1:
        raise ValueError("permutations differ in length")
    n, k = len(perms[0]), len(perms)
    stacks = [sorted(patience_piles(p, not increasing), key=len, reverse=True) for p in perms]
    cursor = [[0, 0] for _ in range(k)]  # (pile, offset) per permutation
    parts = []
    while cursor[0][0] < len(stacks[0]):
        take = min(len(stacks[j][cursor[j][0]]) - cursor[j][1] for j in range(k))
        lists = []
        for j in range(k):
            pile_i, off = cursor[j]
            lists.append(tuple(stacks[j][pile_i][off:off + take]))
            off += take
            if off == len(stacks[j][pile_i]):
                cursor[j] = [pile_i + 1, 0]
            else:
                cursor[j] = [pile_i, off]
        parts.append(Part(tuple(lists)))
    d = _check(perms, Decomposition(n, k, tuple(parts)))
    record = RunRecord(
        n=n, k=k, M=0, bottleneck=[], label_count=1,
        max_label_degree=max(len(s) for s in stacks), part_count=len(d),
        wall_time_ms=(time.perf_counter() - start) * 1000.0, seed=seed, method="baseline",
    )
    return d, record


def scaling_exponents(k: int) -> tuple[float, float]:
    """(power of n, power of ln n) in the part-count envelope for k permutations."""
    return (k - 1) / (2 * k - 1), 1.5 * (k - 1) + 1 / (2 * k - 1)


@dataclass(frozen=True)
class ScalingPoint:
    n: int
    ell: int
    ratio: float


def pipeline_stats(record: RunRecord) -> ScalingPoint:
    """Part count normalised by n^a ln(n)^b (a=1/3, b=11/6 for k=2)."""
    if record.n < 2:
        raise ValueError("normalised ratio needs n >= 2")
    a, b = scaling_exponents(record.k)
    scale = record.n ** a * math.log(record.n) ** b
    return ScalingPoint(record.n, record.part_count, record.part_count / scale)
