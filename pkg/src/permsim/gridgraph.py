"""Grid discretisation and the displacement-labelled bipartite multigraph.

Each red point contributes one edge from its row vertex to its column
vertex. The label is the cell offset of every matched point relative to
the red point's cell. Edges that share a label and form a matching select
points in distinct rows and columns whose matched partners are all shifted
by the same amount, so every permutation sees the same pattern on them.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import PointCloud
from .matching import BottleneckMatching


def grid_size(n: int, k: int = 2) -> int:
    """ceil(n^(1/2 + 1/(2(2k-1))) / ln(n)^(1/(2k-1))), at least 1."""
    if n < 2:
        raise ValueError("grid_size needs n >= 2")
    if k < 2:
        raise ValueError("grid_size needs k >= 2")
    q = 2 * k - 1
    value = n ** (0.5 + 1.0 / (2 * q)) * math.log(n) ** (-1.0 / q)
    return max(1, math.ceil(value))


@dataclass(frozen=True)
class GridConfig:
    M: int
    k: int = 2
    n: int = 0

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.k < 2:
            raise ValueError("k must be >= 2")

    @classmethod
    def default(cls, n: int, k: int = 2) -> "GridConfig":
        return cls(grid_size(n, k) if n >= 2 else 1, k, n)


def cell_of(p: tuple[float, float], M: int) -> tuple[int, int]:
    """(row, col) of point ``p = (x, y)``, 1-based; coordinate 1.0 falls in cell M."""
    x, y = p
    col = min(int(math.floor(x * M)) + 1, M)
    row = min(int(math.floor(y * M)) + 1, M)
    return row, col


def cells_of(c: PointCloud, M: int) -> tuple[np.ndarray, np.ndarray]:
    rows = np.minimum(np.floor(c.ys * M).astype(np.int64) + 1, M)
    cols = np.minimum(np.floor(c.xs * M).astype(np.int64) + 1, M)
    return rows, cols


@dataclass(frozen=True)
class LabeledMultigraph:
    """Edges as parallel arrays.

    ``binding[e]`` holds the 0-based point index in each of the k clouds
    (column 0 is the red point); ``labels[e]`` holds
    (drow_2, dcol_2, ..., drow_k, dcol_k).
    """

    M: int
    rows: np.ndarray
    cols: np.ndarray
    labels: np.ndarray
    binding: np.ndarray

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return self.binding.shape[1]

    def edge_list(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    def subgraph(self, idx: np.ndarray) -> "LabeledMultigraph":
        return LabeledMultigraph(self.M, self.rows[idx], self.cols[idx], self.labels[idx], self.binding[idx])

    def to_json(self) -> dict:
        return {
            "M": self.M,
            "edges": [
                {"row": int(r), "col": int(c), "label": lab, "binding": [b + 1 for b in bind]}
                for r, c, lab, bind in zip(self.rows.tolist(), self.cols.tolist(),
                                           self.labels.tolist(), self.binding.tolist())
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def build_multigraph(clouds: Sequence[PointCloud], matchings: Sequence[BottleneckMatching],
                     cfg: GridConfig) -> LabeledMultigraph:
    k = len(clouds)
    if k < 2 or len(matchings) != k - 1:
        raise ValueError(f"need k >= 2 clouds and k-1 matchings, got {k} and {len(matchings)}")
    n = len(clouds[0])
    if any(len(c) != n for c in clouds):
        raise ValueError("clouds differ in size")
    for m in matchings:
        if len(m) != n or not m.is_perfect():
            raise ValueError("matching is not perfect")
    M = cfg.M
    rows, cols = cells_of(clouds[0], M)
    binding = np.empty((n, k), dtype=np.int64)
    binding[:, 0] = np.arange(n)
    labels = np.empty((n, 2 * (k - 1)), dtype=np.int64)
    for j in range(1, k):
        partner = np.asarray(matchings[j - 1].blue_of_red, dtype=np.int64)
        binding[:, j] = partner
        prow, pcol = cells_of(clouds[j], M)
        labels[:, 2 * (j - 1)] = prow[partner] - rows
        labels[:, 2 * (j - 1) + 1] = pcol[partner] - cols
    return LabeledMultigraph(M, rows, cols, labels, binding)


def group_by_label(g: LabeledMultigraph) -> dict[tuple[int, ...], LabeledMultigraph]:
    """Split ``g`` by label; keys come out in sorted order."""
    if len(g) == 0:
        return {}
    uniq, inverse = np.unique(g.labels, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
    return {
        tuple(uniq[i].tolist()): g.subgraph(order[bounds[i]:bounds[i + 1]])
        for i in range(len(uniq))
    }
