"""Point-cloud carriers of permutations in the unit square.

A cloud of n points with distinct coordinates, sorted by x, encodes the
permutation that reads the y-ranks left to right.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import Permutation

SEED_MASK = (1 << 64) - 1


class DegenerateCloudError(ValueError):
    pass


def rng_for(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent generator for the sub-stream ``(seed, stream_id)``."""
    ss = np.random.SeedSequence(entropy=int(seed) & SEED_MASK, spawn_key=(int(stream_id) & SEED_MASK,))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class PointCloud:
    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.ascontiguousarray(self.xs, dtype=np.float64)
        ys = np.ascontiguousarray(self.ys, dtype=np.float64)
        if xs.shape != ys.shape or xs.ndim != 1:
            raise ValueError("xs and ys must be 1-d arrays of equal length")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    def __len__(self) -> int:
        return len(self.xs)

    @classmethod
    def from_points(cls, points) -> "PointCloud":
        """Build from (x, y) pairs, sorting by x."""
        pts = sorted((float(x), float(y)) for x, y in points)
        return cls(np.array([p[0] for p in pts]), np.array([p[1] for p in pts]))

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def check(self) -> None:
        if len(self) == 0:
            raise DegenerateCloudError("empty cloud")
        if not (np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.ys))):
            raise DegenerateCloudError("non-finite coordinate")
        if np.any(np.diff(self.xs) <= 0):
            raise DegenerateCloudError("degenerate cloud: x not strictly increasing")
        if len(np.unique(self.ys)) != len(self.ys):
            raise DegenerateCloudError("degenerate cloud: repeated y")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "y"])
        for i, (x, y) in enumerate(zip(self.xs.tolist(), self.ys.tolist()), start=1):
            w.writerow([i, repr(x), repr(y)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointCloud":
        rows = list(csv.DictReader(io.StringIO(text)))
        rows.sort(key=lambda r: int(r["index"]))
        return cls(np.array([float(r["x"]) for r in rows]), np.array([float(r["y"]) for r in rows]))


@dataclass(frozen=True)
class SamplerConfig:
    mode: Literal["uniform", "poisson"] = "uniform"
    rate_multiplier: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("uniform", "poisson"):
            raise ValueError(f"unknown sampler mode {self.mode!r}")
        if self.mode == "poisson" and not self.rate_multiplier > 1:
            raise ValueError("rate_multiplier must exceed 1 in poisson mode")


def _untie(rng: np.random.Generator, vals: np.ndarray) -> np.ndarray:
    vals = vals.copy()
    while True:
        order = np.argsort(vals, kind="stable")
        dup = np.flatnonzero(vals[order][1:] == vals[order][:-1])
        if len(dup) == 0:
            return vals
        idx = order[dup + 1]
        vals[idx] = rng.random(len(idx))


def _distinct_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    return _untie(rng, rng.random(n))


def sample_cloud(n: int, cfg: SamplerConfig | None = None, stream_id: int = 0) -> PointCloud:
    """n i.i.d. uniform points in the unit square, sorted by x.

    In poisson mode the points are the survivors of a Poisson process of
    rate ``rate_multiplier * n`` thinned uniformly to exactly n points; the
    process is redrawn whenever it produced fewer than n points.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    cfg = cfg or SamplerConfig()
    rng = rng_for(cfg.seed, stream_id)
    if cfg.mode == "uniform":
        xs = _distinct_uniform(rng, n)
        ys = _distinct_uniform(rng, n)
    else:
        lam = cfg.rate_multiplier * n
        m = int(rng.poisson(lam))
        while m < n:
            m = int(rng.poisson(lam))
        xs = rng.random(m)
        ys = rng.random(m)
        keep = np.sort(rng.choice(m, size=n, replace=False))
        xs = _untie(rng, xs[keep])
        ys = _untie(rng, ys[keep])
    order = np.argsort(xs, kind="stable")
    return PointCloud(xs[order], ys[order])


def permutation_of_cloud(c: PointCloud) -> Permutation:
    """p(i) = rank of the i-th point's y among all y's."""
    c.check()
    ranks = np.empty(len(c), dtype=np.int64)
    ranks[np.argsort(c.ys, kind="stable")] = np.arange(1, len(c) + 1)
    return Permutation(tuple(ranks.tolist()))


def embed_permutation(p: Permutation, seed: int, stream_id: int = 0) -> PointCloud:
    """Random cloud whose permutation is ``p``.

    Sorted uniform x's and y's are paired as (x_(i), y_(p(i))), which gives a
    uniform cloud conditioned on having pattern ``p``.
    """
    n = len(p)
    rng = rng_for(seed, stream_id)
    xs = np.sort(_distinct_uniform(rng, n))
    ys = np.sort(_distinct_uniform(rng, n))
    vals = np.asarray(p.values, dtype=np.int64)
    return PointCloud(xs, ys[vals - 1])
