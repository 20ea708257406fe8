"""Permutations, patterns and decompositions into order-isomorphic parts.

Positions are 1-indexed everywhere in this module and in every serialized
form: a permutation of length n is the value sequence p(1), ..., p(n).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class NotDistinctError(ValueError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        n = len(values)
        if n < 1:
            raise ValueError("permutation must have length >= 1")
        if sorted(values) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {values}")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, pos: int) -> int:
        """Value at 1-indexed position ``pos``."""
        if not 1 <= pos <= len(self.values):
            raise IndexError(pos)
        return self.values[pos - 1]

    def __iter__(self):
        return iter(self.values)

    def at(self, positions: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.values[p - 1] for p in positions)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def reverse(cls, n: int) -> "Permutation":
        return cls(tuple(range(n, 0, -1)))

    @classmethod
    def parse(cls, line: str) -> "Permutation":
        return cls(tuple(int(tok) for tok in line.split()))

    def __str__(self) -> str:
        return " ".join(map(str, self.values))


# A pattern is just a permutation of its own length.
Pattern = Permutation


def pattern_of(seq: Sequence[float]) -> Pattern:
    """Rank sequence of ``seq``: the i-th smallest element becomes i."""
    n = len(seq)
    if n < 1:
        raise ValueError("empty sequence has no pattern")
    order = sorted(range(n), key=seq.__getitem__)
    ranks = [0] * n
    for r, i in enumerate(order, start=1):
        ranks[i] = r
    for a, b in zip(order, order[1:]):
        if seq[a] == seq[b]:
            raise NotDistinctError(f"not distinct: {seq[a]!r} repeated")
    return Permutation(tuple(ranks))


def is_order_isomorphic(a: Sequence[float], b: Sequence[float]) -> bool:
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    return pattern_of(a) == pattern_of(b)


@dataclass(frozen=True)
class Part:
    """One index list per permutation; lists are strictly increasing, same length."""

    index_lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        lists = tuple(tuple(int(i) for i in lst) for lst in self.index_lists)
        object.__setattr__(self, "index_lists", lists)

    def __len__(self) -> int:
        return len(self.index_lists[0]) if self.index_lists else 0

    @property
    def k(self) -> int:
        return len(self.index_lists)


@dataclass(frozen=True)
class Decomposition:
    n: int
    k: int
    parts: tuple[Part, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(
            p if isinstance(p, Part) else Part(p) for p in self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "parts": [[list(lst) for lst in part.index_lists] for part in self.parts],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Decomposition":
        return cls(int(obj["n"]), int(obj["k"]),
                   tuple(Part(tuple(tuple(lst) for lst in part)) for part in obj["parts"]))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def loads(cls, text: str) -> "Decomposition":
        return cls.from_json(json.loads(text))


@dataclass(frozen=True)
class Verdict:
    valid: bool
    message: str = "valid"

    def __bool__(self) -> bool:
        return self.valid


def verify_decomposition(perms: Sequence[Permutation], d: Decomposition) -> Verdict:
    """Check that ``d`` partitions every permutation into aligned,
    pairwise order-isomorphic parts.

    Raises DimensionError when ``perms`` do not fit ``d`` at all; any other
    defect is reported as an invalid Verdict naming the first problem found.
    """
    k = len(perms)
    if k != d.k:
        raise DimensionError(f"decomposition has k={d.k}, got {k} permutations")
    for j, p in enumerate(perms):
        if len(p) != d.n:
            raise DimensionError(f"permutation {j + 1} has length {len(p)}, expected {d.n}")
    n = d.n

    seen = [bytearray(n + 1) for _ in range(k)]
    for pi, part in enumerate(d.parts, start=1):
        if part.k != k:
            return Verdict(False, f"part {pi}: has {part.k} index lists, expected {k}")
        lengths = {len(lst) for lst in part.index_lists}
        if len(lengths) != 1:
            return Verdict(False, f"part {pi}: index lists have unequal lengths {sorted(lengths)}")
        if 0 in lengths:
            return Verdict(False, f"part {pi}: empty")
        for j, lst in enumerate(part.index_lists):
            prev = 0
            for idx in lst:
                if not 1 <= idx <= n:
                    return Verdict(False, f"part {pi}: index {idx} out of range for permutation {j + 1}")
                if idx <= prev:
                    return Verdict(False, f"part {pi}: index list for permutation {j + 1} not strictly increasing")
                prev = idx
                if seen[j][idx]:
                    return Verdict(False, f"permutation {j + 1}: index {idx} duplicated (part {pi})")
                seen[j][idx] = 1
        first = pattern_of(perms[0].at(part.index_lists[0]))
        for j in range(1, k):
            if pattern_of(perms[j].at(part.index_lists[j])) != first:
                return Verdict(False, f"part {pi}: permutation {j + 1} not order-isomorphic to permutation 1")
    for j in range(k):
        for idx in range(1, n + 1):
            if not seen[j][idx]:
                return Verdict(False, f"permutation {j + 1}: index {idx} missing (not a partition)")
    return Verdict(True)


def singleton_decomposition(n: int, k: int) -> Decomposition:
    return Decomposition(n, k, tuple(Part(tuple((i,) for _ in range(k))) for i in range(1, n + 1)))
