"""Proper edge colouring of bipartite multigraphs with max-degree colours.

Edges are inserted one at a time. For edge (u, v) take the smallest colour
a free at u and b free at v; if a is also free at v use it, otherwise swap
a and b along the a/b alternating path that starts at v. In a bipartite
graph that path cannot end at u, so a becomes free at both ends.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from typing import Hashable, Sequence

Edge = tuple[Hashable, Hashable]


class NotBipartiteError(ValueError):
    pass


class ImproperColoringError(ValueError):
    pass


@dataclass(frozen=True)
class EdgeColoring:
    colors: tuple[int, ...]  # 1-based colour per edge, in input order
    num_colors: int


def max_degree(edges: Sequence[Edge]) -> int:
    """Largest vertex degree, parallel edges counted with multiplicity.

    Row and column vertices live in separate namespaces: edge (u, v) joins
    row u to column v.
    """
    deg: dict = defaultdict(int)
    for u, v in edges:
        deg[(0, u)] += 1
        deg[(1, v)] += 1
    return max(deg.values(), default=0)


def _two_sides(edges: Sequence[Edge]) -> list[Edge]:
    """Orient edges of a graph on one vertex set into (left, right) pairs."""
    adj: dict = defaultdict(list)
    for u, v in edges:
        if u == v:
            raise NotBipartiteError(f"self-loop at {u!r}")
        adj[u].append(v)
        adj[v].append(u)
    side: dict = {}
    for start in adj:
        if start in side:
            continue
        side[start] = 0
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in side:
                    side[y] = 1 - side[x]
                    queue.append(y)
                elif side[y] == side[x]:
                    raise NotBipartiteError(f"odd cycle through {x!r} and {y!r}")
    return [(u, v) if side[u] == 0 else (v, u) for u, v in edges]


def edge_color(edges: Sequence[Edge], *, single_vertex_set: bool = False) -> EdgeColoring:
    """Colour ``edges`` properly with exactly max_degree colours.

    By default edges are (row, column) pairs and the graph is bipartite by
    construction. With ``single_vertex_set=True`` both endpoints share one
    namespace and a bipartition is found first (NotBipartiteError if none).
    """
    if single_vertex_set:
        edges = _two_sides(edges)
    # at[side][vertex] maps colour -> edge index
    at: tuple[dict, dict] = (defaultdict(dict), defaultdict(dict))
    colors = [0] * len(edges)

    def smallest_free(used: dict) -> int:
        c = 1
        while c in used:
            c += 1
        return c

    for e, (u, v) in enumerate(edges):
        at_u = at[0][u]
        at_v = at[1][v]
        a = smallest_free(at_u)
        b = smallest_free(at_v)
        if a not in at_v:
            c = a
        else:
            # collect the a/b path from v: v -a- x -b- y -a- ...
            path = []
            side, x, want, other = 1, v, a, b
            while want in at[side][x]:
                f = at[side][x][want]
                path.append(f)
                fu, fv = edges[f]
                side, x = (0, fu) if side == 1 else (1, fv)
                want, other = other, want
            for f in path:
                fu, fv = edges[f]
                old = colors[f]
                del at[0][fu][old]
                del at[1][fv][old]
            for f in path:
                fu, fv = edges[f]
                new = b if colors[f] == a else a
                colors[f] = new
                at[0][fu][new] = f
                at[1][fv][new] = f
            c = a
        colors[e] = c
        at_u[c] = e
        at_v[c] = e
    return EdgeColoring(tuple(colors), max(colors, default=0))


def color_classes(c: EdgeColoring, edges: Sequence[Edge]) -> list[list[int]]:
    """Edge indices grouped by colour 1..num_colors; each group is a matching."""
    if len(c.colors) != len(edges):
        raise ImproperColoringError("colouring and edge list differ in length")
    classes: list[list[int]] = [[] for _ in range(c.num_colors)]
    seen_row: set = set()
    seen_col: set = set()
    for e, (col, (u, v)) in enumerate(zip(c.colors, edges)):
        if not 1 <= col <= c.num_colors:
            raise ImproperColoringError(f"edge {e}: colour {col} out of range")
        if (col, u) in seen_row or (col, v) in seen_col:
            raise ImproperColoringError(f"edge {e}: colour {col} repeated at an endpoint")
        seen_row.add((col, u))
        seen_col.add((col, v))
        classes[col - 1].append(e)
    return classes
