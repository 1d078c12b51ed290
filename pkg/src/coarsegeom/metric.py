"""Finite metric spaces induced by weighted graphs.

Distances are stored as integers over a common denominator (``scale``), so
every comparison in the library is exact.  ``FiniteMetricSpace.d`` hands back
``Fraction`` values for callers that want rationals.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    pass


class DisconnectedGraph(GraphError):
    pass


class InvalidWeight(GraphError):
    pass


class EmptySet(ValueError):
    pass


class GraphParseError(GraphError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        # floats only ever arrive from user code; keep their exact decimal spelling
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class Graph:
    """Undirected graph on vertices ``0..n-1`` with positive rational weights."""

    n: int
    edges: tuple[tuple[int, int, Fraction], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be nonnegative")
        norm = []
        seen = set()
        for e in self.edges:
            if len(e) == 2:
                u, v, w = e[0], e[1], Fraction(1)
            else:
                u, v, w = e
            u, v, w = int(u), int(v), as_fraction(w)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if w <= 0:
                raise InvalidWeight(f"edge ({u}, {v}) has weight {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            norm.append((u, v, w))
        object.__setattr__(self, "edges", tuple(norm))

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, Fraction], ...], ...]:
        adj: list[list[tuple[int, Fraction]]] = [[] for _ in range(self.n)]
        for u, v, w in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return tuple(tuple(sorted(a)) for a in adj)

    @property
    def max_weight(self) -> Fraction:
        return max((w for _, _, w in self.edges), default=Fraction(0))

    def is_tree(self) -> bool:
        return self.n >= 1 and len(self.edges) == self.n - 1 and _connected(self)

    def scaled(self, s) -> "Graph":
        s = as_fraction(s)
        return Graph(self.n, tuple((u, v, w * s) for u, v, w in self.edges))


def _connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v, _ in g.adjacency[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == g.n


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Point set ``0..n-1`` with distance ``table[i, j] / scale``.

    ``adjacency`` carries the generating graph's integer edge weights (at the
    same scale) when the space was built from a graph; geodesic enumeration
    needs it.
    """

    table: np.ndarray
    scale: int = 1
    adjacency: tuple | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.table.shape[0])

    @cached_property
    def rows(self) -> list[list[int]]:
        return self.table.tolist()

    def d(self, i: int, j: int) -> Fraction:
        return Fraction(self.rows[i][j], self.scale)

    def dist(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.scale) for x in row] for row in self.rows]

    def to_int(self, value) -> int:
        """Exact integer form of a rational at this space's scale."""
        v = as_fraction(value) * self.scale
        if v.denominator != 1:
            raise ValueError(f"{value} is not representable at scale {self.scale}")
        return v.numerator

    @classmethod
    def from_table(cls, dist: Sequence[Sequence]) -> "FiniteMetricSpace":
        fr = [[as_fraction(x) for x in row] for row in dist]
        scale = math.lcm(1, *(x.denominator for row in fr for x in row))
        table = np.array([[int(x * scale) for x in row] for row in fr], dtype=np.int64)
        table = table.reshape(len(fr), len(fr))
        check_metric(table)
        return cls(table, scale)


def check_metric(table: np.ndarray) -> None:
    n = table.shape[0]
    if table.shape != (n, n):
        raise GraphError("distance table must be square")
    if n == 0:
        return
    if np.any(np.diag(table) != 0):
        raise GraphError("nonzero diagonal")
    if np.any(table != table.T):
        raise GraphError("asymmetric table")
    off = ~np.eye(n, dtype=bool)
    if np.any(table[off] <= 0):
        raise GraphError("distinct points at distance 0")
    for j in range(n):
        if np.any(table > table[:, j, None] + table[None, j, :]):
            raise GraphError("triangle inequality violated")


def build_space(g: Graph) -> FiniteMetricSpace:
    """All-pairs shortest paths by Floyd-Warshall over scaled integers."""
    scale = math.lcm(1, *(w.denominator for _, _, w in g.edges))
    n = g.n
    inf = np.iinfo(np.int64).max // 4
    table = np.full((n, n), inf, dtype=np.int64)
    np.fill_diagonal(table, 0)
    int_adj = []
    for u in range(n):
        row = []
        for v, w in g.adjacency[u]:
            iw = int(w * scale)
            row.append((v, iw))
            table[u, v] = min(table[u, v], iw)
        int_adj.append(tuple(row))
    for k in range(n):
        np.minimum(table, table[:, k, None] + table[None, k, :], out=table)
    if n and table.max() >= inf:
        i, j = map(int, np.argwhere(table >= inf)[0])
        raise DisconnectedGraph(f"vertices {i} and {j} are not connected")
    table.setflags(write=False)
    return FiniteMetricSpace(table, scale, tuple(int_adj))


@dataclass(frozen=True)
class VertexPath:
    vertices: tuple[int, ...]
    length: Fraction

    @classmethod
    def from_vertices(cls, g: Graph, vertices: Iterable[int]) -> "VertexPath":
        vs = tuple(int(v) for v in vertices)
        if not vs:
            raise ValueError("a path needs at least one vertex")
        wmap = {(u, v): w for u, v, w in g.edges}
        total = Fraction(0)
        for u, v in zip(vs, vs[1:]):
            w = wmap.get((u, v), wmap.get((v, u)))
            if w is None:
                raise GraphError(f"no edge between {u} and {v}")
            total += w
        return cls(vs, total)

    def is_geodesic(self, space: FiniteMetricSpace) -> bool:
        return self.length == space.d(self.vertices[0], self.vertices[-1])

    def cumulative(self, space: FiniteMetricSpace) -> list[Fraction]:
        """Arc-length parameters along the path (consecutive steps are edges)."""
        out = [Fraction(0)]
        for u, v in zip(self.vertices, self.vertices[1:]):
            out.append(out[-1] + _edge_weight(space, u, v))
        return out


def _edge_weight(space: FiniteMetricSpace, u: int, v: int) -> Fraction:
    for x, w in space.adjacency[u]:
        if x == v:
            return Fraction(w, space.scale)
    raise GraphError(f"no edge between {u} and {v}")


def _space(g: Graph, space: FiniteMetricSpace | None) -> FiniteMetricSpace:
    return space if space is not None else build_space(g)


def enumerate_geodesics(
    g: Graph, a: int, b: int, cap: int, space: FiniteMetricSpace | None = None
) -> tuple[list[VertexPath], bool]:
    """All shortest a-b paths, or the first ``cap`` of them plus ``True``.

    DFS over the shortest-path DAG; children visited in increasing vertex order.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    sp = _space(g, space)
    if not (0 <= a < sp.n and 0 <= b < sp.n):
        raise GraphError("vertex out of range")
    rows = sp.rows
    da, db = rows[a], rows[b]
    total = da[b]
    length = Fraction(total, sp.scale)
    adj = sp.adjacency
    found: list[VertexPath] = []
    path = [a]
    # stack of child iterators
    stack = [iter(adj[a])]
    if a == b:
        return [VertexPath((a,), Fraction(0))], False
    while stack:
        u = path[-1]
        for v, w in stack[-1]:
            if da[u] + w == da[v] and da[v] + db[v] == total:
                if v == b:
                    found.append(VertexPath(tuple(path) + (b,), length))
                    if len(found) >= cap:
                        return found, _has_more(stack, path, da, db, total, b, adj)
                    continue
                path.append(v)
                stack.append(iter(adj[v]))
                break
        else:
            stack.pop()
            path.pop()
    return found, False


def _has_more(stack, path, da, db, total, b, adj) -> bool:
    """Whether the suspended DFS would still produce another geodesic."""
    # any remaining DAG child on the stack leads to b (every DAG vertex does)
    for it, u in zip(stack, path):
        for v, w in it:
            if da[u] + w == da[v] and da[v] + db[v] == total:
                return True
    return False


def path_image(points: Iterable[int]) -> frozenset[int]:
    return frozenset(int(p) for p in points)


def dist_point_to_set(space: FiniteMetricSpace, x: int, S: Iterable[int]) -> Fraction:
    idx = sorted(path_image(S))
    if not idx:
        raise EmptySet("point set is empty")
    return Fraction(int(space.table[x, idx].min()), space.scale)


def hausdorff_distance(space: FiniteMetricSpace, A: Iterable[int], B: Iterable[int]) -> Fraction:
    ia, ib = sorted(path_image(A)), sorted(path_image(B))
    if not ia or not ib:
        raise EmptySet("point set is empty")
    sub = space.table[np.ix_(ia, ib)]
    return Fraction(int(max(sub.min(axis=1).max(), sub.min(axis=0).max())), space.scale)


def induced_shortest_path(
    space: FiniteMetricSpace, allowed: Iterable[int], a: int, b: int
) -> tuple[int, ...] | None:
    """Dijkstra restricted to ``allowed``; ties resolved toward lower indices."""
    allowed = path_image(allowed)
    if a not in allowed or b not in allowed:
        return None
    best = {a: 0}
    prev: dict[int, int] = {}
    heap = [(0, a)]
    done = set()
    while heap:
        du, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == b:
            break
        for v, w in space.adjacency[u]:
            if v not in allowed or v in done:
                continue
            nd = du + w
            if nd < best.get(v, nd + 1) or (nd == best[v] and u < prev.get(v, u + 1)):
                best[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if b not in done:
        return None
    out = [b]
    while out[-1] != a:
        out.append(prev[out[-1]])
    return tuple(reversed(out))


# -- graph file format --------------------------------------------------------

def parse_graph(text: str) -> Graph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphParseError(lineno, "expected header 'n <count>'")
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphParseError(lineno, f"bad vertex count {parts[1]!r}") from None
            if n < 0:
                raise GraphParseError(lineno, "negative vertex count")
            continue
        if len(parts) != 3:
            raise GraphParseError(lineno, "expected 'u v w'")
        try:
            u, v = int(parts[0]), int(parts[1])
            w = Fraction(parts[2])
        except (ValueError, ZeroDivisionError):
            raise GraphParseError(lineno, f"cannot parse edge {line!r}") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(lineno, f"vertex out of range in {line!r}")
        if u == v:
            raise GraphParseError(lineno, "self-loop")
        if w <= 0:
            raise GraphParseError(lineno, f"nonpositive weight {parts[2]}")
        edges.append((u, v, w, lineno))
    if n is None:
        raise GraphParseError(1, "missing header 'n <count>'")
    seen = {}
    for u, v, _, lineno in edges:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GraphParseError(lineno, f"duplicate edge {key} (first on line {seen[key]})")
        seen[key] = lineno
    return Graph(n, tuple((u, v, w) for u, v, w, _ in edges))


def format_graph(g: Graph) -> str:
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v} {w}" for u, v, w in g.edges)
    return "\n".join(lines) + "\n"


def read_graph(path: str | Path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def write_graph(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8")
