"""Shared fixtures and independent oracles.

The oracles deliberately avoid the package: distances and geodesics come from
networkx, hyperbolicity from plain loops over Fractions.
"""
import itertools
from fractions import Fraction

import networkx as nx
import pytest

from coarsegeom.families import FamilySpec, generate
from coarsegeom.metric import Graph

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, name: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {name}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def path_graph(n: int) -> Graph:
    return Graph(n, tuple((i, i + 1, 1) for i in range(n - 1)))


def cycle(n: int) -> Graph:
    return generate(FamilySpec("cycle", n=n))


def grid(k: int) -> Graph:
    return generate(FamilySpec("grid", k=k))


def to_nx(g: Graph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    for u, v, w in g.edges:
        G.add_edge(u, v, weight=w)
    return G


def oracle_distances(g: Graph) -> list[list[Fraction]]:
    G = to_nx(g)
    lengths = dict(nx.all_pairs_dijkstra_path_length(G, weight="weight"))
    return [[Fraction(lengths[i][j]) for j in range(g.n)] for i in range(g.n)]


def oracle_geodesics(g: Graph, a: int, b: int) -> set[tuple[int, ...]]:
    return {tuple(p) for p in nx.all_shortest_paths(to_nx(g), a, b, weight="weight")}


def oracle_four_point(g: Graph) -> Fraction:
    """Brute force over every ordered quadruple with Gromov products."""
    d = oracle_distances(g)

    def gp(x, y, w):
        return (d[x][w] + d[y][w] - d[x][y]) / 2

    best = Fraction(0)
    for x, y, z, w in itertools.product(range(g.n), repeat=4):
        best = max(best, min(gp(x, y, w), gp(y, z, w)) - gp(x, z, w))
    return best


def oracle_slim(g: Graph) -> Fraction:
    """Every triple, every choice of the three geodesics, every point of [b,c]."""
    d = oracle_distances(g)
    G = to_nx(g)
    geos = {
        (a, b): [tuple(p) for p in nx.all_shortest_paths(G, a, b, weight="weight")]
        for a in range(g.n) for b in range(g.n)
    }
    best = Fraction(0)
    for a, b, c in itertools.product(range(g.n), repeat=3):
        for bc in geos[b, c]:
            for ab in geos[a, b]:
                for ac in geos[a, c]:
                    others = set(ab) | set(ac)
                    best = max(best, max(min(d[p][o] for o in others) for p in bc))
    return best


def oracle_hausdorff(d, A, B) -> Fraction:
    return max(max(min(d[a][b] for b in B) for a in A), max(min(d[a][b] for a in A) for b in B))


def small_corpus() -> list[tuple[str, Graph]]:
    """Family graphs with at most 12 vertices."""
    out = [(f"C{n}", cycle(n)) for n in range(4, 13)]
    out += [(f"grid{k}", grid(k)) for k in (2, 3)]
    out += [(f"tree{n}s{s}", generate(FamilySpec("random_tree", n=n, seed=s))) for n in (1, 2, 5, 8, 12) for s in (0, 1)]
    out += [("bin2", generate(FamilySpec("binary_tree", depth=2)))]
    out += [("noisy10", generate(FamilySpec("noisy_tree", n=10, chords=2, seed=4)))]
    return out


@pytest.fixture
def c6():
    return cycle(6)
