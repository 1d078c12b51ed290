"""Seeded graph families and random quasigeodesic samplers.

All randomness comes from :class:`SplitMix64` (Steele, Lea and Flood's
generator: state += 0x9E3779B97F4A7C15, then two xor-shift-multiply rounds with
0xBF58476D1CE4E5B9 and 0x94D049BB133111EB).  Bounded draws use the
multiply-shift reduction ``(x * m) >> 64``.  Both are fixed here so generated
corpora are identical on every platform and Python version.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .metric import FiniteMetricSpace, Graph, enumerate_geodesics

MASK64 = (1 << 64) - 1
KINDS = ("random_tree", "cycle", "grid", "noisy_tree", "binary_tree")


class InvalidSpec(ValueError):
    pass


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, m: int) -> int:
        if m <= 0:
            raise ValueError("bound must be positive")
        return (self.next() * m) >> 64

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def fork(self, salt: int) -> "SplitMix64":
        return SplitMix64(self.next() ^ (salt * 0x9E3779B97F4A7C15))


@dataclass(frozen=True)
class FamilySpec:
    kind: str
    n: int = 0
    k: int = 0
    depth: int = 0
    chords: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown family kind {self.kind!r}")
        if self.kind in ("random_tree", "noisy_tree") and self.n < 1:
            raise InvalidSpec(f"{self.kind} needs n >= 1")
        if self.kind == "cycle" and self.n < 3:
            raise InvalidSpec("cycle needs n >= 3")
        if self.kind == "grid" and self.k < 1:
            raise InvalidSpec("grid needs k >= 1")
        if self.kind == "binary_tree" and self.depth < 0:
            raise InvalidSpec("binary_tree needs depth >= 0")
        if self.chords < 0:
            raise InvalidSpec("chords must be nonnegative")
        if self.kind == "noisy_tree":
            room = self.n * (self.n - 1) // 2 - (self.n - 1)
            if self.chords > room:
                raise InvalidSpec(f"at most {room} chords fit on {self.n} vertices")
        if not 0 <= self.seed <= MASK64:
            raise InvalidSpec("seed must be an unsigned 64-bit integer")

    def label(self) -> str:
        size = {"grid": f"k={self.k}", "binary_tree": f"depth={self.depth}"}.get(self.kind, f"n={self.n}")
        if self.kind == "noisy_tree":
            size += f",chords={self.chords}"
        return f"{self.kind}({size})"


def _random_tree_edges(n: int, rng: SplitMix64) -> list[tuple[int, int]]:
    return [(rng.below(v), v) for v in range(1, n)]


def generate(spec: FamilySpec) -> Graph:
    spec.validate()
    rng = SplitMix64(spec.seed)
    if spec.kind == "random_tree":
        n, edges = spec.n, _random_tree_edges(spec.n, rng)
    elif spec.kind == "noisy_tree":
        n, edges = spec.n, _random_tree_edges(spec.n, rng)
        present = {(min(u, v), max(u, v)) for u, v in edges}
        added = 0
        while added < spec.chords:
            u, v = rng.below(n), rng.below(n)
            key = (min(u, v), max(u, v))
            if u == v or key in present:
                continue
            present.add(key)
            edges.append(key)
            added += 1
    elif spec.kind == "cycle":
        n = spec.n
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif spec.kind == "grid":
        k = spec.k
        n = k * k
        edges = []
        for r in range(k):
            for c in range(k):
                v = r * k + c
                if c + 1 < k:
                    edges.append((v, v + 1))
                if r + 1 < k:
                    edges.append((v, v + k))
    else:
        n = 2 ** (spec.depth + 1) - 1
        edges = [((v - 1) // 2, v) for v in range(1, n)]
    return Graph(n, tuple((u, v, Fraction(1)) for u, v in edges))


def expected_edge_count(spec: FamilySpec) -> int:
    return {
        "random_tree": spec.n - 1,
        "noisy_tree": spec.n - 1 + spec.chords,
        "cycle": spec.n,
        "grid": 2 * spec.k * (spec.k - 1),
        "binary_tree": 2 ** (spec.depth + 1) - 2,
    }[spec.kind]


def detour_walk(
    g: Graph,
    space: FiniteMetricSpace,
    rng: SplitMix64,
    a: int,
    b: int,
    detours: int = 2,
    depth: int = 2,
    geodesic_cap: int = 16,
) -> list[int]:
    """A geodesic from a to b with out-and-back random excursions spliced in.

    Excursions are random walks of up to ``depth`` edges that retrace
    themselves, so the walk returns to the geodesic where it left.
    """
    geos, _ = enumerate_geodesics(g, a, b, geodesic_cap, space)
    base = list(rng.choice(geos).vertices)
    for _ in range(detours):
        i = rng.below(len(base))
        out = [base[i]]
        for _ in range(rng.below(depth + 1)):
            nbrs = g.adjacency[out[-1]]
            if not nbrs:
                break
            out.append(rng.choice(nbrs)[0])
        if len(out) > 1:
            excursion = out[1:] + out[-2::-1]
            base[i + 1:i + 1] = excursion
    return base
