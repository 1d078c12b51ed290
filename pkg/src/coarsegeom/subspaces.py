"""Quasigeodesic subspaces and the constructive steps around them.

* :func:`certify_qg_subspace` looks for an in-subspace quasigeodesic between
  every pair of points.  It only ever answers CERTIFIED with paths that pass
  :func:`verify_qg`; otherwise it says UNKNOWN.
* :func:`splice_union` joins a quasigeodesic a->w in A and one w->b in B through
  a point c of an a-b geodesic.
* :func:`triangle_experiment` runs the four-segment argument on one geodesic
  triangle.
* :func:`union_geodesic_check_tree` is the tree statement that unions of
  intersecting geodesic subspaces stay geodesic.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .metric import (
    FiniteMetricSpace,
    Graph,
    GraphError,
    as_fraction,
    build_space,
    enumerate_geodesics,
    induced_shortest_path,
)
from .quasigeodesic import ParamPath, QGParams, QGVerdict, verify_qg

CERTIFIED = "CERTIFIED"
UNKNOWN = "UNKNOWN"


class EmptySubspace(ValueError):
    pass


class NoIntersection(ValueError):
    pass


class EmptyIntersection(ValueError):
    pass


class NotATree(GraphError):
    pass


class BoundMissed(AssertionError):
    def __init__(self, verdict: QGVerdict, bound: Fraction):
        super().__init__(
            f"spliced path is not a (1, {bound})-quasigeodesic: "
            f"pair {verdict.worst_pair} misses by {verdict.violation}"
        )
        self.verdict = verdict
        self.bound = bound


@dataclass(frozen=True)
class Subspace:
    points: frozenset[int]
    label: str = ""

    def __post_init__(self):
        pts = frozenset(int(p) for p in self.points)
        if not pts:
            raise EmptySubspace("subspace has no points")
        object.__setattr__(self, "points", pts)

    def check_in(self, space: FiniteMetricSpace) -> None:
        bad = [p for p in self.points if not 0 <= p < space.n]
        if bad:
            raise GraphError(f"subspace {self.label!r} has points outside the space: {sorted(bad)}")

    def to_json(self) -> dict:
        return {"label": self.label, "points": sorted(self.points)}

    @classmethod
    def from_json(cls, obj: dict) -> "Subspace":
        return cls(frozenset(obj["points"]), obj.get("label", ""))


@dataclass
class SubspaceCertificate:
    status: str
    witnesses: dict[tuple[int, int], ParamPath] = field(default_factory=dict)
    unknown_pair: tuple[int, int] | None = None

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "unknown_pair": list(self.unknown_pair) if self.unknown_pair else None,
            "witnesses": [
                {"pair": list(k), "path": v.to_json()} for k, v in sorted(self.witnesses.items())
            ],
        }


# -- bounded quasigeodesic search ---------------------------------------------

class _Search:
    """Depth-first search for a sampled (lam, c)-quasigeodesic inside ``allowed``.

    Samples sit on the grid 0, step, 2*step, ...; each extension is checked
    against the whole prefix, so every completed sequence is already a
    quasigeodesic (it is still re-verified before being returned).  States
    (point, index) that failed once are not expanded again, which keeps the
    search polynomial at the price of completeness.
    """

    def __init__(self, space: FiniteMetricSpace, allowed: Iterable[int], q: QGParams, step):
        self.space = space
        self.allowed = np.array(sorted(set(allowed)), dtype=np.int64)
        self.q = q
        self.step = as_fraction(step)

    def _bounds(self, m_max: int):
        S, lam, c, h = self.space.scale, self.q.lam, self.q.c, self.step
        lo = [math.ceil((k * h / lam - c) * S) for k in range(m_max + 1)]
        hi = [math.floor((lam * k * h + c) * S) for k in range(m_max + 1)]
        return np.array(lo, dtype=np.int64), np.array(hi, dtype=np.int64)

    def run(self, src: int, dst: int, budget: int) -> tuple[ParamPath | None, int]:
        """Returns (path or None, number of candidates examined)."""
        D = self.space.table
        if src == dst:
            return ParamPath((Fraction(0),), (src,)), 1
        lam, c, h = self.q.lam, self.q.c, self.step
        d_sd = Fraction(int(D[src, dst]), self.space.scale)
        m_max = math.floor(lam * (d_sd + c) / h)
        if m_max < 1:
            return None, 0
        lo, hi = self._bounds(m_max)
        allowed = self.allowed
        to_dst = D[dst, allowed]
        # explore along routes that stay inside the allowed set first
        inner = _inner_distances(self.space, allowed, dst)
        order = np.lexsort((allowed, to_dst, inner))
        allowed, to_dst = allowed[order], to_dst[order]
        # reach[k]: how far from dst a sample at index k may still be
        reach = hi[::-1]
        prefix = [src]
        failed: set[tuple[int, int]] = set()
        spent = 0

        def candidates(k: int) -> list[int]:
            idx = np.asarray(prefix)
            rows = D[np.ix_(allowed, idx)]  # (candidate, j)
            gaps = k - np.arange(k)
            ok = np.all((rows >= lo[gaps]) & (rows <= hi[gaps]), axis=1) & (to_dst <= reach[k])
            return [int(p) for p in allowed[ok] if (int(p), k) not in failed]

        stack = [iter(candidates(1))]
        while stack:
            k = len(prefix)
            for p in stack[-1]:
                spent += 1
                if spent > budget:
                    return None, spent
                if p == dst:
                    pts = prefix + [p]
                    path = ParamPath.unit_steps(pts, h)
                    if verify_qg(self.space, path, self.q).passed:
                        return path, spent
                    continue
                if k + 1 > m_max:
                    failed.add((p, k))
                    continue
                prefix.append(p)
                stack.append(iter(candidates(k + 1)))
                break
            else:
                stack.pop()
                last = prefix.pop()
                if stack:
                    failed.add((last, len(prefix)))
        return None, spent


def _inner_distances(space: FiniteMetricSpace, allowed: np.ndarray, dst: int) -> np.ndarray:
    """Shortest-path distance to ``dst`` through the subgraph induced on ``allowed``."""
    inside = set(allowed.tolist())
    unreachable = np.iinfo(np.int64).max
    best = {dst: 0}
    heap = [(0, dst)]
    while heap:
        du, u = heapq.heappop(heap)
        if du > best[u]:
            continue
        for v, w in space.adjacency[u]:
            if v in inside and du + w < best.get(v, unreachable):
                best[v] = du + w
                heapq.heappush(heap, (du + w, v))
    return np.array([best.get(int(v), unreachable) for v in allowed], dtype=np.int64)


def _certify_pair(space, allowed, a, b, q, budget, step=1) -> ParamPath | None:
    sp = induced_shortest_path(space, allowed, a, b)
    if sp is not None:
        cand = ParamPath.from_vertex_path(space, sp)
        if verify_qg(space, cand, q).passed:
            return cand
    path, _ = _Search(space, allowed, q, step).run(a, b, budget)
    return path


def certify_qg_subspace(
    g: Graph,
    A: Subspace,
    q: QGParams,
    budget: int = 2000,
    space: FiniteMetricSpace | None = None,
) -> SubspaceCertificate:
    """Find an in-A (lam, c)-quasigeodesic for every unordered pair of A.

    Each pair first tries the shortest path of the subgraph induced on A with
    arc-length parameters, then a bounded search over unit-step sample
    sequences.  ``budget`` caps the candidate extensions examined per pair.
    """
    if not A.points:
        raise EmptySubspace("subspace has no points")
    sp = space if space is not None else build_space(g)
    A.check_in(sp)
    pts = sorted(A.points)
    cert = SubspaceCertificate(CERTIFIED)
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            path = _certify_pair(sp, A.points, a, b, q, budget)
            if path is None:
                return SubspaceCertificate(UNKNOWN, cert.witnesses, (a, b))
            cert.witnesses[a, b] = path
    return cert


# -- splice ---------------------------------------------------------------------

@dataclass(frozen=True)
class SpliceWitness:
    w: int
    c: int
    a_prime: int
    b_prime: int
    s_a: Fraction
    s_b: Fraction
    t: Fraction
    join_radius: Fraction  # max(d(a', c), d(b', c))
    bound: Fraction

    def to_json(self) -> dict:
        return {
            "w": self.w,
            "c": self.c,
            "a_prime": self.a_prime,
            "b_prime": self.b_prime,
            "s_a": str(self.s_a),
            "s_b": str(self.s_b),
            "t": str(self.t),
            "join_radius": str(self.join_radius),
            "bound": str(self.bound),
        }


def splice_bound(space: FiniteMetricSpace, q: QGParams, delta, r) -> Fraction:
    mw = Fraction(max((w for row in space.adjacency or () for _, w in row), default=0), space.scale)
    return 4 * q.c + 2 * as_fraction(r) + 2 * as_fraction(delta) + 4 * mw


def splice_union(
    g: Graph,
    A: Subspace,
    B: Subspace,
    qgA: ParamPath,
    qgB: ParamPath,
    q: QGParams,
    delta,
    r,
    geodesic_cap: int = 64,
    space: FiniteMetricSpace | None = None,
) -> tuple[ParamPath, SpliceWitness]:
    """Concatenate qgA (a -> w) and qgB (w -> b) through a common geodesic point.

    The join point c runs over every vertex of the enumerated a-b geodesics
    and the cut samples a' = qgA(s_a), b' = qgB(s_b) minimise
    max(d(a', c), d(b', c)); ties go to the lowest (c, i, j).  The output is
    qgA on [0, s_a] followed by qgB shifted by s_a - s_b.  At the seam
    parameter s_a the A-side sample is kept, so b' itself is only sampled when
    it coincides with a'.
    """
    sp = space if space is not None else build_space(g)
    w = qgA.points[-1]
    if qgB.points[0] != w:
        raise NoIntersection(f"qgA ends at {w} but qgB starts at {qgB.points[0]}")
    if w not in A.points or w not in B.points:
        raise NoIntersection(f"junction {w} is not in both subspaces")
    if not qgA.image <= A.points or not qgB.image <= B.points:
        raise ValueError("input quasigeodesics leave their subspaces")
    a, b = qgA.points[0], qgB.points[-1]
    D = sp.table
    geos, _ = enumerate_geodesics(g, a, b, geodesic_cap, sp)
    cs = sorted({v for geo in geos for v in geo.vertices})
    pa, pb = list(qgA.points), list(qgB.points)
    mb = len(pb) - 1
    da = D[np.ix_(cs, pa)]  # (c, i)
    db = D[np.ix_(cs, pb)]  # (c, j)
    cost = np.maximum(da[:, :, None], db[:, None, :])  # (c, i, j)
    # b' may be the last sample of qgB only when it equals a'
    allowed_j = np.ones((len(pa), len(pb)), dtype=bool)
    allowed_j[:, mb] = np.array(pa) == pb[mb]
    big = np.iinfo(np.int64).max
    cost = np.where(allowed_j[None, :, :], cost, big)
    flat = int(np.argmin(cost))
    ci, i, j = (int(x) for x in np.unravel_index(flat, cost.shape))
    s_a, s_b = qgA.params[i], qgB.params[j]
    shift = s_a - s_b
    params = list(qgA.params[: i + 1]) + [t + shift for t in qgB.params[j + 1:]]
    points = pa[: i + 1] + pb[j + 1:]
    t = s_a + qgB.domain_length - s_b
    out = ParamPath(tuple(params), tuple(points))
    bound = splice_bound(sp, q, delta, r)
    witness = SpliceWitness(
        w=w, c=cs[ci], a_prime=pa[i], b_prime=pb[j], s_a=s_a, s_b=s_b, t=t,
        join_radius=Fraction(int(cost[ci, i, j]), sp.scale), bound=bound,
    )
    verdict = verify_qg(sp, out, QGParams(1, bound))
    if not verdict.passed:
        raise BoundMissed(verdict, bound)
    return out, witness


# -- triangle experiment --------------------------------------------------------

@dataclass
class TriangleExperimentRecord:
    a: int
    b: int
    c: int
    lam: Fraction
    qc: Fraction
    case: str  # "short_side", "found" or "inconclusive"
    x: int
    x_dist: Fraction  # distance from x to [b,c] u [a,c]
    side_ab: tuple[int, ...]
    side_bc: tuple[int, ...]
    side_ac: tuple[int, ...]
    x_a: int | None = None
    x_b: int | None = None
    Y: frozenset[int] = frozenset()
    path: ParamPath | None = None
    z: int | None = None
    escaped: bool | None = None  # path has a sample outside [a,x_a] u [x_b,b]
    d_xa_z: Fraction | None = None
    bound: Fraction = Fraction(0)
    bound_holds: bool | None = None
    candidates: int = 0

    @property
    def long_sides(self) -> bool:
        return self.case != "short_side"

    def to_json(self) -> dict:
        s = lambda v: None if v is None else str(v)  # noqa: E731
        return {
            "a": self.a, "b": self.b, "c": self.c,
            "lambda": str(self.lam), "C": str(self.qc),
            "case": self.case,
            "x": self.x, "x_dist": str(self.x_dist),
            "sides": {"ab": list(self.side_ab), "bc": list(self.side_bc), "ac": list(self.side_ac)},
            "x_a": self.x_a, "x_b": self.x_b,
            "Y": sorted(self.Y),
            "path": self.path.to_json() if self.path else None,
            "z": self.z, "escaped": self.escaped,
            "d_xa_z": s(self.d_xa_z),
            "bound": str(self.bound), "bound_holds": self.bound_holds,
            "candidates": self.candidates,
        }


def _truncation_point(space: FiniteMetricSpace, seg: list[int], x: int, target: Fraction) -> int:
    """Vertex of ``seg`` (ending at x) closest to x among those at least ``target`` away."""
    goal = target * space.scale
    for v in reversed(seg):
        if space.rows[v][x] >= goal:
            return v
    return seg[0]


def triangle_step(lam: Fraction) -> Fraction:
    """Sample spacing for the triangle search, strictly finer than 1/lam."""
    return Fraction(1, math.floor(lam) + 1)


def triangle_experiment(
    g: Graph,
    a: int,
    b: int,
    c: int,
    q: QGParams,
    budget: int = 20000,
    geodesic_cap: int = 64,
    sides: tuple[int, int, int] = (0, 0, 0),
    space: FiniteMetricSpace | None = None,
) -> TriangleExperimentRecord:
    """Build x, x_a, x_b and Y for triangle abc and search Y for x_a -> x_b.

    ``sides`` picks the geodesics for [a,b], [b,c], [a,c] by enumeration index.
    x_a and x_b sit at the first grid vertex at least (C+1)/2 from x, which
    keeps the two truncated pieces at least C+1 apart.  The search samples at
    spacing below 1/lam, so a single step cannot cover that gap.
    """
    if len({a, b, c}) != 3:
        raise ValueError("triangle vertices must be distinct")
    sp = space if space is not None else build_space(g)
    lam, C = q.lam, q.c
    ab = enumerate_geodesics(g, a, b, geodesic_cap, sp)[0][sides[0]].vertices
    bc = enumerate_geodesics(g, b, c, geodesic_cap, sp)[0][sides[1]].vertices
    ac = enumerate_geodesics(g, a, c, geodesic_cap, sp)[0][sides[2]].vertices
    others = sorted(set(bc) | set(ac))
    to_others = sp.table[np.ix_(list(ab), others)].min(axis=1)
    far = int(to_others.max())
    x = min(v for v, dv in zip(ab, to_others) if dv == far)
    rec = TriangleExperimentRecord(
        a=a, b=b, c=c, lam=lam, qc=C, case="short_side", x=x,
        x_dist=Fraction(far, sp.scale), side_ab=ab, side_bc=bc, side_ac=ac,
        bound=lam * lam * (2 * C + 1) + C,
    )
    if sp.d(a, x) <= C + 1 or sp.d(x, b) <= C + 1:
        # x is within C + 1 of a or b, hence of [a,c] or [b,c]
        rec.bound = C + 1
        rec.bound_holds = rec.x_dist <= C + 1
        return rec
    ix = ab.index(x)
    half = (C + 1) / 2
    x_a = _truncation_point(sp, list(ab[: ix + 1]), x, half)
    x_b = _truncation_point(sp, list(reversed(ab[ix:])), x, half)
    piece_a = ab[: ab.index(x_a) + 1]
    piece_b = ab[ab.index(x_b):]
    Y = frozenset(piece_a) | frozenset(piece_b) | frozenset(bc) | frozenset(ac)
    rec.x_a, rec.x_b, rec.Y = x_a, x_b, Y
    path, spent = _Search(sp, Y, q, triangle_step(lam)).run(x_a, x_b, budget)
    rec.candidates = spent
    if path is None:
        rec.case = "inconclusive"
        return rec
    rec.case = "found"
    rec.path = path
    sides_img = set(bc) | set(ac)
    pieces = set(piece_a) | set(piece_b)
    rec.escaped = any(p not in pieces for p in path.points)
    rec.z = next((p for p in path.points if p in sides_img), None)
    if rec.z is not None:
        rec.d_xa_z = sp.d(x_a, rec.z)
        rec.bound_holds = rec.d_xa_z <= rec.bound
    else:
        rec.bound_holds = False
    return rec


def four_segment_union(rec: TriangleExperimentRecord) -> Subspace | None:
    if not rec.Y:
        return None
    return Subspace(rec.Y, f"Y({rec.a},{rec.b},{rec.c})")


# -- trees ----------------------------------------------------------------------

def union_geodesic_check_tree(
    g: Graph, A: Subspace, B: Subspace, space: FiniteMetricSpace | None = None
) -> bool:
    """True iff A u B is a geodesic, i.e. (1, 0)-quasigeodesic, subspace."""
    if not g.is_tree():
        raise NotATree("graph is not a tree")
    if not A.points & B.points:
        raise EmptyIntersection("subspaces do not meet")
    sp = space if space is not None else build_space(g)
    U = Subspace(A.points | B.points, f"{A.label}|{B.label}")
    return certify_qg_subspace(g, U, QGParams(1, 0), budget=1, space=sp).certified
