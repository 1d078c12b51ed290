"""Gromov hyperbolicity constants with witnesses.

Two definitions are offered: the four-point condition, which only needs the
distance table, and slim geodesic triangles, which quantifies over every
geodesic choice and is the reference definition for small inputs.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .metric import FiniteMetricSpace, Graph, build_space, enumerate_geodesics

FOUR_POINT = "four_point"
SLIM = "slim"


@dataclass(frozen=True)
class HyperbolicityReport:
    delta: Fraction
    method: str
    witness: tuple[int, ...]
    truncated: bool = False

    def to_json(self) -> dict:
        return {
            "delta": str(self.delta),
            "method": self.method,
            "witness": list(self.witness),
            "truncated": self.truncated,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "HyperbolicityReport":
        if obj["method"] not in (FOUR_POINT, SLIM):
            raise ValueError(f"unknown method {obj['method']!r}")
        return cls(Fraction(obj["delta"]), obj["method"], tuple(obj["witness"]), bool(obj["truncated"]))


def gromov_product(space: FiniteMetricSpace, x: int, y: int, w: int) -> Fraction:
    r = space.rows
    return Fraction(r[x][w] + r[y][w] - r[x][y], 2 * space.scale)


def four_point_value(space: FiniteMetricSpace, x: int, y: int, z: int, w: int) -> Fraction:
    """min((x.y)_w, (y.z)_w) - (x.z)_w for one ordered quadruple."""
    return min(gromov_product(space, x, y, w), gromov_product(space, y, z, w)) - gromov_product(space, x, z, w)


def _scan_first_index(D: np.ndarray, T: np.ndarray, x: int) -> tuple[int, tuple[int, int, int]]:
    # doubled Gromov products based at every w: Gx[y, w] = 2(x.y)_w
    Gx = D[x, None, :] + D - D[x, :, None]
    vals = np.minimum(Gx[:, None, :], T) - Gx[None, :, :]
    flat = int(np.argmax(vals))
    y, z, w = np.unravel_index(flat, vals.shape)
    return int(vals.flat[flat]), (int(y), int(z), int(w))


def delta_four_point(space: FiniteMetricSpace, threads: int = 1) -> HyperbolicityReport:
    """Exhaustive O(n^4) scan over ordered quadruples (x, y, z, w).

    Work is split by ``x``; each unit reports its lexicographically first
    maximiser and units are reduced in ``x`` order, so the witness does not
    depend on ``threads``.
    """
    n = space.n
    if n == 0:
        return HyperbolicityReport(Fraction(0), FOUR_POINT, ())
    D = np.asarray(space.table)
    dtype = np.int32 if D.max() < 2**29 else np.int64
    D = D.astype(dtype)
    # T[y, z, w] = 2(y.z)_w
    T = D[:, None, :] + D[None, :, :] - D[:, :, None]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda x: _scan_first_index(D, T, x), range(n)))
    else:
        parts = [_scan_first_index(D, T, x) for x in range(n)]
    best, witness = 0, (0, 0, 0, 0)
    for x, (val, yzw) in enumerate(parts):
        if val > best:
            best, witness = val, (x, *yzw)
    return HyperbolicityReport(Fraction(best, 2 * space.scale), FOUR_POINT, witness)


def _farthest_from_geodesics(space, g, a, b, cap):
    """For every point p: max over geodesics P from a to b of d(p, P), and the argmax index."""
    paths, trunc = enumerate_geodesics(g, a, b, cap, space)
    best = None
    arg = None
    for k, path in enumerate(paths):
        col = space.table[:, list(path.vertices)].min(axis=1)
        if best is None:
            best = col.copy()
            arg = np.zeros(space.n, dtype=np.int64)
        else:
            upd = col > best
            best[upd] = col[upd]
            arg[upd] = k
    return best, arg, paths, trunc


def delta_slim(
    g: Graph,
    geodesic_cap: int = 64,
    space: FiniteMetricSpace | None = None,
) -> HyperbolicityReport:
    """Slim-triangle constant, universally quantified over geodesic choices.

    Every triple (a, b, c) with b < c is visited with ``a`` as the apex, so each
    side of every triangle gets checked against the other two, and triples with
    ``a`` equal to ``b`` or ``c`` cover geodesic bigons.  Because the geodesics
    for [a,b] and [a,c] are chosen independently, the worst case for a point p
    on [b,c] is min(max_P d(p, P_ab), max_P d(p, P_ac)).

    Witness: (a, b, c, i_bc, i_ab, i_ac), the geodesic indices being positions
    in ``enumerate_geodesics`` output for b->c, a->b and a->c.
    """
    sp = space if space is not None else build_space(g)
    n = sp.n
    if n == 0:
        return HyperbolicityReport(Fraction(0), SLIM, ())
    far = np.zeros((n, n, n), dtype=np.int64)  # far[a, b, p]
    far_arg = np.zeros((n, n, n), dtype=np.int64)
    geos: dict[tuple[int, int], list] = {}
    truncated = False
    for a in range(n):
        for b in range(n):
            best, arg, paths, trunc = _farthest_from_geodesics(sp, g, a, b, geodesic_cap)
            far[a, b] = best
            far_arg[a, b] = arg
            geos[a, b] = paths
            truncated |= trunc
    best_val = -1
    witness = (0, 0, 0, 0, 0, 0)
    for b in range(n):
        for c in range(b + 1, n):
            for q, path in enumerate(geos[b, c]):
                vs = list(path.vertices)
                vals = np.minimum(far[:, b][:, vs], far[:, c][:, vs])  # (apex, position)
                flat = int(np.argmax(vals))
                v = int(vals.flat[flat])
                if v > best_val:
                    a, pos = np.unravel_index(flat, vals.shape)
                    p = vs[int(pos)]
                    best_val = v
                    witness = (int(a), b, c, q, int(far_arg[a, b, p]), int(far_arg[a, c, p]))
    if best_val < 0:
        best_val = 0
    return HyperbolicityReport(Fraction(best_val, sp.scale), SLIM, witness, truncated)


def slim_triangle_value(
    g: Graph, witness: tuple[int, ...], geodesic_cap: int = 64, space: FiniteMetricSpace | None = None
) -> Fraction:
    """Re-evaluate a slim witness: max over p on [b,c] of d(p, [a,b] u [a,c])."""
    sp = space if space is not None else build_space(g)
    a, b, c, i_bc, i_ab, i_ac = witness
    bc = enumerate_geodesics(g, b, c, geodesic_cap, sp)[0][i_bc]
    ab = enumerate_geodesics(g, a, b, geodesic_cap, sp)[0][i_ab]
    ac = enumerate_geodesics(g, a, c, geodesic_cap, sp)[0][i_ac]
    others = sorted(set(ab.vertices) | set(ac.vertices))
    sub = sp.table[np.ix_(list(bc.vertices), others)]
    return Fraction(int(sub.min(axis=1).max()), sp.scale)
