"""Sampled quasigeodesics: verification, tight constants, Morse radius, taming."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .metric import (
    FiniteMetricSpace,
    Graph,
    VertexPath,
    as_fraction,
    build_space,
    enumerate_geodesics,
    hausdorff_distance,
)


@dataclass(frozen=True)
class QGParams:
    """Quasigeodesic constants (lambda, c); lambda below 1 is raised to 1."""

    lam: Fraction = Fraction(1)
    c: Fraction = Fraction(0)

    def __post_init__(self):
        lam, c = as_fraction(self.lam), as_fraction(self.c)
        if lam <= 0:
            raise ValueError("lambda must be positive")
        if c < 0:
            raise ValueError("c must be nonnegative")
        object.__setattr__(self, "lam", max(lam, Fraction(1)))
        object.__setattr__(self, "c", c)


@dataclass(frozen=True)
class ParamPath:
    """A map t_i -> p_i sampled on a strictly increasing grid starting at 0."""

    params: tuple[Fraction, ...]
    points: tuple[int, ...]

    def __post_init__(self):
        params = tuple(as_fraction(t) for t in self.params)
        points = tuple(int(p) for p in self.points)
        if not points:
            raise ValueError("empty path")
        if len(params) != len(points):
            raise ValueError("params and points differ in length")
        if params[0] != 0:
            raise ValueError("first parameter must be 0")
        if any(s >= t for s, t in zip(params, params[1:])):
            raise ValueError("parameters must be strictly increasing")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_vertex_path(cls, space: FiniteMetricSpace, path: VertexPath | Sequence[int]) -> "ParamPath":
        """Cumulative-length parameterisation of a walk along edges."""
        if not isinstance(path, VertexPath):
            path = VertexPath(tuple(path), Fraction(0))
        return cls(tuple(path.cumulative(space)), path.vertices)

    @classmethod
    def unit_steps(cls, points: Sequence[int], step=1) -> "ParamPath":
        step = as_fraction(step)
        return cls(tuple(i * step for i in range(len(points))), tuple(points))

    @property
    def domain_length(self) -> Fraction:
        return self.params[-1]

    def endpoints(self) -> tuple[int, int]:
        return self.points[0], self.points[-1]

    @property
    def image(self) -> frozenset[int]:
        return frozenset(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {"params": [str(t) for t in self.params], "points": list(self.points)}

    @classmethod
    def from_json(cls, obj: dict) -> "ParamPath":
        return cls(tuple(Fraction(t) for t in obj["params"]), tuple(obj["points"]))


@dataclass(frozen=True)
class QGVerdict:
    passed: bool
    worst_pair: tuple[int, int] | None
    violation: Fraction  # largest amount by which either inequality is broken (<= 0 on PASS)

    def to_json(self) -> dict:
        return {
            "verdict": "PASS" if self.passed else "FAIL",
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "violation": str(self.violation),
        }


@dataclass(frozen=True)
class MorseEstimate:
    r: Fraction
    geodesic: VertexPath
    truncated: bool = False

    def to_json(self) -> dict:
        return {"r": str(self.r), "geodesic": list(self.geodesic.vertices), "truncated": self.truncated}


def _worst_violation(space: FiniteMetricSpace, path: ParamPath, lam: Fraction, c: Fraction):
    """Max over pairs i < j of the two one-sided deficits, exact.

    Lower deficit: dt/lam - c - d.  Upper deficit: d - lam*dt - c.
    Everything is put over one integer denominator and evaluated with Python
    ints inside object arrays, so no overflow is possible.
    """
    m = len(path.points)
    if m < 2:
        return Fraction(-c), None
    lt = math.lcm(*(t.denominator for t in path.params))
    T = np.array([int(t * lt) for t in path.params], dtype=object)
    pts = list(path.points)
    Dm = np.array(space.table[np.ix_(pts, pts)].tolist(), dtype=object)
    S = space.scale
    p, q = lam.numerator, lam.denominator
    cn, cd = c.numerator, c.denominator
    # common denominator K = lt * S * p * q * cd
    dT = T[None, :] - T[:, None]
    low = dT * (q * q * S * cd) - cn * (lt * S * p * q) - Dm * (lt * p * q * cd)
    up = Dm * (lt * p * q * cd) - dT * (p * p * S * cd) - cn * (lt * S * p * q)
    worst = np.maximum(low, up)
    iu = np.triu_indices(m, k=1)
    vals = worst[iu]
    k = int(np.argmax(vals))
    K = lt * S * p * q * cd
    return Fraction(int(vals[k]), K), (int(iu[0][k]), int(iu[1][k]))


def verify_qg(space: FiniteMetricSpace, path: ParamPath, q: QGParams) -> QGVerdict:
    """Check lam^-1 dt - c <= d(p_i, p_j) <= lam dt + c over every sample pair."""
    viol, pair = _worst_violation(space, path, q.lam, q.c)
    return QGVerdict(viol <= 0, pair, viol)


def fit_c(space: FiniteMetricSpace, path: ParamPath, lam=1) -> Fraction:
    """Smallest c for which ``path`` is a (lam, c)-quasigeodesic."""
    lam = as_fraction(lam)
    if lam < 1:
        raise ValueError("lambda must be >= 1")
    viol, _ = _worst_violation(space, path, lam, Fraction(0))
    return max(viol, Fraction(0))


def morse_radius(
    g: Graph, path: ParamPath, geodesic_cap: int = 64, space: FiniteMetricSpace | None = None
) -> MorseEstimate:
    sp = space if space is not None else build_space(g)
    a, b = path.endpoints()
    geos, trunc = enumerate_geodesics(g, a, b, geodesic_cap, sp)
    image = path.image
    best, best_geo = None, None
    for geo in geos:
        h = hausdorff_distance(sp, image, geo.vertices)
        if best is None or h < best:
            best, best_geo = h, geo
    return MorseEstimate(best, best_geo, trunc)


def nearest_in(space: FiniteMetricSpace, x: int, candidates: Iterable[int]) -> int:
    """Closest candidate to x, lowest index on ties."""
    cand = sorted(set(candidates))
    row = space.table[x, cand]
    return cand[int(np.argmin(row))]


def tame(
    g: Graph, path: ParamPath, geodesic_cap: int = 64, space: FiniteMetricSpace | None = None
) -> tuple[ParamPath, MorseEstimate]:
    """Replace ``path`` by a near-(1, 2r) quasigeodesic drawn from its own image.

    The output lives on the arc-length grid of the closest geodesic between the
    endpoints; each grid point is sent to the nearest point of the input image.
    """
    sp = space if space is not None else build_space(g)
    est = morse_radius(g, path, geodesic_cap, sp)
    grid = est.geodesic.cumulative(sp)
    image = path.image
    pts = [nearest_in(sp, v, image) for v in est.geodesic.vertices]
    pts[0], pts[-1] = path.endpoints()
    return ParamPath(tuple(grid), tuple(pts)), est


def slack_for(space: FiniteMetricSpace) -> Fraction:
    """Discretisation slack used by taming checks: twice the longest edge."""
    mw = max((w for row in space.adjacency or () for _, w in row), default=0)
    return Fraction(2 * mw, space.scale)
