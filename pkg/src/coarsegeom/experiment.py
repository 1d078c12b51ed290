"""Batch experiment over a seeded graph family.

Each instance is independent; results come back in instance order whatever
the worker count, so report files are byte-for-byte reproducible.
"""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .families import FamilySpec, SplitMix64, detour_walk, generate
from .hyperbolicity import delta_four_point, delta_slim
from .metric import build_space
from .quasigeodesic import ParamPath, QGParams, fit_c, morse_radius, slack_for, tame, verify_qg
from .subspaces import BoundMissed, Subspace, splice_union, triangle_experiment

CHECKS = ("delta", "tame", "splice", "triangle")
TREE_KINDS = ("random_tree", "binary_tree")

CSV_FIELDS = [
    "index", "family", "seed", "delta_4pt", "delta_slim", "fitted_lambda", "fitted_c",
    "R", "splice_constant", "bound_margin",
]


@dataclass(frozen=True)
class ExperimentConfig:
    family: FamilySpec
    count: int = 1
    sizes: tuple[int, ...] = ()
    q: QGParams = field(default_factory=lambda: QGParams(1, 1))
    geodesic_cap: int = 64
    budget: int = 20000
    checks: tuple[str, ...] = CHECKS
    slim_max_n: int = 64
    detours: int = 2
    detour_depth: int = 2

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("instance count must be >= 1")
        if self.geodesic_cap < 1 or self.budget < 1:
            raise ValueError("caps and budgets must be positive")
        bad = set(self.checks) - set(CHECKS)
        if bad:
            raise ValueError(f"unknown checks: {sorted(bad)}")

    def instance_spec(self, index: int) -> FamilySpec:
        spec = replace(self.family, seed=self.family.seed + index)
        if self.sizes:
            size = self.sizes[index % len(self.sizes)]
            key = {"grid": "k", "binary_tree": "depth"}.get(spec.kind, "n")
            spec = replace(spec, **{key: size})
        spec.validate()
        return spec


def _s(v) -> str | None:
    return None if v is None else str(v)


def run_instance(cfg: ExperimentConfig, index: int) -> dict:
    spec = cfg.instance_spec(index)
    g = generate(spec)
    sp = build_space(g)
    rng = SplitMix64(spec.seed).fork(0x5EED)
    rec: dict = {
        "index": index, "family": spec.label(), "kind": spec.kind, "seed": spec.seed,
        "n": g.n, "edges": len(g.edges), "failures": [],
    }
    slim = None
    if "delta" in cfg.checks or "splice" in cfg.checks:
        if g.n <= cfg.slim_max_n:
            slim = delta_slim(g, cfg.geodesic_cap, sp)
    if "delta" in cfg.checks:
        four = delta_four_point(sp)
        rec["delta"] = {"four_point": four.to_json(), "slim": slim.to_json() if slim else None}
        if spec.kind in TREE_KINDS and (four.delta != 0 or (slim and slim.delta != 0)):
            rec["failures"].append("tree_delta_nonzero")
        if slim is not None and slim.delta == 0 and four.delta != 0:
            rec["failures"].append("slim_zero_but_four_point_positive")
    if "tame" in cfg.checks:
        rec["tame"] = _tame_check(cfg, g, sp, rng)
        if rec["tame"]["status"] == "FAIL":
            rec["failures"].append("tame")
    if "splice" in cfg.checks:
        rec["splice"] = _splice_check(cfg, g, sp, rng, slim)
        if rec["splice"]["status"] == "FAIL":
            rec["failures"].append("splice_bound_missed")
    if "triangle" in cfg.checks:
        rec["triangle"] = _triangle_check(cfg, g, sp, rng)
        if rec["triangle"]["status"] == "FAIL":
            rec["failures"].append("triangle")
    return rec


def _walk(cfg, g, sp, rng, a, b) -> ParamPath:
    pts = detour_walk(g, sp, rng, a, b, cfg.detours, cfg.detour_depth)
    return ParamPath.from_vertex_path(sp, pts)


def _tame_check(cfg, g, sp, rng) -> dict:
    a, b = rng.below(g.n), rng.below(g.n)
    path = _walk(cfg, g, sp, rng, a, b)
    out, est = tame(g, path, cfg.geodesic_cap, sp)
    slack = slack_for(sp)
    verdict = verify_qg(sp, out, QGParams(1, 2 * est.r + slack))
    ok = verdict.passed and out.image <= path.image and out.endpoints() == path.endpoints()
    return {
        "status": "PASS" if ok else "FAIL",
        "input": path.to_json(), "output": out.to_json(),
        "fitted_c": str(fit_c(sp, path, 1)), "r": str(est.r), "truncated": est.truncated,
        "verdict": verdict.to_json(),
    }


def _splice_check(cfg, g, sp, rng, slim) -> dict:
    w, a, b = rng.below(g.n), rng.below(g.n), rng.below(g.n)
    if slim is None:
        return {"status": "UNKNOWN", "reason": "graph too large for slim delta"}
    qa = _walk(cfg, g, sp, rng, a, w)
    qb = _walk(cfg, g, sp, rng, w, b)
    C = max(fit_c(sp, qa, 1), fit_c(sp, qb, 1))
    R = max(morse_radius(g, qa, cfg.geodesic_cap, sp).r, morse_radius(g, qb, cfg.geodesic_cap, sp).r)
    A, B = Subspace(qa.image, "A"), Subspace(qb.image, "B")
    base = {"a": a, "b": b, "w": w, "fitted_c": str(C), "R": str(R), "delta": str(slim.delta)}
    try:
        out, wit = splice_union(g, A, B, qa, qb, QGParams(1, C), slim.delta, R, cfg.geodesic_cap, sp)
    except BoundMissed as exc:
        return {**base, "status": "FAIL", "bound": str(exc.bound), "verdict": exc.verdict.to_json()}
    const = fit_c(sp, out, 1)
    return {
        **base, "status": "PASS", "path": out.to_json(), "witness": wit.to_json(),
        "splice_constant": str(const), "bound_margin": str(wit.bound - const),
        "image_ok": out.image <= A.points | B.points, "endpoints_ok": out.endpoints() == (a, b),
    }


def _triangle_check(cfg, g, sp, rng) -> dict:
    if g.n < 3:
        return {"status": "UNKNOWN", "reason": "fewer than three vertices"}
    a = rng.below(g.n)
    b = (a + 1 + rng.below(g.n - 1)) % g.n
    rest = [v for v in range(g.n) if v not in (a, b)]
    c = rng.choice(rest)
    tri = triangle_experiment(g, a, b, c, cfg.q, cfg.budget, cfg.geodesic_cap, space=sp)
    out = tri.to_json()
    slack = slack_for(sp)
    if tri.case == "inconclusive":
        out["status"] = "UNKNOWN"
    elif tri.case == "short_side":
        out["status"] = "PASS" if tri.bound_holds else "FAIL"
    else:
        ok = tri.z is not None and tri.escaped and tri.d_xa_z <= tri.bound + slack
        out["status"] = "PASS" if ok else "FAIL"
    return out


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[dict]:
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda i: run_instance(cfg, i), range(cfg.count)))
    return [run_instance(cfg, i) for i in range(cfg.count)]


def summarize(records: list[dict]) -> dict:
    counts = {chk: {"PASS": 0, "FAIL": 0, "UNKNOWN": 0} for chk in ("tame", "splice", "triangle")}
    maxima: dict[str, Fraction] = {}

    def bump(key, val):
        if val is None:
            return
        val = Fraction(val)
        if key not in maxima or val > maxima[key]:
            maxima[key] = val

    deltas = []
    for rec in records:
        for chk in counts:
            if chk in rec:
                counts[chk][rec[chk]["status"]] += 1
        if "delta" in rec:
            d4 = rec["delta"]["four_point"]["delta"]
            bump("delta_four_point", d4)
            bump("delta_slim", rec["delta"]["slim"] and rec["delta"]["slim"]["delta"])
            deltas.append(Fraction(d4))
        if "tame" in rec:
            bump("tame_r", rec["tame"]["r"])
            bump("tame_input_c", rec["tame"]["fitted_c"])
        if rec.get("splice", {}).get("status") == "PASS":
            bump("splice_R", rec["splice"]["R"])
            bump("splice_input_c", rec["splice"]["fitted_c"])
            bump("splice_constant", rec["splice"]["splice_constant"])
        if rec.get("triangle", {}).get("d_xa_z") is not None:
            bump("triangle_d_xa_z", rec["triangle"]["d_xa_z"])
    failures = sum(len(r["failures"]) for r in records)
    return {
        "instances": len(records),
        "hard_failures": failures,
        "counts": counts,
        "max": {k: str(v) for k, v in sorted(maxima.items())},
        "delta_nondecreasing": all(x <= y for x, y in zip(deltas, deltas[1:])),
        "inconclusive": any(c["UNKNOWN"] for c in counts.values()),
    }


def csv_rows(records: list[dict]) -> list[dict]:
    rows = []
    for rec in records:
        sp = rec.get("splice", {})
        delta = rec.get("delta", {})
        rows.append({
            "index": rec["index"],
            "family": rec["family"],
            "seed": rec["seed"],
            "delta_4pt": delta.get("four_point", {}).get("delta", ""),
            "delta_slim": (delta.get("slim") or {}).get("delta", ""),
            "fitted_lambda": "1" if "fitted_c" in sp else "",
            "fitted_c": sp.get("fitted_c", ""),
            "R": sp.get("R", ""),
            "splice_constant": sp.get("splice_constant", ""),
            "bound_margin": sp.get("bound_margin", ""),
        })
    return rows


def render_csv(records: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(csv_rows(records))
    return buf.getvalue()


def render_report(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)
