"""Command-line entry point: ``coarsegeom <command> [flags]``.

Every command writes JSON to stdout (or ``--out``).  Exit status is 0 on
success, 2 on input/precondition errors and 1 when a hard invariant fails.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import experiment as exp
from .families import KINDS, FamilySpec, InvalidSpec, generate
from .hyperbolicity import delta_four_point, delta_slim
from .metric import GraphError, build_space, format_graph, read_graph
from .quasigeodesic import ParamPath, QGParams, fit_c, morse_radius, slack_for, tame, verify_qg
from .subspaces import (
    BoundMissed,
    NoIntersection,
    Subspace,
    certify_qg_subspace,
    splice_union,
    triangle_experiment,
)


class UsageError(Exception):
    pass


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _load_json(path: str, what: str):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path}: invalid JSON ({exc})") from None


def _load_path(path: str) -> ParamPath:
    obj = _load_json(path, "path file")
    try:
        return ParamPath.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"path file {path}: {exc}") from None


def _load_subspace(path: str) -> Subspace:
    obj = _load_json(path, "subspace file")
    try:
        return Subspace.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"subspace file {path}: {exc}") from None


def _check_points(sp, points, what):
    bad = [p for p in points if not 0 <= p < sp.n]
    if bad:
        raise UsageError(f"{what} refers to vertices outside the graph: {bad}")


def _emit(args, obj) -> None:
    text = json.dumps(obj, sort_keys=True) if args.json else json.dumps(obj, indent=2, sort_keys=True)
    if getattr(args, "out", None):
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _graph(args):
    if not args.graph:
        raise UsageError("--graph is required")
    g = read_graph(args.graph)
    return g, build_space(g)


def cmd_gen(args) -> int:
    spec = FamilySpec(args.kind, n=args.n, k=args.k, depth=args.depth, chords=args.chords, seed=args.seed)
    text = format_graph(generate(spec))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def cmd_delta(args) -> int:
    g, sp = _graph(args)
    reports = []
    if args.method in ("four_point", "both"):
        reports.append(delta_four_point(sp, threads=args.threads).to_json())
    if args.method in ("slim", "both"):
        reports.append(delta_slim(g, args.geodesic_cap, sp).to_json())
    _emit(args, reports[0] if len(reports) == 1 else reports)
    return 0


def cmd_verify(args) -> int:
    g, sp = _graph(args)
    path = _load_path(args.path)
    _check_points(sp, path.points, "path")
    _emit(args, verify_qg(sp, path, QGParams(args.lam, args.c)).to_json())
    return 0


def cmd_fit(args) -> int:
    g, sp = _graph(args)
    path = _load_path(args.path)
    _check_points(sp, path.points, "path")
    lam = max(args.lam, Fraction(1))
    _emit(args, {"lambda": str(lam), "c": str(fit_c(sp, path, lam))})
    return 0


def cmd_tame(args) -> int:
    g, sp = _graph(args)
    path = _load_path(args.path)
    _check_points(sp, path.points, "path")
    out, est = tame(g, path, args.geodesic_cap, sp)
    slack = slack_for(sp)
    verdict = verify_qg(sp, out, QGParams(1, 2 * est.r + slack))
    ok = verdict.passed and out.image <= path.image and out.endpoints() == path.endpoints()
    _emit(args, {
        "path": out.to_json(), "morse": est.to_json(), "slack": str(slack),
        "check": {"lambda": "1", "c": str(2 * est.r + slack), **verdict.to_json()},
        "image_contained": out.image <= path.image,
    })
    return 0 if ok else 1


def cmd_subspace(args) -> int:
    g, sp = _graph(args)
    A = _load_subspace(args.subspace)
    _check_points(sp, A.points, "subspace")
    cert = certify_qg_subspace(g, A, QGParams(args.lam, args.c), args.budget, sp)
    _emit(args, {"label": A.label, **cert.to_json()})
    return 0


def cmd_splice(args) -> int:
    g, sp = _graph(args)
    A, B = _load_subspace(args.subspace_a), _load_subspace(args.subspace_b)
    qa, qb = _load_path(args.path_a), _load_path(args.path_b)
    for what, pts in (("subspace A", A.points), ("subspace B", B.points), ("path A", qa.points), ("path B", qb.points)):
        _check_points(sp, pts, what)
    c = args.c if args.c is not None else max(fit_c(sp, qa, 1), fit_c(sp, qb, 1))
    if args.r is not None:
        r = args.r
    else:
        r = max(morse_radius(g, qa, args.geodesic_cap, sp).r, morse_radius(g, qb, args.geodesic_cap, sp).r)
    delta = args.delta if args.delta is not None else delta_slim(g, args.geodesic_cap, sp).delta
    q = QGParams(1, c)
    for label, qg in (("A", qa), ("B", qb)):
        v = verify_qg(sp, qg, q)
        if not v.passed:
            raise UsageError(f"path {label} is not a (1, {c})-quasigeodesic (pair {v.worst_pair})")
    try:
        out, wit = splice_union(g, A, B, qa, qb, q, delta, r, args.geodesic_cap, sp)
    except BoundMissed as exc:
        _emit(args, {"status": "BoundMissed", "bound": str(exc.bound), **exc.verdict.to_json()})
        return 1
    _emit(args, {
        "status": "PASS", "path": out.to_json(), "witness": wit.to_json(),
        "c": str(c), "r": str(r), "delta": str(delta),
    })
    return 0


def cmd_triangle(args) -> int:
    g, sp = _graph(args)
    try:
        a, b, c = (int(v) for v in args.vertices.split(","))
    except ValueError:
        raise UsageError("--vertices expects 'a,b,c'") from None
    _check_points(sp, (a, b, c), "triangle")
    rec = triangle_experiment(g, a, b, c, QGParams(args.lam, args.c), args.budget, args.geodesic_cap, space=sp)
    line = json.dumps(rec.to_json(), sort_keys=True)
    if args.out:
        with open(args.out, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
    else:
        print(line)
    # crossing property is a hard invariant
    if rec.case == "found" and not (rec.z is not None and rec.escaped):
        return 1
    return 0


def cmd_experiment(args) -> int:
    family = FamilySpec(args.kind, n=args.n, k=args.k, depth=args.depth, chords=args.chords, seed=args.seed)
    sizes = tuple(int(s) for s in args.sizes.split(",")) if args.sizes else ()
    count = args.count if args.count is not None else max(len(sizes), 1)
    checks = tuple(args.checks.split(",")) if args.checks else exp.CHECKS
    try:
        cfg = exp.ExperimentConfig(
            family=family, count=count, sizes=sizes, q=QGParams(args.lam, args.c),
            geodesic_cap=args.geodesic_cap, budget=args.budget, checks=checks,
            slim_max_n=args.slim_max_n,
        )
        cfg.instance_spec(0)
    except InvalidSpec:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = exp.run_experiment(cfg, threads=args.threads)
    summary = exp.summarize(records)
    report = exp.render_report(records)
    if args.out:
        Path(args.out).write_text(report, encoding="utf-8")
    else:
        sys.stdout.write(report)
    if args.csv:
        Path(args.csv).write_text(exp.render_csv(records), encoding="utf-8")
    print(json.dumps(summary, sort_keys=True) if args.json else json.dumps(summary, indent=2, sort_keys=True),
          file=sys.stderr if not args.out else sys.stdout)
    return 1 if summary["hard_failures"] else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", help="graph file ('n <count>' header, then 'u v w' lines)")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--json", action="store_true", help="compact single-line JSON")
    common.add_argument("--threads", type=_positive, default=1)
    common.add_argument("--geodesic-cap", type=_positive, default=64)
    common.add_argument("--budget", type=_positive, default=20000)
    common.add_argument("--lambda", dest="lam", type=_frac, default=Fraction(1))
    common.add_argument("--c", type=_frac, default=None)
    common.add_argument("--seed", type=_u64, default=0)

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--kind", choices=KINDS, required=True)
    fam.add_argument("--n", type=int, default=0)
    fam.add_argument("--k", type=int, default=0)
    fam.add_argument("--depth", type=int, default=0)
    fam.add_argument("--chords", type=int, default=0)

    p = argparse.ArgumentParser(prog="coarsegeom", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen", parents=[common, fam], help="write a family graph")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("delta", parents=[common], help="hyperbolicity constant")
    s.add_argument("--method", choices=["four_point", "slim", "both"], default="four_point")
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("verify-qg", parents=[common], help="check a sampled path against (lambda, c)")
    s.add_argument("--path", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("fit", parents=[common], help="smallest c for a path at given lambda")
    s.add_argument("--path", required=True)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("tame", parents=[common], help="tame a quasigeodesic onto its own image")
    s.add_argument("--path", required=True)
    s.set_defaults(func=cmd_tame)

    s = sub.add_parser("subspace", parents=[common], help="certify a quasigeodesic subspace")
    s.add_argument("--subspace", required=True)
    s.set_defaults(func=cmd_subspace)

    s = sub.add_parser("splice", parents=[common], help="splice quasigeodesics from two subspaces")
    s.add_argument("--subspace-a", required=True)
    s.add_argument("--subspace-b", required=True)
    s.add_argument("--path-a", required=True, help="quasigeodesic a -> w inside A")
    s.add_argument("--path-b", required=True, help="quasigeodesic w -> b inside B")
    s.add_argument("--delta", type=_frac, default=None, help="default: slim delta of the graph")
    s.add_argument("--r", type=_frac, default=None, help="default: larger Morse radius of the inputs")
    s.set_defaults(func=cmd_splice)

    s = sub.add_parser("triangle", parents=[common], help="four-segment experiment on one triangle")
    s.add_argument("--vertices", required=True, help="a,b,c")
    s.set_defaults(func=cmd_triangle)

    s = sub.add_parser("experiment", parents=[common, fam], help="batch run over a family")
    s.add_argument("--count", type=_positive, default=None)
    s.add_argument("--sizes", help="comma list of sizes cycled over instances (n, k or depth)")
    s.add_argument("--checks", help=f"comma list from {','.join(exp.CHECKS)}")
    s.add_argument("--csv", help="per-instance summary CSV")
    s.add_argument("--slim-max-n", type=_positive, default=64)
    s.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("verify-qg", "subspace", "triangle", "experiment") and args.c is None:
        args.c = Fraction(0) if args.command != "experiment" else Fraction(1)
    try:
        return args.func(args)
    except (GraphError, InvalidSpec, UsageError, NoIntersection, OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
