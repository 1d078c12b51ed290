import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coarsegeom.families import FamilySpec, generate
from coarsegeom.hyperbolicity import (
    HyperbolicityReport,
    delta_four_point,
    delta_slim,
    four_point_value,
    gromov_product,
    slim_triangle_value,
)
from coarsegeom.metric import Graph, build_space

from conftest import cycle, grid, oracle_four_point, oracle_slim, path_graph

# frozen from oracle_four_point / oracle_slim (networkx + brute force)
C8_FOUR_POINT = Fraction(2)
C6_SLIM = Fraction(1)


def test_gromov_product_examples(c6):
    sp = build_space(c6)
    assert gromov_product(sp, 2, 2, 2) == 0
    assert gromov_product(build_space(path_graph(3)), 0, 2, 1) == 0
    assert gromov_product(sp, 0, 3, 1) == 0


def test_four_point_single_point():
    r = delta_four_point(build_space(Graph(1)))
    assert r.delta == 0 and r.method == "four_point"


def test_four_point_c8():
    sp = build_space(cycle(8))
    assert oracle_four_point(cycle(8)) == C8_FOUR_POINT
    r = delta_four_point(sp)
    assert r.delta == C8_FOUR_POINT
    assert four_point_value(sp, *r.witness) == r.delta


def test_four_point_witness_is_lexicographically_first():
    sp = build_space(cycle(6))
    r = delta_four_point(sp)
    n = sp.n
    first = next(
        (x, y, z, w)
        for x in range(n) for y in range(n) for z in range(n) for w in range(n)
        if four_point_value(sp, x, y, z, w) == r.delta
    )
    assert r.witness == first


@pytest.mark.parametrize("threads", [1, 2, 5])
def test_four_point_independent_of_threads(threads):
    sp = build_space(generate(FamilySpec("noisy_tree", n=25, chords=6, seed=2)))
    assert delta_four_point(sp, threads=threads) == delta_four_point(sp)


@pytest.mark.parametrize("s", [2, 3, Fraction(1, 2)])
def test_four_point_scales_exactly(s):
    for g in (cycle(7), grid(3), generate(FamilySpec("noisy_tree", n=9, chords=2, seed=5))):
        base = delta_four_point(build_space(g)).delta
        assert delta_four_point(build_space(g.scaled(s))).delta == s * base


def test_slim_trees_and_paths():
    for g in (path_graph(7), generate(FamilySpec("random_tree", n=15, seed=3)),
              generate(FamilySpec("binary_tree", depth=3))):
        assert delta_slim(g).delta == 0


def test_slim_c6_matches_oracle():
    g = cycle(6)
    assert oracle_slim(g) == C6_SLIM
    r = delta_slim(g)
    assert r.delta == C6_SLIM and not r.truncated
    assert slim_triangle_value(g, r.witness) == r.delta


@pytest.mark.parametrize("g", [cycle(4), cycle(5), cycle(7), grid(3),
                               Graph(4, ((0, 1, 1), (1, 2, Fraction(1, 2)), (2, 3, 2), (3, 0, Fraction(3, 2))))])
def test_slim_matches_oracle(g):
    r = delta_slim(g)
    assert r.delta == oracle_slim(g)
    assert slim_triangle_value(g, r.witness) == r.delta


def test_slim_truncation_flag():
    r = delta_slim(grid(4), geodesic_cap=2)
    assert r.truncated


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 14), st.integers(0, 4), st.integers(0, 2**32))
def test_slim_zero_implies_four_point_zero(n, chords, seed):
    chords = min(chords, n * (n - 1) // 2 - (n - 1))
    g = generate(FamilySpec("noisy_tree", n=n, chords=chords, seed=seed))
    sp = build_space(g)
    if delta_slim(g, space=sp).delta == 0:
        assert delta_four_point(sp).delta == 0


def test_report_json_roundtrip():
    r = delta_four_point(build_space(cycle(9)))
    obj = json.loads(json.dumps(r.to_json()))
    assert obj["delta"] == str(r.delta)
    assert HyperbolicityReport.from_json(obj) == r
