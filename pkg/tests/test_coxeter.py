from __future__ import annotations

import random

import pytest

from enriques_lattice.coxeter import (
    AffineType,
    CoxeterDiagram,
    DiagramError,
    build_diagram,
    census_table,
    check_finite_volume,
    classify_component,
    diagram_automorphisms,
    enumerate_max_parabolics,
    is_automorphism,
    naive_max_parabolics,
    scan_max_parabolics,
)
from enriques_lattice.model import model_from_dict, model_to_dict


def diagram(n: int, edges: dict[tuple[int, int], int], rank: int = 10) -> CoxeterDiagram:
    w = [[0] * n for _ in range(n)]
    for (a, b), x in edges.items():
        w[a][b] = w[b][a] = x
    return CoxeterDiagram(tuple(range(n)), tuple(map(tuple, w)), {}, rank)


def path(n: int) -> dict:
    return {(i, i + 1): 1 for i in range(n - 1)}


def affine(letter: str, k: int) -> CoxeterDiagram:
    if letter == "A":
        if k == 1:
            return diagram(2, {(0, 1): 2})
        return diagram(k + 1, {**path(k + 1), (0, k): 1})
    if letter == "D":
        e = path(k - 1)
        e.update({(k - 1, 1): 1, (k, k - 3): 1}) if k > 4 else e.update({(3, 1): 1, (4, 1): 1})
        return diagram(k + 1, e)
    arms = {6: (2, 2, 2), 7: (1, 3, 3), 8: (1, 2, 5)}[k]
    edges, nxt = {}, 1
    for length in arms:
        prev = 0
        for _ in range(length):
            edges[(prev, nxt)] = 1
            prev, nxt = nxt, nxt + 1
    return diagram(nxt, edges)


@pytest.mark.parametrize("letter,k", [("A", 1), ("A", 2), ("A", 5), ("A", 7), ("D", 4), ("D", 5),
                                      ("D", 6), ("E", 6), ("E", 7), ("E", 8)])
def test_affine_templates(letter, k):
    d = affine(letter, k)
    assert classify_component(d, d.vertices) == AffineType(letter, k)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_finite_types_are_not_affine(n):
    d = diagram(n, path(n))
    assert classify_component(d, d.vertices) is None


def test_full_census(model):
    d = build_diagram(model)
    ps = enumerate_max_parabolics(d)
    assert len(ps) == 29
    table = census_table(ps)
    assert {k: (n, sorted(c)) for k, (n, c) in table.items()} == {
        "E7~+A1~": (12, [(8, 1, 1)]),
        "E6~+A2~": (4, [(7, 3, 0)]),
        "D6~+A1~+A1~": (6, [(8, 1, 2)]),
        "A7~+A1~": (3, [(8, 2, 0)]),
        "A5~+A2~+A1~": (4, [(7, 3, 1)]),
    }
    assert all(p.total_rank == 8 for p in ps)


def test_bad_weight_raises(model):
    data = model_to_dict(model)
    data["gram20"][0][1] = data["gram20"][1][0] = 3
    with pytest.raises(DiagramError):
        build_diagram(model_from_dict(data))


def _keys(ps):
    return sorted((p.type_string, tuple(sorted(map(str, p.vertices)))) for p in ps)


def test_pruned_matches_naive_on_random_subdiagrams(model):
    d = build_diagram(model)
    rng = random.Random(20261016)
    found = 0
    for _ in range(12):
        keep = rng.sample(d.vertices, rng.randint(4, 12))
        sub = d.restrict(keep)
        for r in range(1, min(8, len(keep) - 1) + 1):
            fast = enumerate_max_parabolics(sub, rank=r)
            assert _keys(fast) == _keys(naive_max_parabolics(sub, rank=r))
            assert _keys(fast) == _keys(scan_max_parabolics(sub, rank=r))
            found += len(fast)
    assert found > 0


def test_finite_volume_holds(model):
    rep = check_finite_volume(build_diagram(model))
    assert rep.holds and not rep.failures and rep.connected_count > 0


def test_finite_volume_detects_dead_end():
    # A1~ {0,1} touches the A2~ triangle {2,3,4}; no rank-2 parabolic contains it as a component
    d = diagram(5, {(0, 1): 2, (2, 3): 1, (3, 4): 1, (2, 4): 1, (0, 2): 1}, rank=4)
    rep = check_finite_volume(d)
    assert not rep.holds
    assert (0, 1) in rep.failures


def test_automorphisms(model):
    g = diagram_automorphisms(build_diagram(model))
    assert g.order == 24
    assert g.equals_index_action
    assert all(is_automorphism(build_diagram(model), p) for p in g.elements)


def test_automorphisms_of_pentagon():
    d = diagram(5, {**path(5), (0, 4): 1})
    assert diagram_automorphisms(d).order == 10
