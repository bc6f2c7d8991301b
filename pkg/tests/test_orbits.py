from __future__ import annotations

import random
from fractions import Fraction

import pytest

from enriques_lattice.lattice import reflect
from enriques_lattice.model import (
    CURVE_LABELS,
    E_EDGE,
    E_VERTEX,
    G_LABELS,
    label,
    permutation_matrix_action,
    vector_from_labels,
)
from enriques_lattice.orbits import (
    DEGREE_NEGATIVE,
    IN_FUNDAMENTAL_DOMAIN,
    NEGATIVE_DEGREE,
    REDUCED_NOT_A_CURVE,
    NotNefReduced,
    OrbitError,
    PencilReport,
    apply_word,
    classify_curve_class,
    classify_pencil,
    enumerate_vectors,
    find_e6_end,
    orbit_ball,
    pencil_types,
    sextuple,
    sigma_reduce,
    pencil_table_rows,
    verify_orbit_characterizations,
)


def slow_reduce(x, m):
    """Oracle: the same descent written directly with exact reflections."""
    gs = [m.classes[g] for g in G_LABELS]
    applied = []
    while True:
        neg = [i for i, g in enumerate(gs, 1) if m.dot(x, g) < 0]
        if not neg or m.degree(x) < 0:
            return x, tuple(reversed(applied))
        x = reflect(x, gs[neg[0] - 1], m.gram10)
        applied.append(neg[0])


def random_word(rng, n):
    w = []
    for _ in range(n):
        w.append(rng.choice([a for a in (1, 2, 3, 4) if not w or w[-1] != a]))
    return w


def test_spec_reduction_examples(model):
    e4 = model.classes[label("E4")]
    r = sigma_reduce(apply_word(model, [4], e4), model)
    assert r.representative == e4 and r.word == (4,)
    x = apply_word(model, [4, 2], e4)
    r = sigma_reduce(x, model)
    assert r.representative == e4 and r.word == (4, 2)
    assert apply_word(model, r.word, r.representative) == x
    r = sigma_reduce(model.classes[label("E12")], model)
    assert r.word == () and r.verdict == IN_FUNDAMENTAL_DOMAIN


def test_reduction_matches_oracle_and_round_trips(model):
    rng = random.Random(99)
    for _ in range(300):
        seed = model.classes[rng.choice(CURVE_LABELS)]
        x = apply_word(model, random_word(rng, rng.randint(0, 6)), seed)
        r = sigma_reduce(x, model)
        rep, word = slow_reduce(x, model)
        assert (r.representative, r.word) == (rep, word)
        assert apply_word(model, r.word, r.representative) == x
        assert r.representative == seed
        assert r.steps <= model.degree(x)
        assert all(model.dot(r.representative, model.classes[g]) >= 0 for g in G_LABELS)


def test_reduce_rejects_bad_input(model):
    with pytest.raises(OrbitError):
        sigma_reduce(tuple(-c for c in model.H), model)
    with pytest.raises(OrbitError):
        sigma_reduce(tuple(Fraction(1, 4) for _ in range(10)), model)


def test_curve_classification_examples(model):
    g4 = classify_curve_class(model.classes[label("G4")], model)
    assert not g4.is_curve and g4.reason == REDUCED_NOT_A_CURVE
    assert g4.reduction.verdict == DEGREE_NEGATIVE
    f12 = classify_curve_class(model.classes[label("F12")], model)
    assert f12.curve == label("F12") and f12.reduction.word == ()
    x = apply_word(model, [3, 1], model.classes[label("E3")])
    c = classify_curve_class(x, model)
    assert c.curve == label("E3")
    neg = classify_curve_class(tuple(-v for v in model.classes[label("E1")]), model)
    assert neg.reason == NEGATIVE_DEGREE
    with pytest.raises(OrbitError):
        classify_curve_class(model.H, model)


def test_sextuples_separate_curves_and_are_invariant(model):
    six = {lab: sextuple(model.classes[lab], model) for lab in CURVE_LABELS}
    assert len(set(six.values())) == 16
    rng = random.Random(3)
    for _ in range(100):
        lab = rng.choice(CURVE_LABELS)
        x = apply_word(model, random_word(rng, 5), model.classes[lab])
        assert sextuple(x, model) == six[lab]
        assert classify_curve_class(x, model).curve == lab


def test_pencil_rays(model):
    ps = pencil_types(model)
    assert len(ps) == 29 and len({p.f for p in ps}) == 29
    for p in ps:
        assert model.dot(p.f, p.f) == 0 and model.degree(p.f) > 0
        assert model.numerical_content(p.f) == 1
        for comp in p.components:
            assert comp.null_vector == tuple(comp.null_multiple * c for c in p.f)
        assert p.mordell_weil_rank == sum(all(v.family == "G" for v in c.vertices) for c in p.components)
    assert {p.type_index for p in ps if not p.f_in_curve_lattice} == {2, 4}


def test_pencil_examples(model):
    hexagon = vector_from_labels(model, {"E1": 1, "E12": 1, "E2": 1, "E23": 1, "E3": 1, "E13": 1})
    rep = classify_pencil(hexagon, model)
    assert isinstance(rep, PencilReport)
    assert rep.type_index == 5 and rep.mordell_weil_rank == 0 and rep.input_multiple == 1
    assert rep.pencil.fiber_string() == "2A5~+A2~+A1~"
    twice = classify_pencil(tuple(2 * c for c in hexagon), model)
    assert twice.input_multiple == 2 and twice.pencil is rep.pencil
    for p in pencil_types(model):
        if p.type_index == 3:
            assert p.fiber_types_string() == "D6~+A1~" and p.mordell_weil_rank == 1
        if p.type_index == 1:
            a1 = [c for c in p.components if str(c.type) == "A1~"][0]
            assert {v.family for v in a1.vertices} == {"F", "G"} and not a1.is_multiple


def test_pencil_preconditions(model):
    hexagon = vector_from_labels(model, {"E1": 1, "E12": 1, "E2": 1, "E23": 1, "E3": 1, "E13": 1})
    with pytest.raises(OrbitError):
        classify_pencil(tuple(3 * c for c in hexagon), model)
    with pytest.raises(OrbitError):
        classify_pencil(model.H, model)
    with pytest.raises(OrbitError):
        classify_pencil(tuple(-c for c in hexagon), model)


def test_pencil_table_rows(model):
    rows = pencil_table_rows(model)
    assert [(r["type"], r["fiber_types"], r["mw_rank"], r["count"]) for r in rows] == [
        (1, "E7~+A1~", "0", 12), (2, "E6~+A2~", "0", 4), (3, "D6~+A1~", "1", 6),
        (4, "A7~+A1~", "0", 3), (5, "A5~+A2~+A1~", "0", 4)]


def test_enumeration_small(model):
    deg1 = enumerate_vectors(model, -2, 1)
    for e in E_VERTEX:
        assert model.classes[e] in deg1
    assert all(model.dot(v, v) == -2 and model.degree(v) == 1 for v in deg1)
    with pytest.raises(OrbitError):
        enumerate_vectors(model, -2, 0)
    with pytest.raises(OrbitError):
        enumerate_vectors(model, 4, 2)


@pytest.mark.parametrize("norm", [-2, 0])
def test_enumeration_is_s4_invariant_and_sublattice_consistent(model, norm):
    vecs = enumerate_vectors(model, norm, 3)
    assert vecs == sorted(vecs, key=lambda v: (model.degree(v), tuple(2 * c for c in v)))
    s = set(vecs)
    for p in [(2, 1, 3, 4), (2, 3, 4, 1)]:
        assert {permutation_matrix_action(model, p, v) for v in vecs} == s
    wide = enumerate_vectors(model, norm, 3, lattice="numerical")
    assert {v for v in wide if model.in_curve_lattice(v)} == s
    assert enumerate_vectors(model, norm, 3, threads=3) == vecs


def test_isotropic_degree_three_classified(model):
    for v in enumerate_vectors(model, 0, 3, primitive=True):
        out = classify_pencil(v, model)
        assert isinstance(out, (PencilReport, NotNefReduced))
        if isinstance(out, NotNefReduced):
            assert model.dot(out.reduction.representative, model.classes[out.witness]) < 0


def test_ball(model):
    b0 = orbit_ball(model, max_word_len=0)
    assert len(b0) == 16
    assert all(b0.weights[i][j] == model.dot(b0.vectors[i], b0.vectors[j])
               for i in range(16) for j in range(16))
    b1 = orbit_ball(model, max_word_len=1)
    assert len(b1) == 32
    for i in (1, 2, 3, 4):
        for lab in E_EDGE:
            assert apply_word(model, [i], model.classes[lab]) == model.classes[lab]
    with pytest.raises(OrbitError):
        orbit_ball(model, max_word_len=-1)


def test_characterizations(model):
    rep = verify_orbit_characterizations(orbit_ball(model, max_word_len=2))
    assert rep.passed, [(str(e.curve), e.property) for e in rep.entries if not e.passed]
    kinds = {(str(e.curve), e.property) for e in rep.entries}
    assert ("F12", "I3") in kinds and ("E1", "I8") in kinds and ("E12", "IV*-end") in kinds


def test_e6_witness_is_induced(model):
    ball = orbit_ball(model, max_word_len=1)
    v = ball.index_of(model.classes[label("E1")])
    w = find_e6_end(ball, v)
    assert w is not None
    edges = {(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)}
    for a in range(7):
        for b in range(a + 1, 7):
            assert ball.weights[w[a]][w[b]] == (1 if (a, b) in edges else 0)


def test_permuted_pencils_are_pencils(model):
    hexagon = vector_from_labels(model, {"E1": 1, "E12": 1, "E2": 1, "E23": 1, "E3": 1, "E13": 1})
    for p in [(2, 3, 4, 1), (1, 2, 4, 3)]:
        moved = permutation_matrix_action(model, p, hexagon)
        assert classify_pencil(moved, model).type_index == 5
