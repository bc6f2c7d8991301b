from __future__ import annotations

import itertools
import random

import pytest

from enriques_lattice.group import (
    IDENTITY,
    ONE,
    GroupElement,
    ParityError,
    WordError,
    act,
    all_elements,
    apply,
    check_parity,
    faithfulness_check,
    format_perm,
    identity_matrix,
    inverse,
    is_isometry,
    normal_form,
    parse_perm,
    parse_word,
    permutation,
    project_to_W4C,
    reduced_words,
    sigma,
    to_isometry,
    word_isometry,
)
from enriques_lattice.model import BASIS_ORDER, label

PERMS = list(itertools.permutations((1, 2, 3, 4)))


def random_element(rng: random.Random, max_len: int = 5) -> GroupElement:
    word = []
    for _ in range(rng.randint(0, max_len)):
        word.append(rng.choice([a for a in (1, 2, 3, 4) if not word or word[-1] != a]))
    return GroupElement(rng.choice(PERMS), tuple(word))


def test_parse_and_format():
    assert parse_perm("(1 2)(3 4)") == (2, 1, 4, 3)
    assert parse_perm("(1 2 3)") == (2, 3, 1, 4)
    assert parse_perm("id") == IDENTITY
    for p in PERMS:
        assert parse_perm(format_perm(p)) == p
    assert parse_word("s1 σ2 sigma3 4") == (1, 2, 3, 4)
    with pytest.raises(WordError):
        parse_word("s5")
    with pytest.raises(WordError):
        GroupElement(IDENTITY, (1, 1))


def test_involutions():
    for i in (1, 2, 3, 4):
        assert sigma(i) * sigma(i) == ONE
    assert normal_form("id", "s1 s2 s2 s1") == ONE


def test_conjugation_rule():
    for p in PERMS:
        pi = permutation(p)
        for i in (1, 2, 3, 4):
            assert pi * sigma(i) * inverse(pi) == sigma(p[i - 1])


def test_group_axioms_randomized():
    rng = random.Random(4)
    for _ in range(300):
        a, b, c = (random_element(rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * inverse(a) == ONE == inverse(a) * a
        assert a * ONE == a == ONE * a


def test_matrix_action_is_homomorphism(model):
    rng = random.Random(11)
    for _ in range(40):
        a, b = random_element(rng, 3), random_element(rng, 3)
        ma, mb, mab = to_isometry(a, model), to_isometry(b, model), to_isometry(a * b, model)
        assert is_isometry(ma, model)
        x = tuple(model.classes[lab] for lab in BASIS_ORDER)[rng.randrange(10)]
        assert apply(mab, x) == apply(ma, apply(mb, x))
        assert act(a, model, x) == apply(ma, x)


def test_sigma4_on_e4(model):
    c = model.classes
    want = tuple(2 * sum(v) for v in zip(*(c[label(s)] for s in ("E1", "E12", "E2", "E23", "E3", "E13"))))
    want = tuple(a - b for a, b in zip(want, c[label("E4")]))
    assert apply(to_isometry(sigma(4), model), c[label("E4")]) == want
    for i in (1, 2, 3, 4):
        for lab in BASIS_ORDER:
            if lab.family == "E_edge" or lab.indices != (i,):
                assert act(sigma(i), model, c[lab]) == c[lab]


def test_normal_form_counts():
    assert sum(1 for _ in reduced_words(3)) == 1 + 4 + 12 + 36
    assert sum(1 for _ in all_elements(2)) == 24 * 17


def test_faithfulness_small(model):
    n, distinct = faithfulness_check(model, 3)
    assert n == distinct == 24 * 53


def test_parity_and_projection(model):
    assert check_parity(model)
    assert project_to_W4C("rE12 rF34", model) == ONE
    assert project_to_W4C("rE1 s4 rE1", model) == sigma(4)
    rng = random.Random(5)
    gens = ["s1", "s2", "s3", "s4", "rE1", "rE12", "rF13", "rE34", "rF24"]
    for _ in range(200):
        u = [rng.choice(gens) for _ in range(rng.randint(0, 6))]
        v = [rng.choice(gens) for _ in range(rng.randint(0, 6))]
        assert project_to_W4C(u + v, model) == project_to_W4C(u, model) * project_to_W4C(v, model)


def test_word_isometry(model):
    m = word_isometry(["s1", "s1"], model)
    assert m == identity_matrix()
    assert is_isometry(word_isometry(["rE12", "s3", "rF14"], model), model)


def test_projection_needs_parity(model):
    from dataclasses import replace

    bad = [list(r) for r in model.gram20]
    bad[16][0] = bad[0][16] = 1
    broken = replace(model, gram20=tuple(map(tuple, bad)))
    assert not check_parity(broken)
    with pytest.raises(ParityError):
        project_to_W4C("s1", broken)
