"""The rank-10 lattice model: 10A, 6B and 4C root classes and the polarization H.

Basis order is fixed once and used for all I/O::

    E1, E2, E3, E4, E12, E13, E14, E23, E24, E34

The F classes are not transcribed from a picture.  Each ``F_ij`` is the
unique rational vector whose pairings with the ten basis curves are
``(E_k, F_ij) = 0`` and ``(E_kl, F_ij) = 2·[{k,l} = {i,j}]``; the mutual
products ``(F, F)`` are then computed, not assumed.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .lattice import (
    GramMatrix,
    LatticeError,
    Vector,
    basis_gram,
    determinant,
    inner_product,
    integral_basis,
    lattice_content,
    rank,
    smith_invariants,
    solve,
    to_fraction,
    unit,
    vadd,
    vscale,
    vsub,
    vsum,
)

INDICES = (1, 2, 3, 4)
PAIRS = tuple(itertools.combinations(INDICES, 2))

GOLDEN_MODEL = Path(__file__).with_name("data") / "model.json"


class ModelError(ValueError):
    """The model data violates one of its defining invariants."""


@dataclass(frozen=True, order=True)
class RootLabel:
    family: str
    indices: tuple[int, ...]

    FAMILIES = ("E_vertex", "E_edge", "F", "G")

    def __post_init__(self) -> None:
        if self.family not in self.FAMILIES:
            raise ValueError(f"unknown root family {self.family!r}")
        want = 2 if self.family in ("E_edge", "F") else 1
        if len(self.indices) != want or any(i not in INDICES for i in self.indices):
            raise ValueError(f"bad indices {self.indices} for family {self.family}")
        if want == 2 and not self.indices[0] < self.indices[1]:
            raise ValueError("pair indices must be canonical i < j")

    def __str__(self) -> str:
        letter = "E" if self.family.startswith("E") else self.family
        return letter + "".join(map(str, self.indices))

    @property
    def config(self) -> str:
        return {"E_vertex": "10A", "E_edge": "10A", "F": "6B", "G": "4C"}[self.family]

    def permuted(self, perm: Sequence[int]) -> "RootLabel":
        """Image under the index permutation ``i -> perm[i-1]``."""
        image = tuple(sorted(perm[i - 1] for i in self.indices))
        return RootLabel(self.family, image)

    @classmethod
    def parse(cls, text: "str | RootLabel") -> "RootLabel":
        if isinstance(text, RootLabel):
            return text
        m = re.fullmatch(r"\s*([EFG])_?\{?([1-4])([1-4])?\}?\s*", str(text))
        if not m:
            raise ValueError(f"unknown root label {text!r}")
        letter, i, j = m.groups()
        if j is None:
            if letter == "F":
                raise ValueError(f"unknown root label {text!r}")
            return cls("E_vertex" if letter == "E" else "G", (int(i),))
        if letter == "G":
            raise ValueError(f"unknown root label {text!r}")
        a, b = sorted((int(i), int(j)))
        if a == b:
            raise ValueError(f"unknown root label {text!r}")
        return cls("E_edge" if letter == "E" else "F", (a, b))


E_VERTEX = tuple(RootLabel("E_vertex", (i,)) for i in INDICES)
E_EDGE = tuple(RootLabel("E_edge", p) for p in PAIRS)
F_LABELS = tuple(RootLabel("F", p) for p in PAIRS)
G_LABELS = tuple(RootLabel("G", (i,)) for i in INDICES)
BASIS_ORDER = E_VERTEX + E_EDGE
CURVE_LABELS = BASIS_ORDER + F_LABELS
ALL_LABELS = CURVE_LABELS + G_LABELS
LABEL_INDEX = {lab: k for k, lab in enumerate(ALL_LABELS)}


def label(text: "str | RootLabel") -> RootLabel:
    return RootLabel.parse(text)


def _gram10_rows() -> list[list[int]]:
    rows = [[0] * 10 for _ in range(10)]
    for a in range(10):
        rows[a][a] = -2
    for p, (i, j) in enumerate(PAIRS):
        for k in (i, j):
            rows[k - 1][4 + p] = rows[4 + p][k - 1] = 1
    return rows


@dataclass(frozen=True)
class EnriquesModel:
    basis_order: tuple[RootLabel, ...]
    gram10: GramMatrix
    classes: Mapping[RootLabel, Vector]
    H: Vector
    gram20: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def vector(self, lab: "str | RootLabel") -> Vector:
        return class_vector(self, lab)

    def pair(self, a: "str | RootLabel", b: "str | RootLabel") -> Fraction:
        """Stored 20×20 product of two root classes."""
        return self.gram20[LABEL_INDEX[label(a)]][LABEL_INDEX[label(b)]]

    def dot(self, v: Sequence[Fraction], w: Sequence[Fraction]) -> Fraction:
        return inner_product(v, w, self.gram10)

    def degree(self, v: Sequence[Fraction]) -> Fraction:
        return self.dot(v, self.H)

    @cached_property
    def curve_basis(self) -> list[Vector]:
        """Integral basis of the lattice generated by the 16 curve classes."""
        return integral_basis([self.classes[lab] for lab in CURVE_LABELS])

    @cached_property
    def numerical_basis(self) -> list[Vector]:
        """Integral basis of the even unimodular overlattice of the curve lattice."""
        return unimodular_overlattice(self.curve_basis, self.gram10)

    def in_curve_lattice(self, v: Sequence[Fraction]) -> bool:
        return lattice_content(self.curve_basis, v) is not None

    def numerical_content(self, v: Sequence[Fraction]) -> int | None:
        return lattice_content(self.numerical_basis, v)


def _g_vector(i: int, e: Mapping[RootLabel, Vector]) -> Vector:
    """G_i: the 6-cycle of curves disjoint from E_i, minus E_i."""
    others = [k for k in INDICES if k != i]
    cycle = [e[RootLabel("E_vertex", (k,))] for k in others]
    cycle += [e[RootLabel("E_edge", p)] for p in itertools.combinations(others, 2)]
    return vsub(vsum(cycle, 10), e[RootLabel("E_vertex", (i,))])


def _assemble(gram10: GramMatrix, classes: dict[RootLabel, Vector], H: Vector,
              gram20=None) -> EnriquesModel:
    if gram20 is None:
        vecs = [classes[lab] for lab in ALL_LABELS]
        gram20 = tuple(tuple(inner_product(u, w, gram10) for w in vecs) for u in vecs)
    return EnriquesModel(BASIS_ORDER, gram10, classes, H, gram20)


def build_model(check: bool = True) -> EnriquesModel:
    gram10 = GramMatrix.of(_gram10_rows())
    classes: dict[RootLabel, Vector] = {lab: unit(10, k) for k, lab in enumerate(BASIS_ORDER)}
    for p, pair in enumerate(PAIRS):
        rhs = [0] * 10
        rhs[4 + p] = 2
        classes[RootLabel("F", pair)] = solve(gram10, rhs)
    for i in INDICES:
        classes[RootLabel("G", (i,))] = _g_vector(i, classes)
    H = vsum([classes[lab] for lab in BASIS_ORDER], 10)
    model = _assemble(gram10, classes, H)
    if check:
        check_model(model)
    return model


def check_model(m: EnriquesModel) -> None:
    """Raise :class:`ModelError` on the first violated invariant."""
    if determinant(m.gram10) != -64:
        raise ModelError(f"det(gram10) = {determinant(m.gram10)}, expected -64")
    for lab in ALL_LABELS:
        if m.dot(m.classes[lab], m.classes[lab]) != -2:
            raise ModelError(f"{lab} does not have norm -2")
    for a in range(20):
        for b in range(20):
            x = m.gram20[a][b]
            if x != m.dot(m.classes[ALL_LABELS[a]], m.classes[ALL_LABELS[b]]):
                raise ModelError(f"stored ({ALL_LABELS[a]}, {ALL_LABELS[b]}) = {x} disagrees with the classes")
            if a != b and x not in (0, 1, 2):
                raise ModelError(f"({ALL_LABELS[a]}, {ALL_LABELS[b]}) = {x} not in {{0,1,2}}")
    if m.H != vsum([m.classes[lab] for lab in BASIS_ORDER], 10):
        raise ModelError("H is not the sum of the ten 10A classes")
    if rank([list(m.classes[lab]) for lab in ALL_LABELS]) != 10:
        raise ModelError("classes do not span a rank-10 space")


def class_vector(m: EnriquesModel, lab: "str | RootLabel") -> Vector:
    try:
        return m.classes[label(lab)]
    except (KeyError, ValueError):
        raise KeyError(f"unknown label {lab!r}") from None


def permutation_matrix_action(m: EnriquesModel, perm: Sequence[int], v: Sequence[Fraction]) -> Vector:
    """Image of ``v`` under the index permutation acting on the 10A basis."""
    out = [Fraction(0)] * 10
    for k, lab in enumerate(BASIS_ORDER):
        out[LABEL_INDEX[lab.permuted(perm)]] += v[k]
    return tuple(out)


# -- tables -------------------------------------------------------------------

@dataclass(frozen=True)
class TableCheck:
    name: str
    passed: bool
    failures: tuple[tuple[str, str, Fraction, Fraction], ...] = ()

    def describe(self) -> str:
        if self.passed:
            return f"{self.name}: pass"
        a, b, got, want = self.failures[0]
        return f"{self.name}: FAIL ({a},{b}) = {got} != {want} ({len(self.failures)} offending pairs)"


@dataclass(frozen=True)
class TableReport:
    checks: tuple[TableCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _table(name: str, m: EnriquesModel, pairs: Iterable[tuple[RootLabel, RootLabel]], rule) -> TableCheck:
    bad = []
    for a, b in pairs:
        got, want = m.pair(a, b), Fraction(rule(a, b))
        if got != want:
            bad.append((str(a), str(b), got, want))
    return TableCheck(name, not bad, tuple(bad))


def _tetrahedron_edge(a: RootLabel, b: RootLabel) -> int:
    """(E_i, E_kl) = 1 iff i in {k, l}; other distinct 10A pairs are disjoint."""
    if a.family == b.family:
        return 0
    return int(set(a.indices) < set(b.indices) or set(b.indices) < set(a.indices))


def verify_tables(m: EnriquesModel) -> TableReport:
    prod = itertools.product
    checks = [
        _table("norms", m, ((x, x) for x in ALL_LABELS), lambda a, b: -2),
        _table("(E_k,F_ij)", m, prod(E_VERTEX, F_LABELS), lambda a, b: 0),
        _table("(E_kl,F_ij)", m, prod(E_EDGE, F_LABELS),
               lambda a, b: 2 if a.indices == b.indices else 0),
        _table("(G_i,E_j)", m, prod(G_LABELS, E_VERTEX),
               lambda a, b: 2 if a.indices == b.indices else 0),
        _table("(G_i,E_kl)", m, prod(G_LABELS, E_EDGE), lambda a, b: 0),
        _table("(G_i,F_kl)", m, prod(G_LABELS, F_LABELS),
               lambda a, b: 0 if a.indices[0] in b.indices else 2),
        _table("(G_i,G_j)", m, ((a, b) for a, b in prod(G_LABELS, G_LABELS) if a != b), lambda a, b: 2),
        _table("10A adjacency", m, ((a, b) for a, b in prod(BASIS_ORDER, BASIS_ORDER) if a != b),
               _tetrahedron_edge),
        _table("gram20 consistency", m,
               prod(ALL_LABELS, ALL_LABELS), lambda a, b: m.dot(m.classes[a], m.classes[b])),
    ]
    return TableReport(tuple(checks))


def figure_6b_crosscheck(m: EnriquesModel) -> list[tuple[str, str, Fraction]]:
    """Derived (F, F) products that differ from the 6B picture as read.

    The picture shows single edges between index-sharing pairs and doubled
    edges between complementary pairs.  An empty list means agreement.
    """
    out = []
    for a, b in itertools.combinations(F_LABELS, 2):
        expected = 1 if set(a.indices) & set(b.indices) else 2
        got = m.pair(a, b)
        if got != expected:
            out.append((str(a), str(b), got))
    return out


# -- derived lattices ----------------------------------------------------------

def lattice_discriminant(m: EnriquesModel, labels: Iterable["str | RootLabel"] = CURVE_LABELS) -> Fraction:
    basis = integral_basis([class_vector(m, lab) for lab in labels])
    return determinant(basis_gram(basis, m.gram10))


def curve_lattice_invariants(m: EnriquesModel,
                             labels: Iterable["str | RootLabel"] = CURVE_LABELS) -> list[int]:
    """Smith invariants of the Gram matrix of the lattice generated by ``labels``."""
    basis = integral_basis([class_vector(m, lab) for lab in labels])
    return smith_invariants(basis_gram(basis, m.gram10))


def unimodular_overlattice(basis: Sequence[Vector], g: GramMatrix) -> list[Vector]:
    """Even unimodular overlattice reached by adjoining order-2 glue vectors.

    Requires the discriminant group to be 2-elementary with a unique even
    isotropic glue at each step; anything else raises.
    """
    basis = list(basis)
    while True:
        gram = basis_gram(basis, g)
        disc = abs(determinant(gram))
        if disc == 1:
            return basis
        glue = []
        n = len(basis)
        for eps in itertools.product((0, 1), repeat=n):
            if not any(eps):
                continue
            v = vscale(Fraction(1, 2), vsum((b for b, e in zip(basis, eps) if e), len(basis[0])))
            if all(inner_product(v, b, g).denominator == 1 for b in basis):
                q = inner_product(v, v, g)
                if q.denominator == 1 and q % 2 == 0:
                    glue.append(v)
        if len(glue) != 1:
            raise LatticeError(f"expected one even glue vector, found {len(glue)} (disc {disc})")
        basis = integral_basis(basis + glue)


# -- serialization -----------------------------------------------------------

def _frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def model_to_dict(m: EnriquesModel) -> dict:
    return {
        "basis_order": [str(lab) for lab in m.basis_order],
        "labels": [str(lab) for lab in ALL_LABELS],
        "gram10": [[_frac_str(x) for x in row] for row in m.gram10.entries],
        "classes": {str(lab): [_frac_str(x) for x in m.classes[lab]] for lab in ALL_LABELS},
        "H": [_frac_str(x) for x in m.H],
        "gram20": [[int(x) if x.denominator == 1 else _frac_str(x) for x in row] for row in m.gram20],
    }


def model_to_json(m: EnriquesModel) -> str:
    """Pretty JSON with one matrix row or class vector per line."""
    d = model_to_dict(m)
    one = json.dumps
    lines = ["{",
             f' "basis_order": {one(d["basis_order"])},',
             f' "labels": {one(d["labels"])},',
             ' "gram10": [\n' + ",\n".join(f"  {one(r)}" for r in d["gram10"]) + "\n ],",
             ' "classes": {\n' + ",\n".join(f"  {one(k)}: {one(v)}" for k, v in d["classes"].items()) + "\n },",
             f' "H": {one(d["H"])},',
             ' "gram20": [\n' + ",\n".join(f"  {one(r)}" for r in d["gram20"]) + "\n ]",
             "}"]
    text = "\n".join(lines) + "\n"
    assert json.loads(text) == d
    return text


def model_from_dict(data: dict, check: bool = False) -> EnriquesModel:
    """Load a serialized model as-is; the stored gram20 is kept, not recomputed."""
    if [str(x) for x in data["basis_order"]] != [str(lab) for lab in BASIS_ORDER]:
        raise ModelError("basis order differs from E1..E4, E12..E34")
    gram10 = GramMatrix.of(data["gram10"])
    classes = {label(k): tuple(to_fraction(x) for x in v) for k, v in data["classes"].items()}
    if set(classes) != set(ALL_LABELS):
        raise ModelError("model must define exactly the 20 root classes")
    H = tuple(to_fraction(x) for x in data["H"])
    gram20 = tuple(tuple(to_fraction(x) for x in row) for row in data["gram20"])
    if len(gram20) != 20 or any(len(r) != 20 for r in gram20):
        raise ModelError("gram20 must be 20×20")
    m = _assemble(gram10, classes, H, gram20)
    if check:
        check_model(m)
    return m


def load_model(path: "str | Path | None" = None, check: bool = False) -> EnriquesModel:
    path = GOLDEN_MODEL if path is None else Path(path)
    return model_from_dict(json.loads(Path(path).read_text()), check=check)


def vector_from_labels(m: EnriquesModel, terms: Mapping["str | RootLabel", int]) -> Vector:
    v = tuple(Fraction(0) for _ in range(10))
    for lab, c in terms.items():
        v = vadd(v, vscale(c, class_vector(m, lab)))
    return v


__all__ = [
    "ALL_LABELS", "BASIS_ORDER", "CURVE_LABELS", "E_EDGE", "E_VERTEX", "F_LABELS", "G_LABELS",
    "EnriquesModel", "ModelError", "RootLabel", "TableCheck", "TableReport", "build_model",
    "check_model", "class_vector", "curve_lattice_invariants", "lattice_discriminant", "label",
    "load_model", "model_from_dict", "model_to_json", "unimodular_overlattice", "verify_tables",
]
