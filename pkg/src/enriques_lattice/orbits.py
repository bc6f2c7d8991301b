"""Orbits of (-2)-classes and isotropic classes under the free product F = <σ1..σ4>.

Every class handled here lies in the even unimodular lattice ``NS`` spanned
by the 16 curves and the glue ``(E1+E2+E3+E4)/2``; twice such a class has
integer coordinates in the 10A basis.  The hot loops run on those doubled
integer tuples, and the public functions convert to and from exact
:class:`~fractions.Fraction` vectors.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coxeter import AffineType, ParabolicSubdiagram, build_diagram, enumerate_max_parabolics
from .lattice import Vector, basis_gram, enumerate_slice, kernel_basis, vsum
from .model import (
    ALL_LABELS,
    CURVE_LABELS,
    E_EDGE,
    E_VERTEX,
    F_LABELS,
    G_LABELS,
    EnriquesModel,
    RootLabel,
    label,
)

IN_FUNDAMENTAL_DOMAIN = "InFundamentalDomain"
DEGREE_NEGATIVE = "DegreeNegative"

NEGATIVE_DEGREE = "NegativeDegree"
REDUCED_NOT_A_CURVE = "ReducedNotACurve"

PENCIL_TABLE_ORDER = ("E7~+A1~", "E6~+A2~", "D6~+A1~+A1~", "A7~+A1~", "A5~+A2~+A1~")

# published pencil table: (type, singular fibres with multiplicity marks, Mordell-Weil rank, count)
PENCIL_TABLE = (
    (1, "E7~+A1~", 0, 12),
    (2, "E6~+A2~", 0, 4),
    (3, "D6~+A1~", 1, 6),
    (4, "A7~+A1~", 0, 3),
    (5, "2A5~+A2~+A1~", 0, 4),
)

Scaled = tuple[int, ...]


class OrbitError(ValueError):
    """Input outside the domain of an orbit operation."""


def _ivec(x: Sequence[Fraction]) -> Scaled:
    out = []
    for c in x:
        d = 2 * c
        if d.denominator != 1:
            raise OrbitError("class is not in the numerical lattice (2x not integral)")
        out.append(int(d))
    return tuple(out)


def _fvec(x: Scaled) -> Vector:
    return tuple(Fraction(c, 2) for c in x)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


class _Engine:
    """Doubled-integer data for one model."""

    def __init__(self, m: EnriquesModel):
        g = m.gram10.int_rows()
        self.model = m

        def row(v: Vector) -> list[int]:
            x = _ivec(v)
            return [sum(g[i][j] * x[j] for j in range(10)) for i in range(10)]

        # (x, r) = X · row(r) / 4  with X = 2x
        self.root = {lab: _ivec(m.classes[lab]) for lab in ALL_LABELS}
        self.root_row = {lab: row(m.classes[lab]) for lab in ALL_LABELS}
        self.g_vec = [self.root[lab] for lab in G_LABELS]
        self.g_row = [self.root_row[lab] for lab in G_LABELS]
        self.h_row = row(m.H)
        self.curve_rows = [(lab, self.root_row[lab]) for lab in CURVE_LABELS]
        self.edge_rows = [self.root_row[lab] for lab in E_EDGE]
        self.ns_rows = [row(b) for b in m.numerical_basis]
        self.curve_of = {self.root[lab]: lab for lab in CURVE_LABELS}
        self.roots = [self.root[lab] for lab in ALL_LABELS]
        self.rows = [self.root_row[lab] for lab in ALL_LABELS]
        self.g20 = [[int(c) for c in r] for r in m.gram20]
        self.g_index = [ALL_LABELS.index(lab) for lab in G_LABELS]
        self.curve_index = [ALL_LABELS.index(lab) for lab in CURVE_LABELS]
        # (rho, r) > 0 for all 20 roots, so chamber reduction strictly lowers (x, rho)
        rho = tuple(4 * h for h in _ivec(m.H))
        for lab in E_EDGE:
            rho = tuple(a - b for a, b in zip(rho, self.root[lab]))
        if any(self.pair(rho, r) <= 0 for r in self.rows):
            raise AssertionError("rho is not interior to the 20-root chamber")
        self.g = g

    def pair(self, x: Scaled, row: Sequence[int]) -> int:
        s = _dot(x, row)
        if s % 4:
            raise OrbitError("pairing is not integral; class outside the numerical lattice")
        return s // 4

    def pairings(self, x: Scaled) -> list[int]:
        return [self.pair(x, r) for r in self.rows]

    def batch_pairings(self, xs: Sequence[Scaled], rows: Sequence[Sequence[int]] | None = None
                       ) -> list[list[int]]:
        """Pairings with the 20 roots (or given rows) for many classes at once."""
        if not xs:
            return []
        raw = np.asarray(xs, dtype=np.int64) @ np.asarray(rows or self.rows, dtype=np.int64).T
        if (raw % 4).any():
            raise OrbitError("pairing is not integral; class outside the numerical lattice")
        return (raw // 4).tolist()

    def norm(self, x: Scaled) -> int:
        s = sum(x[i] * self.g[i][j] * x[j] for i in range(10) for j in range(10) if x[i] and x[j])
        if s % 4:
            raise OrbitError("norm is not integral")
        return s // 4

    def degree(self, x: Scaled) -> int:
        return self.pair(x, self.h_row)

    def content(self, x: Scaled) -> int:
        """Divisibility in the unimodular lattice: gcd of pairings with a basis."""
        return math.gcd(*(self.pair(x, r) for r in self.ns_rows))

    def sigma(self, x: Scaled, i: int) -> Scaled:
        c = self.pair(x, self.g_row[i - 1])
        return tuple(a + c * b for a, b in zip(x, self.g_vec[i - 1]))

    def _reflect(self, x: list[int], p: list[int], k: int) -> None:
        """x += (x, r_k) r_k in place, keeping the pairing list p in step."""
        c = p[k]
        for j, b in enumerate(self.roots[k]):
            if b:
                x[j] += c * b
        for j, b in enumerate(self.g20[k]):
            if b:
                p[j] += c * b

    def sigma_reduce(self, x: Scaled, p: list[int] | None = None
                     ) -> tuple[Scaled, list[int], str, list[int]]:
        """Returns the representative, letters applied, verdict and final root pairings."""
        applied: list[int] = []
        xs = list(x)
        p = self.pairings(x) if p is None else list(p)
        deg = self.degree(x)
        while True:
            neg = next((i for i, k in enumerate(self.g_index, 1) if p[k] < 0), None)
            if neg is None:
                return tuple(xs), applied, IN_FUNDAMENTAL_DOMAIN, p
            deg += 2 * p[self.g_index[neg - 1]]
            self._reflect(xs, p, self.g_index[neg - 1])
            applied.append(neg)
            if deg < 0:
                return tuple(xs), applied, DEGREE_NEGATIVE, p

    def first_negative_curve(self, x: Scaled) -> tuple[RootLabel, int] | None:
        for lab, row in self.curve_rows:
            c = self.pair(x, row)
            if c < 0:
                return lab, c
        return None

    def chamber_reduce(self, x: Scaled, p: list[int] | None = None) -> tuple[Scaled, list[RootLabel]]:
        """Reflect in the first of the 20 roots pairing negatively until none does."""
        used: list[RootLabel] = []
        xs = list(x)
        p = self.pairings(x) if p is None else list(p)
        while True:
            k = next((k for k, c in enumerate(p) if c < 0), None)
            if k is None:
                return tuple(xs), used
            self._reflect(xs, p, k)
            used.append(ALL_LABELS[k])

    def sextuple(self, x: Scaled) -> tuple[int, ...]:
        return tuple(self.pair(x, r) for r in self.edge_rows)


_ENGINES: dict[int, tuple[EnriquesModel, _Engine]] = {}


def _engine(m: EnriquesModel) -> _Engine:
    hit = _ENGINES.get(id(m))
    if hit is None or hit[0] is not m:
        hit = (m, _Engine(m))
        _ENGINES[id(m)] = hit
    return hit[1]


def _in_ns(e: _Engine, x: Sequence[Fraction]) -> Scaled:
    xs = _ivec(x)
    for r in e.ns_rows:
        e.pair(xs, r)
    return xs


# -- reduction ----------------------------------------------------------------

@dataclass(frozen=True)
class ReductionResult:
    """``word`` lists σ-letters in the order they must be applied to the
    representative to get back the input."""

    representative: Vector
    word: tuple[int, ...]
    steps: int
    verdict: str

    def to_json(self, x: Sequence[Fraction] | None = None) -> dict:
        out = {"representative": [_frac(c) for c in self.representative],
               "word": [f"s{a}" for a in self.word], "verdict": self.verdict}
        if x is not None:
            out = {"input": [_frac(c) for c in x], **out}
        return out


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def sigma_reduce(x: Sequence[Fraction], m: EnriquesModel) -> ReductionResult:
    """Lower the degree (x, H) by σ_i while some (x, G_i) < 0, smallest i first.

    Each step lowers the degree by ``2·|(x, G_i)|`` since (G_i, H) = 2.
    Degree-0 inputs are allowed (the E_ij have degree 0); negative ones are not.
    """
    e = _engine(m)
    xs = _in_ns(e, x)
    if e.degree(xs) < 0:
        raise OrbitError("input has negative degree (x, H) < 0")
    rep, applied, verdict, _ = e.sigma_reduce(xs)
    return ReductionResult(_fvec(rep), tuple(reversed(applied)), len(applied), verdict)


def apply_word(m: EnriquesModel, word: Sequence[int], x: Sequence[Fraction]) -> Vector:
    """Apply σ-letters to ``x`` in list order (first letter first)."""
    e = _engine(m)
    xs = _ivec(x)
    for a in word:
        xs = e.sigma(xs, a)
    return _fvec(xs)


def sextuple(x: Sequence[Fraction], m: EnriquesModel) -> tuple[int, ...]:
    """((x, E_ij))_{i<j}: constant on F-orbits because (E_ij, G_k) = 0."""
    e = _engine(m)
    return e.sextuple(_ivec(x))


@dataclass(frozen=True)
class CurveClassification:
    curve: RootLabel | None
    reason: str | None
    reduction: ReductionResult | None
    sextuple: tuple[int, ...]

    @property
    def is_curve(self) -> bool:
        return self.curve is not None

    def to_json(self) -> dict:
        out = {"verdict": "Curve" if self.curve else "NotInCurveOrbit",
               "curve": str(self.curve) if self.curve else None,
               "reason": self.reason, "sextuple": list(self.sextuple)}
        if self.reduction is not None:
            out["word"] = [f"s{a}" for a in self.reduction.word]
            out["reduction"] = self.reduction.to_json()
        return out


def classify_curve_class(x: Sequence[Fraction], m: EnriquesModel) -> CurveClassification:
    e = _engine(m)
    xs = _in_ns(e, x)
    if e.norm(xs) != -2:
        raise OrbitError(f"class has norm {e.norm(xs)}, expected -2")
    six = e.sextuple(xs)
    if e.degree(xs) < 0:
        return CurveClassification(None, NEGATIVE_DEGREE, None, six)
    rep, applied, verdict, _ = e.sigma_reduce(xs)
    red = ReductionResult(_fvec(rep), tuple(reversed(applied)), len(applied), verdict)
    lab = e.curve_of.get(rep) if verdict == IN_FUNDAMENTAL_DOMAIN else None
    if lab is None:
        return CurveClassification(None, REDUCED_NOT_A_CURVE, red, six)
    if e.sextuple(e.root[lab]) != six:
        raise AssertionError(f"sextuple invariant broken for {lab}")
    return CurveClassification(lab, None, red, six)


# -- pencils --------------------------------------------------------------------

NO_FIBER = "no_fiber"
MULTIPLE = "multiple"
SIMPLE = "simple"


@dataclass(frozen=True)
class FiberComponent:
    vertices: tuple[RootLabel, ...]
    type: AffineType
    null_vector: Vector
    null_multiple: int
    kind: str

    @property
    def is_multiple(self) -> bool:
        return self.kind == MULTIPLE


@dataclass(frozen=True)
class PencilType:
    """One of the maximal parabolic diagrams read as an elliptic pencil.

    ``f`` is the primitive isotropic class of the ray in the unimodular
    lattice; the fibre class is ``2f``.  A component whose null vector equals
    ``f`` and which consists of curves is a multiple fibre.  A component
    pairing a curve E with a centre G gives the simple fibre E + σ(E) ~ 2(E+G);
    a component of centres only gives no fibre and counts toward the
    Mordell-Weil rank.
    """

    index: int
    diagram: ParabolicSubdiagram
    f: Vector
    components: tuple[FiberComponent, ...]
    type_index: int
    f_in_curve_lattice: bool

    @property
    def mordell_weil_rank(self) -> int:
        return sum(1 for c in self.components if c.kind == NO_FIBER)

    @property
    def fibers(self) -> tuple[tuple[AffineType, bool], ...]:
        return tuple((c.type, c.is_multiple) for c in self.components if c.kind != NO_FIBER)

    def fiber_string(self, pretty: bool = False) -> str:
        parts = []
        for t, mult in self.fibers:
            s = t.pretty() if pretty else str(t)
            parts.append(("2" if mult else "") + s)
        return "+".join(parts)

    def fiber_types_string(self) -> str:
        return "+".join(str(t) for t, _ in self.fibers)


def _type_index(p: ParabolicSubdiagram) -> int:
    return PENCIL_TABLE_ORDER.index(p.type_string) + 1 if p.type_string in PENCIL_TABLE_ORDER else 0


def _null_vector(m: EnriquesModel, verts: Sequence[RootLabel]) -> Vector:
    idx = [ALL_LABELS.index(v) for v in verts]
    from .lattice import GramMatrix

    gram = GramMatrix(tuple(tuple(m.gram20[a][b] for b in idx) for a in idx))
    (k,) = kernel_basis(gram)
    return vsum((tuple(c * x for x in m.classes[v]) for c, v in zip(k, verts)), 10)


_PENCILS: dict[int, tuple[EnriquesModel, tuple[PencilType, ...]]] = {}


def pencil_types(m: EnriquesModel) -> tuple[PencilType, ...]:
    """The pencils attached to the maximal parabolic diagrams, canonical order."""
    hit = _PENCILS.get(id(m))
    if hit is not None and hit[0] is m:
        return hit[1]
    e = _engine(m)
    out = []
    census = sorted(enumerate_max_parabolics(build_diagram(m)),
                    key=lambda p: (_type_index(p), [ALL_LABELS.index(v) for v in p.vertices]))
    for k, p in enumerate(census):
        nulls = [_ivec(_null_vector(m, verts)) for verts, _ in p.components]
        base = nulls[0]
        f = tuple(c // e.content(base) for c in base)
        if any(c % e.content(base) for c in base):
            raise AssertionError("content does not divide the null vector")
        comps = []
        for (verts, t), nv in zip(p.components, nulls):
            mult = next((q for q in (1, 2, 3, 4) if tuple(q * c for c in f) == nv), None)
            if mult not in (1, 2):
                raise AssertionError(f"null vector of {t} is not f or 2f in diagram {p.type_string}")
            centres = sum(1 for v in verts if v.family == "G")
            if centres == len(verts):
                kind = NO_FIBER
            elif centres:
                if mult != 1:
                    raise AssertionError("curve+centre component should have null vector f")
                kind = SIMPLE
            else:
                kind = MULTIPLE if mult == 1 else SIMPLE
            comps.append(FiberComponent(tuple(verts), t, _fvec(nv), mult, kind))
        out.append(PencilType(k, p, _fvec(f), tuple(comps), _type_index(p), m.in_curve_lattice(_fvec(f))))
    result = tuple(out)
    _PENCILS[id(m)] = (m, result)
    return result


@dataclass(frozen=True)
class PencilReport:
    pencil: PencilType
    reduction: ReductionResult
    input_multiple: int

    @property
    def type_index(self) -> int:
        return self.pencil.type_index

    @property
    def mordell_weil_rank(self) -> int:
        return self.pencil.mordell_weil_rank

    def to_json(self) -> dict:
        p = self.pencil
        return {
            "type_index": p.type_index,
            "diagram": p.diagram.type_string,
            "diagram_vertices": [str(v) for v in p.diagram.vertices],
            "fibers": [{"type": str(t), "multiple": mult} for t, mult in p.fibers],
            "mw_rank": p.mordell_weil_rank,
            "ray": [_frac(c) for c in p.f],
            "input_is": "f" if self.input_multiple == 1 else "2f",
            "reduction": self.reduction.to_json(),
        }


@dataclass(frozen=True)
class NotNefReduced:
    witness: RootLabel
    pairing: int
    reduction: ReductionResult

    def to_json(self) -> dict:
        return {"verdict": "NotNefReduced", "witness": str(self.witness), "pairing": self.pairing,
                "reduction": self.reduction.to_json()}


def _ray_table(m: EnriquesModel) -> dict[Scaled, PencilType]:
    return {_ivec(p.f): p for p in pencil_types(m)}


def classify_pencil(x: Sequence[Fraction], m: EnriquesModel) -> PencilReport | NotNefReduced:
    """σ-reduce an isotropic class and match its ray against the census.

    ``x`` must be f or 2f for a primitive isotropic f of positive degree.
    """
    e = _engine(m)
    xs = _in_ns(e, x)
    if e.norm(xs) != 0:
        raise OrbitError("class is not isotropic")
    k = e.content(xs)
    if k not in (1, 2):
        raise OrbitError(f"class is {k} times a lattice vector; expected f or 2f")
    if e.degree(xs) <= 0:
        raise OrbitError("isotropic class must have positive degree")
    rep, applied, verdict, _ = e.sigma_reduce(xs)
    red = ReductionResult(_fvec(rep), tuple(reversed(applied)), len(applied), verdict)
    neg = e.first_negative_curve(rep)
    if neg is not None:
        return NotNefReduced(neg[0], neg[1], red)
    f = tuple(c // k for c in rep)
    hit = _ray_table(m).get(f)
    if hit is None:
        raise AssertionError(f"nef isotropic class {_fvec(f)} is not on any census ray")
    return PencilReport(hit, red, k)


# -- enumeration --------------------------------------------------------------

@dataclass(frozen=True)
class _SliceLattice:
    basis2: tuple[Scaled, ...]
    gram: tuple[tuple[int, ...], ...]
    degree_row: tuple[int, ...]


def _slice_lattice(m: EnriquesModel, which: str) -> _SliceLattice:
    if which == "curve":
        basis = m.curve_basis
    elif which == "numerical":
        basis = m.numerical_basis
    else:
        raise OrbitError(f"unknown lattice {which!r}")
    gram = basis_gram(basis, m.gram10).int_rows()
    row = tuple(int(m.degree(b)) for b in basis)
    return _SliceLattice(tuple(_ivec(b) for b in basis), tuple(map(tuple, gram)), row)


def _enumerate_scaled(m: EnriquesModel, norm: int, max_degree: int, primitive: bool = False,
                      lattice: str = "curve", min_degree: int = 1, threads: int = 1) -> list[Scaled]:
    if norm not in (-2, 0):
        raise OrbitError("only norms -2 and 0 are supported")
    if max_degree < 1 and min_degree >= 1:
        raise OrbitError("max_degree must be positive")
    sl = _slice_lattice(m, lattice)

    def one(deg: int) -> list[Scaled]:
        out = []
        for c in enumerate_slice(sl.gram, sl.degree_row, deg, norm):
            if primitive and math.gcd(*c) != 1:
                continue
            out.append(tuple(sum(ci * b[j] for ci, b in zip(c, sl.basis2)) for j in range(10)))
        out.sort()
        return out

    degrees = list(range(min_degree, max_degree + 1))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            chunks = list(pool.map(one, degrees))
    else:
        chunks = [one(d) for d in degrees]
    return [v for chunk in chunks for v in chunk]


def enumerate_vectors(m: EnriquesModel, norm: int, max_degree: int, primitive: bool = False,
                      lattice: str = "curve", min_degree: int = 1, threads: int = 1) -> list[Vector]:
    """All lattice vectors with ``x² = norm`` and ``min_degree <= (x, H) <= max_degree``.

    The slice is finite since H² = 4 > 0 makes H^⊥ negative definite.  Output
    is ordered by degree, then by doubled coordinates.  ``lattice`` selects the
    curve lattice (default) or its unimodular overlattice.
    """
    return [_fvec(v) for v in _enumerate_scaled(m, norm, max_degree, primitive, lattice,
                                                min_degree, threads)]


@dataclass
class CurveCensus:
    total: int = 0
    by_curve: dict[str, int] = field(default_factory=dict)
    not_curve: int = 0
    negative_degree: int = 0
    sextuple_mismatches: int = 0


def curve_census(m: EnriquesModel, max_degree: int, lattice: str = "curve") -> CurveCensus:
    """Classify every (-2)-vector of degree 1..max_degree."""
    e = _engine(m)
    out = CurveCensus()
    vecs = _enumerate_scaled(m, -2, max_degree, lattice=lattice)
    for xs, p in zip(vecs, e.batch_pairings(vecs)):
        out.total += 1
        rep, _, verdict, _ = e.sigma_reduce(xs, p)
        lab = e.curve_of.get(rep) if verdict == IN_FUNDAMENTAL_DOMAIN else None
        if lab is None:
            out.not_curve += 1
            continue
        key = str(lab)
        out.by_curve[key] = out.by_curve.get(key, 0) + 1
        if e.sextuple(xs) != e.sextuple(e.root[lab]):
            out.sextuple_mismatches += 1
    return out


@dataclass
class PencilCensus:
    total: int = 0
    nef_after_sigma: dict[int, int] = field(default_factory=dict)
    not_nef: int = 0
    chamber_hits: dict[int, int] = field(default_factory=dict)
    off_census: list[Vector] = field(default_factory=list)


def pencil_census(m: EnriquesModel, max_degree: int, lattice: str = "curve",
                  chamber: bool = True) -> PencilCensus:
    """Classify primitive isotropic vectors of degree 1..max_degree.

    σ-reduction either lands on a census ray or exposes a negative curve.  With
    ``chamber`` the vector is also reflected by all 20 roots into the polyhedron,
    where it must sit on one of the census rays.
    """
    e = _engine(m)
    rays = {_ivec(p.f): p.index for p in pencil_types(m)}
    out = PencilCensus()
    vecs = _enumerate_scaled(m, 0, max_degree, primitive=True, lattice=lattice)
    for xs, p, nsp in zip(vecs, e.batch_pairings(vecs), e.batch_pairings(vecs, e.ns_rows)):
        out.total += 1
        k = math.gcd(*nsp)
        rep, _, _, q = e.sigma_reduce(xs, p)
        if any(q[i] < 0 for i in e.curve_index):
            out.not_nef += 1
        else:
            f = tuple(c // k for c in rep)
            if f in rays:
                out.nef_after_sigma[rays[f]] = out.nef_after_sigma.get(rays[f], 0) + 1
            else:
                out.off_census.append(_fvec(xs))
        if chamber:
            cham, _ = e.chamber_reduce(xs, p)
            f = tuple(c // k for c in cham)
            if f in rays:
                out.chamber_hits[rays[f]] = out.chamber_hits.get(rays[f], 0) + 1
            else:
                out.off_census.append(_fvec(xs))
    return out


# -- bounded curve graph ----------------------------------------------------------

@dataclass(frozen=True)
class CurveGraph:
    vectors: tuple[Vector, ...]
    origins: tuple[tuple[RootLabel, tuple[int, ...]], ...]
    weights: tuple[tuple[int, ...], ...]
    max_word_len: int

    def __len__(self) -> int:
        return len(self.vectors)

    def index_of(self, v: Sequence[Fraction]) -> int:
        return self.vectors.index(tuple(v))

    def neighbours(self, a: int, weight: int | None = 1) -> list[int]:
        row = self.weights[a]
        return [b for b, w in enumerate(row) if b != a and w and (weight is None or w == weight)]


def orbit_ball(m: EnriquesModel, seeds: Iterable["str | RootLabel"] = CURVE_LABELS,
               max_word_len: int = 1) -> CurveGraph:
    """Images of the seed curves under all reduced σ-words of bounded length."""
    if max_word_len < 0:
        raise OrbitError("max_word_len must be >= 0")
    e = _engine(m)
    seen: dict[Scaled, tuple[RootLabel, tuple[int, ...]]] = {}
    layer = []
    for s in seeds:
        lab = label(s)
        xs = e.root[lab]
        if xs not in seen:
            seen[xs] = (lab, ())
        layer.append((xs, lab, ()))
    for _ in range(max_word_len):
        nxt = []
        for xs, lab, word in layer:
            for i in range(1, 5):
                if word and word[0] == i:
                    continue
                ys = e.sigma(xs, i)
                w = (i,) + word
                nxt.append((ys, lab, w))
                if ys not in seen:
                    seen[ys] = (lab, w)
        layer = nxt
    vecs = list(seen)
    for xs in vecs:
        if e.norm(xs) != -2 or e.degree(xs) < 0:
            raise AssertionError("ball vertex is not an effective-looking (-2)-class")
    rows = [[e.pair(a, [sum(e.g[i][j] * b[j] for j in range(10)) for i in range(10)]) for b in vecs]
            for a in vecs]
    return CurveGraph(tuple(_fvec(v) for v in vecs), tuple(seen[v] for v in vecs),
                      tuple(tuple(r) for r in rows), max_word_len)


def _zero_to(g: CurveGraph, b: int, others: Iterable[int]) -> bool:
    return all(g.weights[b][o] == 0 for o in others)


def find_triangle(g: CurveGraph, v: int) -> tuple[int, ...] | None:
    """Induced I3 (three curves pairwise meeting once) through ``v``."""
    nb = g.neighbours(v)
    for i, a in enumerate(nb):
        for b in nb[i + 1:]:
            if g.weights[a][b] == 1:
                return (v, a, b)
    return None


def find_cycle(g: CurveGraph, v: int, length: int) -> tuple[int, ...] | None:
    """Induced cycle of simple edges of the given length through ``v``."""
    path = [v]

    def grow() -> tuple[int, ...] | None:
        last = path[-1]
        if len(path) == length:
            if g.weights[last][v] == 1:
                return tuple(path)
            return None
        for b in g.neighbours(last):
            if b in path:
                continue
            # b may touch only its predecessor, plus v when it closes the cycle
            others = path[1:-1] if len(path) == length - 1 else path[:-1]
            if not _zero_to(g, b, others):
                continue
            path.append(b)
            found = grow()
            if found:
                return found
            path.pop()
        return None

    return grow()


def find_e6_end(g: CurveGraph, v: int) -> tuple[int, ...] | None:
    """Induced IV* (E6~) subgraph with ``v`` as an end vertex.

    Returned order: v, a, centre, b1, b1', b2, b2'.
    """
    for a in g.neighbours(v):
        for c in g.neighbours(a):
            if c == v or not _zero_to(g, c, [v]):
                continue
            arms = [b for b in g.neighbours(c) if b not in (a, v) and _zero_to(g, b, [v, a])]
            for i, b1 in enumerate(arms):
                for b2 in arms[i + 1:]:
                    if g.weights[b1][b2]:
                        continue
                    core = [v, a, c, b1, b2]
                    for t1 in g.neighbours(b1):
                        if t1 in core or not _zero_to(g, t1, [v, a, c, b2]):
                            continue
                        for t2 in g.neighbours(b2):
                            if t2 in core or t2 == t1 or not _zero_to(g, t2, [v, a, c, b1, t1]):
                                continue
                            return (v, a, c, b1, t1, b2, t2)
    return None


@dataclass(frozen=True)
class CharacterizationEntry:
    curve: RootLabel
    property: str
    expected: bool
    witness: tuple[Vector, ...] | None

    @property
    def passed(self) -> bool:
        return (self.witness is not None) == self.expected


@dataclass(frozen=True)
class CharacterizationReport:
    entries: tuple[CharacterizationEntry, ...]
    ball_size: int
    max_word_len: int

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


def verify_orbit_characterizations(ball: CurveGraph) -> CharacterizationReport:
    """Existence of I3 / I8 / IV*-end witnesses on the 16 representatives, and
    absence of IV*-end witnesses for the E_ij inside the ball (bounded evidence only)."""
    entries = []

    def wit(idx):
        return None if idx is None else tuple(ball.vectors[i] for i in idx)

    seeds = {lab: i for i, (lab, word) in enumerate(ball.origins) if not word}
    for lab in CURVE_LABELS:
        if lab not in seeds:
            continue
        v = seeds[lab]
        if lab in F_LABELS:
            entries.append(CharacterizationEntry(lab, "I3", True, wit(find_triangle(ball, v))))
        else:
            entries.append(CharacterizationEntry(lab, "I8", True, wit(find_cycle(ball, v, 8))))
        if lab in E_VERTEX:
            entries.append(CharacterizationEntry(lab, "IV*-end", True, wit(find_e6_end(ball, v))))
        elif lab in E_EDGE:
            entries.append(CharacterizationEntry(lab, "IV*-end", False, wit(find_e6_end(ball, v))))
    return CharacterizationReport(tuple(entries), len(ball), ball.max_word_len)


def pencil_table_rows(m: EnriquesModel) -> list[dict]:
    """Per-type summary of the pencil census, in the table's row order."""
    rows = {}
    for p in pencil_types(m):
        r = rows.setdefault(p.type_index, {"type": p.type_index, "diagram": p.diagram.type_string,
                                           "singular_fibers": set(), "fiber_types": set(),
                                           "mw_rank": set(), "count": 0})
        r["singular_fibers"].add(p.fiber_string())
        r["fiber_types"].add(p.fiber_types_string())
        r["mw_rank"].add(p.mordell_weil_rank)
        r["count"] += 1
    out = []
    for k in sorted(rows):
        r = rows[k]
        out.append({"type": k, "diagram": r["diagram"],
                    "singular_fibers": "/".join(sorted(r["singular_fibers"])),
                    "fiber_types": "/".join(sorted(r["fiber_types"])),
                    "mw_rank": "/".join(str(x) for x in sorted(r["mw_rank"])),
                    "count": r["count"]})
    return out


def curve_labels_map() -> Mapping[str, RootLabel]:
    return {str(lab): lab for lab in ALL_LABELS}
