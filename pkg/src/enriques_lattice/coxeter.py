"""Coxeter diagram engine for the 20-root polyhedron.

Edge weights are the intersection numbers of the roots (all roots have
norm -2), so the Gram matrix of a vertex subset is ``-2`` on the diagonal
and the weights off it.  Affine components are recognised twice, by shape
template and by an exact corank-1 test, and the two must agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .lattice import NEGATIVE_SEMIDEFINITE, GramMatrix, classify_definiteness, inertia
from .model import ALL_LABELS, INDICES, EnriquesModel, RootLabel


class DiagramError(RuntimeError):
    """Inconsistent diagram data or disagreeing recognisers."""


@dataclass(frozen=True)
class CoxeterDiagram:
    vertices: tuple[Hashable, ...]
    weights: tuple[tuple[int, ...], ...]
    vertex_class: Mapping[Hashable, str] = field(default_factory=dict)
    lattice_rank: int = 10

    def index(self, v: Hashable) -> int:
        return self.vertices.index(v)

    def weight(self, u: Hashable, v: Hashable) -> int:
        return self.weights[self.index(u)][self.index(v)]

    def neighbours(self, i: int) -> list[int]:
        return [j for j, w in enumerate(self.weights[i]) if j != i and w]

    def gram(self, idx: Sequence[int]) -> GramMatrix:
        return GramMatrix(tuple(tuple(Fraction(-2 if a == b else self.weights[a][b]) for b in idx)
                                for a in idx))

    def restrict(self, keep: Iterable[Hashable]) -> "CoxeterDiagram":
        keep = [v for v in self.vertices if v in set(keep)]
        idx = [self.index(v) for v in keep]
        w = tuple(tuple(self.weights[a][b] for b in idx) for a in idx)
        return CoxeterDiagram(tuple(keep), w, {v: self.vertex_class.get(v, "") for v in keep},
                              self.lattice_rank)


def build_diagram(m: EnriquesModel) -> CoxeterDiagram:
    weights = []
    for a, u in enumerate(ALL_LABELS):
        row = []
        for b, v in enumerate(ALL_LABELS):
            x = m.gram20[a][b]
            if a == b:
                row.append(0)
                continue
            if x not in (0, 1, 2):
                raise DiagramError(f"weight ({u},{v}) = {x}: dotted or Lannér edge")
            row.append(int(x))
        weights.append(tuple(row))
    return CoxeterDiagram(ALL_LABELS, tuple(weights), {v: v.config for v in ALL_LABELS})


# -- affine types --------------------------------------------------------------

_LETTER_ORDER = {"E": 0, "D": 1, "A": 2}
_SUBSCRIPT = str.maketrans("0123456789", "₀₁₂₃₄₅₆₇₈₉")
_TILDE = {"A": "Ã", "D": "D̃", "E": "Ẽ"}


@dataclass(frozen=True)
class AffineType:
    letter: str
    subscript: int

    @property
    def rank(self) -> int:
        return self.subscript

    @property
    def vertex_count(self) -> int:
        return self.subscript + 1

    def __str__(self) -> str:
        return f"{self.letter}{self.subscript}~"

    def pretty(self) -> str:
        return _TILDE[self.letter] + str(self.subscript).translate(_SUBSCRIPT)

    def sort_key(self) -> tuple[int, int]:
        return (_LETTER_ORDER[self.letter], -self.subscript)

    @classmethod
    def parse(cls, text: str) -> "AffineType":
        text = text.strip().rstrip("~")
        return cls(text[0], int(text[1:]))


def _connected(d: CoxeterDiagram, idx: Sequence[int]) -> bool:
    idx = list(idx)
    if not idx:
        return False
    seen = {idx[0]}
    stack = [idx[0]]
    inside = set(idx)
    while stack:
        a = stack.pop()
        for b in d.neighbours(a):
            if b in inside and b not in seen:
                seen.add(b)
                stack.append(b)
    return seen == inside


def components(d: CoxeterDiagram, idx: Iterable[int]) -> list[tuple[int, ...]]:
    rest = set(idx)
    out = []
    while rest:
        start = min(rest)
        comp = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in d.neighbours(a):
                if b in rest and b not in comp:
                    comp.add(b)
                    stack.append(b)
        rest -= comp
        out.append(tuple(sorted(comp)))
    return sorted(out)


def _template_type(d: CoxeterDiagram, idx: Sequence[int]) -> AffineType | None:
    n = len(idx)
    inside = set(idx)
    adj = {a: [b for b in d.neighbours(a) if b in inside] for a in idx}
    heavy = [(a, b) for a in idx for b in adj[a] if a < b and d.weights[a][b] != 1]
    if heavy:
        if n == 2 and d.weights[idx[0]][idx[1]] == 2:
            return AffineType("A", 1)
        return None
    edges = sum(len(v) for v in adj.values()) // 2
    deg = {a: len(adj[a]) for a in idx}
    if edges == n and n >= 3 and all(x == 2 for x in deg.values()):
        return AffineType("A", n - 1)
    if edges != n - 1:
        return None
    branch = [a for a in idx if deg[a] >= 3]
    if any(deg[a] > 4 for a in idx):
        return None
    if len(branch) == 1 and deg[branch[0]] == 4:
        return AffineType("D", 4) if n == 5 else None
    if len(branch) == 2 and all(deg[a] == 3 for a in branch):
        # D~_n: each branch vertex carries two leaves, joined by a bare path
        for a in branch:
            if sum(1 for b in adj[a] if deg[b] == 1) != 2:
                return None
        return AffineType("D", n - 1)
    if len(branch) == 1 and deg[branch[0]] == 3:
        centre = branch[0]
        arms = []
        for start in adj[centre]:
            length, prev, cur = 1, centre, start
            while deg[cur] == 2:
                prev, cur = cur, next(b for b in adj[cur] if b != prev)
                length += 1
            arms.append(length)
        shape = tuple(sorted(arms))
        return {(2, 2, 2): AffineType("E", 6), (1, 3, 3): AffineType("E", 7),
                (1, 2, 5): AffineType("E", 8)}.get(shape)
    return None


def classify_component(d: CoxeterDiagram, s: Iterable[Hashable]) -> AffineType | None:
    """Affine Dynkin type of a connected vertex subset, or None if not affine."""
    idx = sorted(d.index(v) for v in s)
    if not _connected(d, idx):
        raise DiagramError("subset is not connected")
    return _classify_idx(d, idx)


def _classify_idx(d: CoxeterDiagram, idx: Sequence[int]) -> AffineType | None:
    shape = _template_type(d, idx)
    defin = classify_definiteness(d.gram(idx))
    exact = defin.kind == NEGATIVE_SEMIDEFINITE and defin.corank == 1
    if (shape is not None) != exact:
        raise DiagramError(f"template {shape} disagrees with definiteness {defin} on {idx}")
    if shape is not None and shape.vertex_count != len(idx):
        raise DiagramError(f"template {shape} has wrong vertex count for {idx}")
    return shape


# -- parabolic subdiagrams ----------------------------------------------------

@dataclass(frozen=True)
class ParabolicSubdiagram:
    components: tuple[tuple[tuple[Hashable, ...], AffineType], ...]
    total_rank: int
    census_counts: tuple[int, int, int]

    @property
    def type_string(self) -> str:
        return "+".join(str(t) for _, t in self.components)

    def pretty(self) -> str:
        return "+".join(t.pretty() for _, t in self.components)

    @property
    def vertices(self) -> tuple[Hashable, ...]:
        return tuple(v for comp, _ in self.components for v in comp)

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def to_json(self) -> dict:
        return {"type": self.type_string, "vertices": [str(v) for v in self.vertices],
                "census": list(self.census_counts)}


def _make_parabolic(d: CoxeterDiagram, comps: Sequence[tuple[tuple[int, ...], AffineType]]) -> ParabolicSubdiagram:
    ordered = sorted(comps, key=lambda ct: (ct[1].sort_key(), ct[0]))
    census = [0, 0, 0]
    for idx, _ in ordered:
        for a in idx:
            tag = d.vertex_class.get(d.vertices[a], "")
            if tag in ("10A", "6B", "4C"):
                census[("10A", "6B", "4C").index(tag)] += 1
    return ParabolicSubdiagram(
        tuple((tuple(d.vertices[a] for a in idx), t) for idx, t in ordered),
        sum(t.rank for _, t in ordered), tuple(census))


def _sort_key(d: CoxeterDiagram, p: ParabolicSubdiagram):
    return (p.type_string, sorted(d.index(v) for v in p.vertices))


def connected_parabolics(d: CoxeterDiagram) -> list[tuple[tuple[int, ...], AffineType]]:
    """All connected affine subdiagrams, by growth through semidefinite sets."""
    layer = {(a,) for a in range(len(d.vertices))}
    found: list[tuple[tuple[int, ...], AffineType]] = []
    seen = set(layer)
    while layer:
        nxt = set()
        for s in layer:
            members = set(s)
            for b in {b for a in s for b in d.neighbours(a)} - members:
                t = tuple(sorted(members | {b}))
                if t in seen:
                    continue
                seen.add(t)
                pos, _, _ = inertia(d.gram(t))
                if pos == 0:
                    nxt.add(t)
        for t in nxt:
            kind = _classify_idx(d, t)
            if kind is not None:
                found.append((t, kind))
        layer = nxt
    return sorted(found)


def enumerate_max_parabolics(d: CoxeterDiagram, rank: int | None = None) -> list[ParabolicSubdiagram]:
    """Parabolic subdiagrams of the given total rank (default: lattice rank - 2)."""
    target = d.lattice_rank - 2 if rank is None else rank
    comps = connected_parabolics(d)
    orth = {}
    for a, (s, _) in enumerate(comps):
        touch = {b for v in s for b in d.neighbours(v)} | set(s)
        orth[a] = touch
    out = []

    def extend(start: int, chosen: list[int], blocked: set[int], total: int) -> None:
        if total == target:
            out.append(_make_parabolic(d, [comps[k] for k in chosen]))
            return
        for k in range(start, len(comps)):
            s, t = comps[k]
            if total + t.rank > target or blocked & set(s):
                continue
            extend(k + 1, chosen + [k], blocked | orth[k], total + t.rank)

    extend(0, [], set(), 0)
    return sorted(out, key=lambda p: _sort_key(d, p))


def naive_max_parabolics(d: CoxeterDiagram, rank: int | None = None) -> list[ParabolicSubdiagram]:
    """Oracle: scan every vertex subset.  Exponential; meant for small diagrams."""
    target = d.lattice_rank - 2 if rank is None else rank
    n = len(d.vertices)
    out = []
    for size in range(1, n + 1):
        for idx in itertools.combinations(range(n), size):
            pos, neg, _ = inertia(d.gram(idx))
            if pos or neg != target:
                continue
            parts = []
            for comp in components(d, idx):
                kind = classify_definiteness(d.gram(comp))
                if not (kind.kind == NEGATIVE_SEMIDEFINITE and kind.corank == 1):
                    break
                parts.append((comp, _template_type(d, comp)))
            else:
                out.append(_make_parabolic(d, parts))
    return sorted(out, key=lambda p: _sort_key(d, p))


def scan_max_parabolics(d: CoxeterDiagram, rank: int | None = None) -> list[ParabolicSubdiagram]:
    """Scan all 2^n subsets, pruning hereditarily on negative semidefiniteness.

    Independent of :func:`connected_parabolics`: it decides each subset only
    from the exact inertia of its connected components.
    """
    target = d.lattice_rank - 2 if rank is None else rank
    n = len(d.vertices)
    memo: dict[tuple[int, ...], tuple[int, int]] = {}

    def comp_inertia(comp: tuple[int, ...]) -> tuple[int, int]:
        if comp not in memo:
            pos, neg, zero = inertia(d.gram(comp))
            memo[comp] = (pos, zero)
        return memo[comp]

    out = []
    chosen: list[int] = []

    def walk(a: int) -> None:
        if a == n:
            comps = components(d, chosen)
            if all(comp_inertia(c)[1] == 1 for c in comps) and \
                    sum(len(c) - 1 for c in comps) == target:
                out.append(_make_parabolic(d, [(c, _template_type(d, c)) for c in comps]))
            return
        chosen.append(a)
        comp = next(c for c in components(d, chosen) if a in c)
        if comp_inertia(comp)[0] == 0:
            walk(a + 1)
        chosen.pop()
        walk(a + 1)

    walk(0)
    return sorted(out, key=lambda p: _sort_key(d, p))


@dataclass(frozen=True)
class FiniteVolumeReport:
    holds: bool
    witnesses: Mapping[tuple[Hashable, ...], ParabolicSubdiagram]
    failures: tuple[tuple[Hashable, ...], ...]
    connected_count: int


def check_finite_volume(d: CoxeterDiagram, rank: int | None = None) -> FiniteVolumeReport:
    """Every connected parabolic must be a full component of a maximal one."""
    maximal = enumerate_max_parabolics(d, rank)
    witnesses = {}
    failures = []
    conn = connected_parabolics(d)
    for idx, _ in conn:
        verts = tuple(d.vertices[a] for a in idx)
        hit = next((p for p in maximal if any(set(c) == set(verts) for c, _ in p.components)), None)
        if hit is None:
            failures.append(verts)
        else:
            witnesses[verts] = hit
    return FiniteVolumeReport(not failures, witnesses, tuple(failures), len(conn))


# -- automorphisms --------------------------------------------------------------

@dataclass(frozen=True)
class PermutationGroup:
    degree: int
    elements: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[int, ...], ...]
    index_action_image: frozenset

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def equals_index_action(self) -> bool:
        return set(self.elements) == set(self.index_action_image)


def _refined_colours(d: CoxeterDiagram) -> list[int]:
    n = len(d.vertices)
    colour = [0] * n
    while True:
        sig = [(colour[a], tuple(sorted((d.weights[a][b], colour[b]) for b in d.neighbours(a))))
               for a in range(n)]
        palette = {s: k for k, s in enumerate(sorted(set(sig)))}
        new = [palette[s] for s in sig]
        if len(set(new)) == len(set(colour)):
            return new
        colour = new


def _automorphism_search(d: CoxeterDiagram) -> Iterator[tuple[int, ...]]:
    n = len(d.vertices)
    colour = _refined_colours(d)
    image = [-1] * n
    used = [False] * n

    def place(a: int) -> Iterator[tuple[int, ...]]:
        if a == n:
            yield tuple(image)
            return
        for b in range(n):
            if used[b] or colour[b] != colour[a]:
                continue
            if all(d.weights[a][c] == d.weights[b][image[c]] for c in range(a)):
                image[a], used[b] = b, True
                yield from place(a + 1)
                image[a], used[b] = -1, False

    yield from place(0)


def _compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(p[q[i]] for i in range(len(q)))


def _closure(gens: Sequence[tuple[int, ...]], n: int) -> set[tuple[int, ...]]:
    ident = tuple(range(n))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = _compose(s, g)
                if h not in group:
                    group.add(h)
                    nxt.append(h)
        frontier = nxt
    return group


def index_action(d: CoxeterDiagram, perm: Sequence[int]) -> tuple[int, ...]:
    """Vertex permutation induced by an index permutation of {1,2,3,4}."""
    return tuple(d.index(v.permuted(perm)) for v in d.vertices)


def diagram_automorphisms(d: CoxeterDiagram) -> PermutationGroup:
    elements = sorted(_automorphism_search(d))
    gens: list[tuple[int, ...]] = []
    span = {tuple(range(len(d.vertices)))}
    for g in elements:
        if g not in span:
            gens.append(g)
            span = _closure(gens, len(d.vertices))
    image: frozenset = frozenset()
    if all(isinstance(v, RootLabel) for v in d.vertices):
        image = frozenset(index_action(d, p) for p in itertools.permutations(INDICES))
    return PermutationGroup(len(d.vertices), tuple(elements), tuple(gens), image)


def is_automorphism(d: CoxeterDiagram, perm: Sequence[int]) -> bool:
    n = len(d.vertices)
    return sorted(perm) == list(range(n)) and all(
        d.weights[a][b] == d.weights[perm[a]][perm[b]] for a in range(n) for b in range(n))


def census_table(parabolics: Sequence[ParabolicSubdiagram]) -> dict[str, tuple[int, set]]:
    """type string -> (count, set of census triples)."""
    table: dict[str, tuple[int, set]] = {}
    for p in parabolics:
        count, cens = table.get(p.type_string, (0, set()))
        table[p.type_string] = (count + 1, cens | {p.census_counts})
    return table
