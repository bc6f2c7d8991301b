"""Exact rational lattice primitives.

Vectors are plain tuples of :class:`fractions.Fraction` with no basis tag;
every operation that needs a bilinear form takes the Gram matrix explicitly.
Nothing in this module touches floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import sympy
from sympy.matrices.normalforms import hermite_normal_form, invariant_factors

Vector = tuple[Fraction, ...]


class LatticeError(ValueError):
    """Malformed input to a lattice operation."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise LatticeError("floating point input is not accepted; use int, Fraction or 'p/q'")
    return Fraction(x)


def vector(coords: Iterable) -> Vector:
    return tuple(to_fraction(c) for c in coords)


def unit(n: int, i: int) -> Vector:
    return tuple(Fraction(int(k == i)) for k in range(n))


def vadd(v: Sequence[Fraction], w: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(v, w, strict=True))


def vsub(v: Sequence[Fraction], w: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(v, w, strict=True))


def vscale(c, v: Sequence[Fraction]) -> Vector:
    c = to_fraction(c)
    return tuple(c * a for a in v)


def vsum(vectors: Iterable[Sequence[Fraction]], n: int) -> Vector:
    acc = [Fraction(0)] * n
    for v in vectors:
        for k, a in enumerate(v):
            acc[k] += a
    return tuple(acc)


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric matrix of exact rationals."""

    entries: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.entries)
        if n < 1:
            raise LatticeError("Gram matrix must have dimension >= 1")
        for row in self.entries:
            if len(row) != n:
                raise LatticeError("Gram matrix must be square")
        for i in range(n):
            for j in range(i + 1, n):
                if self.entries[i][j] != self.entries[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i}, {j})")

    @classmethod
    def of(cls, rows: Iterable[Iterable]) -> "GramMatrix":
        return cls(tuple(tuple(to_fraction(x) for x in row) for row in rows))

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def submatrix(self, idx: Sequence[int]) -> "GramMatrix":
        return GramMatrix(tuple(tuple(self.entries[i][j] for j in idx) for i in idx))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.entries for x in row)

    def int_rows(self) -> list[list[int]]:
        if not self.is_integral():
            raise LatticeError("Gram matrix has non-integer entries")
        return [[int(x) for x in row] for row in self.entries]

    def apply(self, v: Sequence[Fraction]) -> Vector:
        """Return g·v."""
        if len(v) != self.n:
            raise LatticeError(f"dimension mismatch: vector {len(v)} vs Gram {self.n}")
        return tuple(sum((a * b for a, b in zip(row, v)), Fraction(0)) for row in self.entries)


def inner_product(v: Sequence[Fraction], w: Sequence[Fraction], g: GramMatrix) -> Fraction:
    if len(v) != g.n or len(w) != g.n:
        raise LatticeError(f"dimension mismatch: {len(v)}, {len(w)} vs Gram {g.n}")
    total = Fraction(0)
    for i, a in enumerate(v):
        if a:
            row = g.entries[i]
            total += a * sum((row[j] * b for j, b in enumerate(w) if b), Fraction(0))
    return total


def norm(v: Sequence[Fraction], g: GramMatrix) -> Fraction:
    return inner_product(v, v, g)


def reflect(x: Sequence[Fraction], e: Sequence[Fraction], g: GramMatrix) -> Vector:
    """Reflection in a (-2)-root: ``x + (x, e) e``."""
    if norm(e, g) != -2:
        raise LatticeError("reflection root must have norm -2")
    c = inner_product(x, e, g)
    return tuple(a + c * b for a, b in zip(x, e))


# -- definiteness -----------------------------------------------------------

NEGATIVE_DEFINITE = "NegativeDefinite"
NEGATIVE_SEMIDEFINITE = "NegativeSemidefinite"
INDEFINITE = "Indefinite"
OTHER = "Other"


@dataclass(frozen=True)
class Definiteness:
    kind: str
    corank: int = 0

    def __str__(self) -> str:
        if self.kind == NEGATIVE_SEMIDEFINITE:
            return f"NegativeSemidefiniteCorank({self.corank})"
        return self.kind


def inertia(g: GramMatrix) -> tuple[int, int, int]:
    """Return ``(n_plus, n_minus, n_zero)`` by symmetric elimination.

    Zero diagonal pivots are repaired by the congruence ``row_i += ±row_j``
    (and the same on columns); no perturbation is ever introduced.
    """
    a = g.rows()
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        p = next((i for i in active if a[i][i] != 0), None)
        if p is None:
            pair = next(((i, j) for i in active for j in active if i != j and a[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            s = 1 if a[i][j] > 0 else -1
            # a_ii + 2 s a_ij + a_jj = 2 |a_ij| > 0 since both diagonals vanish
            for k in range(n):
                a[i][k] += s * a[j][k]
            for k in range(n):
                a[k][i] += s * a[k][j]
            p = i
        d = a[p][p]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(p)
        for i in active:
            f = a[i][p] / d
            if f:
                for k in active:
                    a[i][k] -= f * a[p][k]
        for i in active:
            a[i][p] = a[p][i] = Fraction(0)
    return pos, neg, n - pos - neg


def classify_definiteness(g: GramMatrix) -> Definiteness:
    pos, neg, zero = inertia(g)
    if pos == 0 and zero == 0:
        return Definiteness(NEGATIVE_DEFINITE)
    if pos == 0:
        return Definiteness(NEGATIVE_SEMIDEFINITE, zero)
    if neg > 0:
        return Definiteness(INDEFINITE)
    return Definiteness(OTHER)


# -- elimination ------------------------------------------------------------

def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(r) for r in rows]
    m = len(a)
    ncols = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def determinant(g: GramMatrix | Sequence[Sequence]) -> Fraction:
    rows = g.rows() if isinstance(g, GramMatrix) else [[to_fraction(x) for x in r] for r in g]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise LatticeError("determinant needs a square matrix")
    a = [list(r) for r in rows]
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def rank(g: GramMatrix | Sequence[Sequence]) -> int:
    rows = g.rows() if isinstance(g, GramMatrix) else [[to_fraction(x) for x in r] for r in g]
    if not rows:
        return 0
    return len(_rref(rows)[1])


def primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Positive rescaling of ``v`` to a primitive integer vector."""
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    gcd = math.gcd(*ints)
    if gcd == 0:
        raise LatticeError("zero vector has no primitive rescaling")
    return tuple(x // gcd for x in ints)


def kernel_basis(g: GramMatrix) -> list[Vector]:
    """Exact null-space basis, each vector primitive integral.

    Sign convention: first nonzero entry positive, which for the null vector
    of a connected affine diagram makes every entry positive.
    """
    a, pivots = _rref(g.rows())
    n = g.n
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -a[r][f]
        p = primitive_integer(v)
        if next(x for x in p if x) < 0:
            p = tuple(-x for x in p)
        basis.append(tuple(Fraction(x) for x in p))
    return basis


def solve(g: GramMatrix, b: Sequence) -> Vector:
    """Unique solution of ``g·c = b``; raises if ``g`` is singular."""
    n = g.n
    rows = [list(r) + [to_fraction(x)] for r, x in zip(g.rows(), b, strict=True)]
    a, pivots = _rref(rows)
    if pivots != list(range(n)):
        raise LatticeError("singular system")
    return tuple(a[i][n] for i in range(n))


# -- integer lattices ---------------------------------------------------------

def smith_invariants(m: Sequence[Sequence]) -> list[int]:
    """Smith normal form diagonal (ascending divisibility, zeros last)."""
    rows = [[to_fraction(x) for x in r] for r in (m.rows() if isinstance(m, GramMatrix) else m)]
    if any(x.denominator != 1 for r in rows for x in r):
        raise LatticeError("Smith invariants need an integer matrix")
    mat = sympy.Matrix([[int(x) for x in r] for r in rows])
    inv = [abs(int(x)) for x in invariant_factors(mat, domain=sympy.ZZ)]
    nonzero = sorted(x for x in inv if x)
    return nonzero + [0] * (len(inv) - len(nonzero))


def integral_basis(generators: Sequence[Sequence[Fraction]]) -> list[Vector]:
    """A basis of the abelian group spanned by rational ``generators``."""
    den = math.lcm(*(x.denominator for v in generators for x in v))
    cols = sympy.Matrix([[int(x * den) for x in v] for v in generators]).T
    h = hermite_normal_form(cols)
    return [tuple(Fraction(int(h[i, j]), den) for i in range(h.rows)) for j in range(h.cols)]


def coordinates(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector | None:
    """Coordinates of ``v`` in a linearly independent ``basis`` (None if outside the span)."""
    n = len(basis)
    rows = [[basis[j][i] for j in range(n)] + [to_fraction(v[i])] for i in range(len(v))]
    a, pivots = _rref(rows)
    if n in pivots:
        return None
    return tuple(a[pivots.index(j)][n] for j in range(n))


def lattice_content(basis: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> int | None:
    """gcd of the integer coordinates of ``v``; None if ``v`` is not in the lattice."""
    c = coordinates(basis, v)
    if c is None or any(x.denominator != 1 for x in c):
        return None
    return math.gcd(*(int(x) for x in c))


def basis_gram(basis: Sequence[Sequence[Fraction]], g: GramMatrix) -> GramMatrix:
    return GramMatrix(tuple(tuple(inner_product(u, w, g) for w in basis) for u in basis))


# -- bounded enumeration ------------------------------------------------------

def _unimodular_clearing(row: Sequence[int]) -> tuple[int, list[list[int]]]:
    """Return ``(g, U)`` with ``U`` unimodular and ``row·U = (g, 0, ..., 0)``, ``g >= 0``."""
    n = len(row)
    r = list(row)
    u = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst: int, src: int, k: int) -> None:  # col_dst -= k * col_src
        r[dst] -= k * r[src]
        for i in range(n):
            u[i][dst] -= k * u[i][src]

    def swap(a: int, b: int) -> None:
        r[a], r[b] = r[b], r[a]
        for i in range(n):
            u[i][a], u[i][b] = u[i][b], u[i][a]

    for j in range(1, n):
        while r[j] != 0:
            colop(0, j, r[0] // r[j])
            swap(0, j)
    if r[0] < 0:
        r[0] = -r[0]
        for i in range(n):
            u[i][0] = -u[i][0]
    return r[0], u


def _ldl_positive(a: list[list[Fraction]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    n = len(a)
    a = [list(r) for r in a]
    d: list[Fraction] = [Fraction(0)] * n
    mu = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d[i] = a[i][i]
        if d[i] <= 0:
            raise LatticeError("form is not positive definite")
        for j in range(i + 1, n):
            mu[i][j] = a[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j][k] -= mu[i][j] * a[i][k]
    return d, mu


def _sphere_points(form: list[list[Fraction]], centre: Sequence[Fraction],
                   radius: Fraction) -> Iterator[tuple[int, ...]]:
    """Integer points ``c`` with ``(c - centre)ᵀ form (c - centre) == radius`` exactly.

    Fincke-Pohst descent carried out entirely in scaled integers.
    """
    n = len(form)
    if radius < 0:
        return
    if n == 0:
        if radius == 0:
            yield ()
        return
    d, mu = _ldl_positive(form)
    s = math.lcm(*(x.denominator for row in mu for x in row), 1) * \
        math.lcm(*(x.denominator for x in centre), 1)
    k = math.lcm(*(x.denominator for x in d), radius.denominator)
    e = [int(x * k) for x in d]
    m = [[int(mu[i][j] * s) for j in range(n)] for i in range(n)]
    # numerator of the level-i centre before subtracting sum_j m_ij c_j
    a0 = [int(s * (centre[i] + sum((mu[i][j] * centre[j] for j in range(i + 1, n)), Fraction(0))))
          for i in range(n)]
    total = int(radius * k * s * s)
    c = [0] * n

    def descend(i: int, rem: int) -> Iterator[tuple[int, ...]]:
        ncen = a0[i] - sum(m[i][j] * c[j] for j in range(i + 1, n))
        # e_i (s c_i - ncen)^2 <= rem
        bound = math.isqrt(rem // e[i])
        if i == 0:
            if rem % e[0]:
                return
            q = rem // e[0]
            root = math.isqrt(q)
            if root * root != q:
                return
            for t in sorted({ncen - root, ncen + root}):
                if t % s == 0:
                    c[0] = t // s
                    yield tuple(c)
            return
        lo = -((bound - ncen) // s)  # ceil((ncen - bound) / s)
        hi = (ncen + bound) // s
        for ci in range(lo, hi + 1):
            c[i] = ci
            dev = s * ci - ncen
            yield from descend(i - 1, rem - e[i] * dev * dev)
        c[i] = 0

    yield from descend(n - 1, total)


def enumerate_slice(basis_gram_int: Sequence[Sequence[int]], degree_row: Sequence[int],
                    degree: int, target_norm: int) -> list[tuple[int, ...]]:
    """All integer coordinate vectors ``c`` with ``c·degree_row == degree`` and
    ``cᵀ G c == target_norm``.

    ``G`` must be hyperbolic and negative definite on the kernel of ``degree_row``
    (true whenever ``degree_row = G h`` with ``h² > 0``).
    """
    n = len(basis_gram_int)
    g, u = _unimodular_clearing(degree_row)
    if g == 0:
        raise LatticeError("degree functional vanishes on the lattice")
    if degree % g:
        return []
    c0 = degree // g
    b = [[sum(u[p][i] * basis_gram_int[p][q] * u[q][j] for p in range(n) for q in range(n))
          for j in range(n)] for i in range(n)]
    # -x² = yᵀ N y + 2 wᵀ y - b00 c0²  with y the free coordinates
    form = [[Fraction(-b[i][j]) for j in range(1, n)] for i in range(1, n)]
    w = [Fraction(-b[0][j] * c0) for j in range(1, n)]
    z = solve(GramMatrix(tuple(tuple(r) for r in form)), w) if n > 1 else ()
    # (y + z)ᵀ N (y + z) = -target + b00 c0² + zᵀ N z
    znz = sum((z[i] * form[i][j] * z[j] for i in range(n - 1) for j in range(n - 1)), Fraction(0))
    radius = Fraction(-target_norm + b[0][0] * c0 * c0) + znz
    centre = [-x for x in z]
    out = []
    for y in _sphere_points(form, centre, radius):
        full = (c0,) + y
        out.append(tuple(sum(u[i][j] * full[j] for j in range(n)) for i in range(n)))
    return sorted(out)
