"""The semidirect product S4 ⋉ (C2 * C2 * C2 * C2) and its lattice action.

An element is stored as ``(perm, word)`` and means ``perm ∘ σ_{w1} ∘ … ∘ σ_{wk}``:
the word acts first (rightmost letter first), then the index permutation.
``perm`` is a tuple with ``perm[i-1] = π(i)``.  With this convention
``π σ_i π⁻¹ = σ_{π(i)}``, hence

    (π, w)·(ρ, u) = (π∘ρ, ρ⁻¹(w) + u)

where ``ρ⁻¹(w)`` relabels each letter of ``w`` by ``ρ⁻¹``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .lattice import Vector
from .model import BASIS_ORDER, CURVE_LABELS, G_LABELS, INDICES, LABEL_INDEX, EnriquesModel, label

Perm = tuple[int, int, int, int]
IDENTITY: Perm = (1, 2, 3, 4)

IsometryMatrix = tuple[tuple[Fraction, ...], ...]


class WordError(ValueError):
    """Unparseable word, permutation or letter."""


def perm_compose(p: Sequence[int], q: Sequence[int]) -> Perm:
    """``p ∘ q`` (apply q first)."""
    return tuple(p[q[i] - 1] for i in range(4))


def perm_inverse(p: Sequence[int]) -> Perm:
    inv = [0] * 4
    for i, image in enumerate(p, start=1):
        inv[image - 1] = i
    return tuple(inv)


def parse_perm(text: str) -> Perm:
    """Cycle notation such as ``"(1 2)(3 4)"`` or ``"id"``."""
    text = text.strip()
    if text in ("", "id", "()", "e"):
        return IDENTITY
    if not re.fullmatch(r"(\(\s*[1-4](\s*,?\s*[1-4])*\s*\)\s*)+", text):
        raise WordError(f"bad permutation {text!r}")
    perm = list(IDENTITY)
    for cyc in reversed(re.findall(r"\(([^)]*)\)", text)):
        pts = [int(x) for x in re.findall(r"[1-4]", cyc)]
        if len(set(pts)) != len(pts):
            raise WordError(f"repeated point in cycle ({cyc})")
        step = {pts[k]: pts[(k + 1) % len(pts)] for k in range(len(pts))}
        perm = [step.get(x, x) for x in perm]
    return tuple(perm)


def format_perm(p: Sequence[int]) -> str:
    seen, out = set(), []
    for start in INDICES:
        if start in seen or p[start - 1] == start:
            continue
        cyc, x = [], start
        while x not in seen:
            seen.add(x)
            cyc.append(str(x))
            x = p[x - 1]
        out.append("(" + " ".join(cyc) + ")")
    return "".join(out) or "id"


def _letter(x) -> int:
    if isinstance(x, int):
        k = x
    else:
        m = re.fullmatch(r"\s*(?:s|σ|sigma|rG)_?([1-4])\s*", str(x))
        if not m:
            raise WordError(f"invalid letter {x!r}")
        k = int(m.group(1))
    if k not in INDICES:
        raise WordError(f"invalid letter {x!r}")
    return k


def parse_word(text: str | Sequence) -> tuple[int, ...]:
    """``"s1 s2 s1"`` (also ``σ1``, ``1``) to letters ``(1, 2, 1)``."""
    if isinstance(text, str):
        tokens = text.replace(",", " ").split()
        return tuple(_letter(int(t) if t.isdigit() else t) for t in tokens)
    return tuple(_letter(t) for t in text)


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if stack and stack[-1] == a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


@dataclass(frozen=True)
class GroupElement:
    perm: Perm
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(INDICES):
            raise WordError(f"not a permutation of 1..4: {self.perm}")
        if any(a not in INDICES for a in self.word):
            raise WordError(f"invalid letter in {self.word}")
        if any(a == b for a, b in zip(self.word, self.word[1:])):
            raise WordError(f"word {self.word} is not reduced")

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def __str__(self) -> str:
        w = " ".join(f"s{a}" for a in self.word) or "1"
        return f"{format_perm(self.perm)} . {w}"

    def to_json(self) -> dict:
        return {"perm": format_perm(self.perm), "word": [f"s{a}" for a in self.word]}


ONE = GroupElement(IDENTITY, ())


def sigma(i: int) -> GroupElement:
    return GroupElement(IDENTITY, (_letter(i),))


def permutation(p: Sequence[int] | str) -> GroupElement:
    return GroupElement(parse_perm(p) if isinstance(p, str) else tuple(p), ())


def normal_form(perm: Sequence[int] | str, raw_word: Sequence | str) -> GroupElement:
    p = parse_perm(perm) if isinstance(perm, str) else tuple(perm)
    return GroupElement(p, _reduce(parse_word(raw_word)))


def multiply(g: GroupElement, h: GroupElement) -> GroupElement:
    rho_inv = perm_inverse(h.perm)
    moved = [rho_inv[a - 1] for a in g.word]
    return GroupElement(perm_compose(g.perm, h.perm), _reduce(moved + list(h.word)))


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(perm_inverse(g.perm), tuple(g.perm[a - 1] for a in reversed(g.word)))


def reduced_words(max_len: int) -> Iterator[tuple[int, ...]]:
    """All reduced words up to ``max_len``, by length then lexicographically."""
    layer: list[tuple[int, ...]] = [()]
    for length in range(max_len + 1):
        yield from layer
        if length == max_len:
            break
        layer = [w + (a,) for w in layer for a in INDICES if not w or w[-1] != a]


def all_elements(max_len: int) -> Iterator[GroupElement]:
    for p in itertools.permutations(INDICES):
        for w in reduced_words(max_len):
            yield GroupElement(p, w)


# -- lattice action --------------------------------------------------------------

def _matmul(a: IsometryMatrix, b: IsometryMatrix) -> IsometryMatrix:
    cols = list(zip(*b))
    return tuple(tuple(sum((x * y for x, y in zip(row, col) if x and y), Fraction(0)) for col in cols)
                 for row in a)


def identity_matrix(n: int = 10) -> IsometryMatrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def reflection_matrix(m: EnriquesModel, root: Vector) -> IsometryMatrix:
    """Matrix of ``x ↦ x + (x, e) e`` acting on column coordinate vectors."""
    ge = m.gram10.apply(root)
    return tuple(tuple(Fraction(int(i == j)) + root[i] * ge[j] for j in range(10)) for i in range(10))


def perm_matrix(perm: Sequence[int]) -> IsometryMatrix:
    rows = [[Fraction(0)] * 10 for _ in range(10)]
    for k, lab in enumerate(BASIS_ORDER):
        rows[LABEL_INDEX[lab.permuted(perm)]][k] = Fraction(1)
    return tuple(tuple(r) for r in rows)


def sigma_matrix(m: EnriquesModel, i: int) -> IsometryMatrix:
    return reflection_matrix(m, m.classes[G_LABELS[i - 1]])


def to_isometry(g: GroupElement, m: EnriquesModel) -> IsometryMatrix:
    mat = perm_matrix(g.perm)
    for a in g.word:
        mat = _matmul(mat, sigma_matrix(m, a))
    return mat


def apply(mat: IsometryMatrix, x: Sequence[Fraction]) -> Vector:
    return tuple(sum((a * b for a, b in zip(row, x) if a and b), Fraction(0)) for row in mat)


def act(g: GroupElement, m: EnriquesModel, x: Sequence[Fraction]) -> Vector:
    """``g·x`` computed letter by letter (no matrices)."""
    v = tuple(x)
    for a in reversed(g.word):
        e = m.classes[G_LABELS[a - 1]]
        c = m.dot(v, e)
        v = tuple(p + c * q for p, q in zip(v, e))
    out = [Fraction(0)] * 10
    for k, lab in enumerate(BASIS_ORDER):
        out[LABEL_INDEX[lab.permuted(g.perm)]] += v[k]
    return tuple(out)


def is_isometry(mat: IsometryMatrix, m: EnriquesModel) -> bool:
    g = m.gram10.entries
    mt = tuple(zip(*mat))
    return _matmul(_matmul(mt, g), mat) == g


# -- parity and projection ---------------------------------------------------------

def check_parity(m: EnriquesModel) -> bool:
    """(G_i, c) is even for every G_i and every 10A+6B curve class c."""
    return all(m.pair(g, c) % 2 == 0 for g in G_LABELS for c in CURVE_LABELS)


class ParityError(RuntimeError):
    pass


def parse_generator(token: str) -> tuple[str, int | str]:
    """``'s3'``/``'rG3'`` -> ('sigma', 3); ``'rE12'``/``'rF34'`` -> ('curve', 'E12')."""
    tok = token.strip()
    try:
        return ("sigma", _letter(tok))
    except WordError:
        pass
    m = re.fullmatch(r"r_?([EF]_?\{?[1-4]{1,2}\}?)", tok)
    if not m:
        raise WordError(f"unknown generator {token!r}")
    lab = label(m.group(1))
    if lab not in CURVE_LABELS:
        raise WordError(f"unknown generator {token!r}")
    return ("curve", str(lab))


def project_to_W4C(word: Sequence[str] | str, m: EnriquesModel) -> GroupElement:
    """Image in W(4C) of a word in the 20 reflections: drop curve letters, reduce."""
    if not check_parity(m):
        raise ParityError("4C/10A+6B products are not all even; projection undefined")
    tokens = word.split() if isinstance(word, str) else list(word)
    letters = []
    for tok in tokens:
        kind, val = parse_generator(tok)
        if kind == "sigma":
            letters.append(val)
    return GroupElement(IDENTITY, _reduce(letters))


def word_isometry(word: Sequence[str], m: EnriquesModel) -> IsometryMatrix:
    """Product of the reflections named in ``word`` (leftmost outermost)."""
    mat = identity_matrix()
    for tok in word:
        kind, val = parse_generator(tok)
        root = m.classes[G_LABELS[val - 1]] if kind == "sigma" else m.classes[label(val)]
        mat = _matmul(mat, reflection_matrix(m, root))
    return mat


# -- faithfulness evidence ---------------------------------------------------------

def faithfulness_check(m: EnriquesModel, max_len: int) -> tuple[int, int]:
    """Return ``(#normal forms, #distinct matrices)`` over word length <= max_len.

    Every matrix here is integral, so the products run in int64 with an
    explicit overflow guard; equality is then exact.
    """
    def as_int(mat: IsometryMatrix) -> np.ndarray:
        if any(x.denominator != 1 for row in mat for x in row):
            raise ValueError("expected an integral matrix")
        return np.array([[int(x) for x in row] for row in mat], dtype=np.int64)

    sig = [as_int(sigma_matrix(m, i)) for i in INDICES]
    word_mats = {(): np.eye(10, dtype=np.int64)}
    for w in reduced_words(max_len):
        if w:
            word_mats[w] = word_mats[w[:-1]] @ sig[w[-1] - 1]
    biggest = max(int(np.abs(a).max()) for a in word_mats.values())
    if biggest > 2 ** 40:
        raise OverflowError("matrix entries too large for exact int64 products")
    seen = set()
    count = 0
    for p in itertools.permutations(INDICES):
        pm = as_int(perm_matrix(p))
        for wm in word_mats.values():
            seen.add((pm @ wm).tobytes())
            count += 1
    return count, len(seen)
