"""Command-line interface: ``enriques-lattice <subcommand>``.

Exit codes: 0 success, 1 verification failure, 2 parse error, 3 precondition
violation.  All numbers are printed exactly (integers or ``p/q``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from . import __version__
from .coxeter import (
    DiagramError,
    build_diagram,
    census_table,
    check_finite_volume,
    diagram_automorphisms,
    enumerate_max_parabolics,
)
from .group import (
    GroupElement,
    WordError,
    check_parity,
    faithfulness_check,
    inverse,
    normal_form,
    to_isometry,
)
from .lattice import LatticeError, Vector, determinant
from .model import (
    ALL_LABELS,
    CURVE_LABELS,
    E_EDGE,
    E_VERTEX,
    G_LABELS,
    EnriquesModel,
    ModelError,
    curve_lattice_invariants,
    figure_6b_crosscheck,
    label,
    load_model,
    vector_from_labels,
    verify_tables,
)
from .orbits import (
    PENCIL_TABLE,
    OrbitError,
    apply_word,
    classify_curve_class,
    classify_pencil,
    curve_census,
    enumerate_vectors,
    orbit_ball,
    pencil_census,
    pencil_types,
    sextuple,
    sigma_reduce,
    pencil_table_rows,
    verify_orbit_characterizations,
)

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_PRECONDITION = 0, 1, 2, 3

EXPECTED_PARABOLICS = {
    "E7~+A1~": (12, (8, 1, 1)),
    "E6~+A2~": (4, (7, 3, 0)),
    "D6~+A1~+A1~": (6, (8, 1, 2)),
    "A7~+A1~": (3, (8, 2, 0)),
    "A5~+A2~+A1~": (4, (7, 3, 1)),
}


class ParseError(ValueError):
    pass


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vec(v: Sequence[Fraction]) -> list[str]:
    return [_frac(c) for c in v]


_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*([EFG]_?\{?[1-4]{1,2}\}?|H)\s*")


def parse_vector(text: str, m: EnriquesModel) -> Vector:
    """Ten comma-separated rationals, or a label expression like ``E1+2*E12-G4``."""
    text = text.strip()
    if not text:
        raise ParseError("empty vector")
    if re.search(r"[EFGH]", text):
        pos, terms = 0, {}
        first = True
        while pos < len(text):
            mt = _TERM.match(text, pos)
            if not mt or mt.end() == pos or (mt.group(1) is None and not first):
                raise ParseError(f"cannot parse label expression at {text[pos:]!r}")
            sign = -1 if mt.group(1) == "-" else 1
            coeff = Fraction(mt.group(2)) if mt.group(2) else Fraction(1)
            name = mt.group(3)
            terms[name] = terms.get(name, 0) + sign * coeff
            pos, first = mt.end(), False
        out = tuple(Fraction(0) for _ in range(10))
        for name, c in terms.items():
            v = m.H if name == "H" else vector_from_labels(m, {label(name): 1})
            out = tuple(a + c * b for a, b in zip(out, v))
        return out
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 10:
        raise ParseError(f"expected 10 coordinates, got {len(parts)}")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad coordinate in {text!r}: {exc}") from None


def parse_element(text: str) -> GroupElement:
    """``"(1 2) . s1 s2"``, ``"s1 s3"``, ``"(1 2 3)"`` or ``"id"``."""
    text = text.strip()
    if "." in text:
        perm, word = text.split(".", 1)
    elif text.startswith("(") or text in ("id", "1", ""):
        perm, word = text if text != "1" else "id", ""
    else:
        perm, word = "id", text
    return normal_form(perm.strip() or "id", word)


# -- verification ----------------------------------------------------------------

@dataclass
class Section:
    name: str
    status: str
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class VerificationReport:
    sections: list[Section]
    pencil_table: list[dict]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sections)

    @property
    def exit_status(self) -> int:
        return EXIT_OK if self.passed else EXIT_VERIFY

    def to_json(self) -> dict:
        return {
            "sections": [{"name": s.name, "status": s.status, "details": s.details} for s in self.sections],
            "summary": {"pass": sum(s.passed for s in self.sections),
                        "fail": sum(not s.passed for s in self.sections)},
            "pencil_table": self.pencil_table,
            "exit_status": self.exit_status,
        }


def _section(name: str, fn: Callable[[], tuple[bool, dict]]) -> Section:
    try:
        ok, details = fn()
    except (DiagramError, ModelError, LatticeError, OrbitError, AssertionError, KeyError, ValueError) as exc:
        return Section(name, "fail", {"error": f"{type(exc).__name__}: {exc}"})
    return Section(name, "pass" if ok else "fail", details)


def run_verification(m: EnriquesModel, max_degree: int = 4) -> VerificationReport:
    sections: list[Section] = []
    add = sections.append
    cache: dict = {}

    def diagram():
        if "d" not in cache:
            cache["d"] = build_diagram(m)
        return cache["d"]

    def parabolics():
        if "p" not in cache:
            cache["p"] = enumerate_max_parabolics(diagram())
        return cache["p"]

    def tables():
        rep = verify_tables(m)
        fig = figure_6b_crosscheck(m)
        return rep.passed and not fig, {"checks": [c.describe() for c in rep.checks],
                                        "six_b_figure_disagreements": [list(map(str, x)) for x in fig]}

    add(_section("model tables", tables))

    def det():
        d = determinant(m.gram10)
        return d == -64, {"determinant": _frac(d)}

    add(_section("determinant -64", det))

    def dotted():
        d = diagram()
        bad = [(str(d.vertices[a]), str(d.vertices[b]), d.weights[a][b])
               for a in range(20) for b in range(20) if d.weights[a][b] not in (0, 1, 2)]
        return not bad, {"weights": sorted({w for r in d.weights for w in r})}

    add(_section("no dotted or Lanner subdiagrams", dotted))

    def census():
        table = census_table(parabolics())
        got = {k: (n, sorted(c)) for k, (n, c) in table.items()}
        ok = len(parabolics()) == 29 and set(got) == set(EXPECTED_PARABOLICS) and all(
            got[k] == (n, [c]) for k, (n, c) in EXPECTED_PARABOLICS.items())
        lines = [f"{k}: {n}" for k, (n, _) in sorted(got.items(), key=lambda kv: -kv[1][0])]
        return ok, {"total": len(parabolics()), "census": lines,
                    "vertex_census": {k: [list(c) for c in v[1]] for k, v in sorted(got.items())}}

    add(_section("29 maximal parabolic subdiagrams", census))

    def volume():
        rep = check_finite_volume(diagram())
        return rep.holds, {"connected_parabolics": rep.connected_count,
                           "failures": [[str(v) for v in f] for f in rep.failures]}

    add(_section("finite volume", volume))

    def autos():
        g = diagram_automorphisms(diagram())
        return g.order == 24 and g.equals_index_action, {"order": g.order,
                                                         "equals_index_action": g.equals_index_action}

    add(_section("diagram automorphisms", autos))

    add(_section("parity of 4C products", lambda: (check_parity(m), {})))

    def sigma_formula():
        e = {lab: m.classes[lab] for lab in ALL_LABELS}
        want = tuple(2 * sum(c) for c in zip(*(e[label(s)] for s in ("E1", "E12", "E2", "E23", "E3", "E13"))))
        want = tuple(a - b for a, b in zip(want, e[label("E4")]))
        ok = apply_word(m, [4], e[label("E4")]) == want
        fixed = all(apply_word(m, [i], e[lab]) == e[lab]
                    for i in range(1, 5) for lab in E_VERTEX + E_EDGE
                    if lab.family == "E_edge" or lab.indices != (i,))
        return ok and fixed, {"sigma4_E4": _vec(apply_word(m, [4], e[label("E4")])), "fixes_others": fixed}

    add(_section("sigma_4 action", sigma_formula))

    def curves():
        six = {str(lab): sextuple(m.classes[lab], m) for lab in CURVE_LABELS}
        distinct = len(set(six.values())) == 16
        g_ok = all(not classify_curve_class(m.classes[lab], m).is_curve for lab in G_LABELS)
        return distinct and g_ok, {"distinct_sextuples": distinct, "G_not_curves": g_ok}

    add(_section("16 curve classes inequivalent", curves))

    def rays():
        ps = pencil_types(m)
        return len(ps) == 29 and len({p.f for p in ps}) == 29, {"rays": len({p.f for p in ps})}

    add(_section("29 pencil rays distinct", rays))

    rows = pencil_table_rows(m)

    def fibre_table():
        got = [(r["type"], r["fiber_types"], int(r["mw_rank"]), r["count"]) for r in rows]
        want = [(t, f.replace("2", "", 1) if f.startswith("2") else f, mw, n) for t, f, mw, n in PENCIL_TABLE]
        return got == want, {"rows": [list(x) for x in got]}

    add(_section("pencil table fiber types / MW / counts", fibre_table))

    def multiple_fibres():
        flagged = sorted({(p.type_index, str(c.type)) for p in pencil_types(m) for c in p.components
                          if c.is_multiple})
        return flagged == [(5, "A5~")], {"multiple_components": [f"type {t}: {c}" for t, c in flagged],
                                         "expected": ["type 5: A5~"]}

    add(_section("pencil table multiple-fiber pattern", multiple_fibres))

    def bounded():
        cc = curve_census(m, max_degree)
        pc = pencil_census(m, max_degree)
        inv = curve_lattice_invariants(m)
        ok = (cc.sextuple_mismatches == 0 and not pc.off_census
              and sum(pc.chamber_hits.values()) == pc.total)
        return ok, {"max_degree": max_degree, "lattice": "curve lattice (index 2 in the unimodular lattice)"
                    if inv[-1] == 2 else "curve lattice",
                    "minus2_vectors": cc.total, "curve_orbits": cc.total - cc.not_curve,
                    "isotropic_primitive": pc.total, "nef_after_sigma": sum(pc.nef_after_sigma.values()),
                    "not_nef": pc.not_nef, "chamber_on_census_ray": sum(pc.chamber_hits.values())}

    add(_section("bounded enumeration cross-checks", bounded))
    return VerificationReport(sections, rows)


def _format_pencil_table(rows: list[dict]) -> str:
    out = io.StringIO()
    out.write(f"{'type':<5}{'singular fibers':<20}{'MW rank':<9}{'number':<6}\n")
    for r in rows:
        out.write(f"{r['type']:<5}{r['singular_fibers']:<20}{r['mw_rank']:<9}{r['count']:<6}\n")
    return out.getvalue()


def pencil_table_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["type", "singular_fibers", "mw_rank", "count"])
    for r in rows:
        w.writerow([r["type"], r["singular_fibers"], r["mw_rank"], r["count"]])
    return buf.getvalue()


# -- subcommands -------------------------------------------------------------------

def _emit(args, data, text: str | None = None) -> None:
    if args.json or text is None:
        print(json.dumps(data, indent=2, sort_keys=False))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def cmd_verify(args, m: EnriquesModel) -> int:
    rep = run_verification(m, args.max_degree or 4)
    if args.json:
        print(json.dumps(rep.to_json(), indent=2))
    else:
        for s in rep.sections:
            print(f"[{s.status.upper():4}] {s.name}")
            if s.name.startswith("29 maximal") and "census" in s.details:
                for line in s.details["census"]:
                    print(f"       {line}")
            if not s.passed:
                print(f"       {json.dumps(s.details)}")
        print()
        print(_format_pencil_table(rep.pencil_table), end="")
    return rep.exit_status


def cmd_gram(args, m: EnriquesModel) -> int:
    names = [str(v) for v in ALL_LABELS]
    data = {"labels": names, "gram": [[_frac(x) for x in row] for row in m.gram20]}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([""] + names)
    for n, row in zip(names, m.gram20):
        w.writerow([n] + [_frac(x) for x in row])
    _emit(args, data, buf.getvalue())
    return EXIT_OK


def cmd_parabolics(args, m: EnriquesModel) -> int:
    ps = enumerate_max_parabolics(build_diagram(m))
    data = {"count": len(ps), "parabolics": [p.to_json() for p in ps]}
    lines = [f"{len(ps)} maximal parabolic subdiagrams"]
    for k, (n, c) in sorted(census_table(ps).items(), key=lambda kv: -kv[1][0]):
        lines.append(f"{k}: {n}  census {'/'.join(map(str, sorted(c)[0]))}")
    lines += [f"  {p.type_string:<14} {' '.join(map(str, p.vertices))}" for p in ps]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_automorphisms(args, m: EnriquesModel) -> int:
    g = diagram_automorphisms(build_diagram(m))
    names = [str(v) for v in ALL_LABELS]
    gens = [{names[a]: names[b] for a, b in enumerate(p) if a != b} for p in g.generators]
    data = {"order": g.order, "equals_index_action": g.equals_index_action, "generators": gens}
    _emit(args, data, f"order {g.order}; equals S4 index action: {g.equals_index_action}")
    return EXIT_OK


def cmd_reduce(args, m: EnriquesModel) -> int:
    x = parse_vector(args.vector, m)
    r = sigma_reduce(x, m)
    _emit(args, r.to_json(x))
    return EXIT_OK


def cmd_classify(args, m: EnriquesModel) -> int:
    x = parse_vector(args.vector, m)
    if args.kind == "curve":
        out = classify_curve_class(x, m).to_json()
    else:
        out = classify_pencil(x, m).to_json()
    _emit(args, {"input": _vec(x), **out})
    return EXIT_OK


def cmd_enumerate(args, m: EnriquesModel) -> int:
    vecs = enumerate_vectors(m, args.norm, args.max_degree or 3, primitive=args.primitive,
                             lattice=args.lattice, threads=args.threads)
    rows = []
    for v in vecs:
        row = {"vector": _vec(v), "degree": _frac(m.degree(v))}
        if args.classify:
            if args.norm == -2:
                row["class"] = classify_curve_class(v, m).to_json()
            else:
                row["class"] = classify_pencil(v, m).to_json()
        rows.append(row)
    text = "\n".join(f"{r['degree']}: {','.join(r['vector'])}" for r in rows) + f"\n# {len(rows)} vectors"
    _emit(args, {"norm": args.norm, "max_degree": args.max_degree or 3, "count": len(rows), "vectors": rows},
          text)
    return EXIT_OK


def cmd_ball(args, m: EnriquesModel) -> int:
    ball = orbit_ball(m, max_word_len=args.max_word_len)
    rep = verify_orbit_characterizations(ball)
    entries = [{"curve": str(e.curve), "property": e.property, "expected": e.expected,
                "found": e.witness is not None, "passed": e.passed,
                "witness": [_vec(v) for v in e.witness] if e.witness else None} for e in rep.entries]
    data = {"max_word_len": args.max_word_len, "vertices": len(ball), "entries": entries,
            "passed": rep.passed, "note": "non-existence is checked inside the bounded ball only"}
    lines = [f"{len(ball)} curve classes within word length {args.max_word_len}"]
    lines += [f"{e['curve']:<4} {e['property']:<8} {'found' if e['found'] else 'none':<6} "
              f"{'ok' if e['passed'] else 'FAIL'}" for e in entries]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK if rep.passed else EXIT_VERIFY


def cmd_group(args, m: EnriquesModel) -> int:
    if args.action == "faithfulness":
        n, distinct = faithfulness_check(m, args.max_word_len)
        _emit(args, {"max_word_len": args.max_word_len, "normal_forms": n, "distinct_matrices": distinct},
              f"{n} normal forms, {distinct} distinct isometries")
        return EXIT_OK if n == distinct else EXIT_VERIFY
    if not args.elements:
        raise ParseError("group needs at least one element")
    elems = [parse_element(t) for t in args.elements]
    if args.action == "mul":
        g = elems[0]
        for h in elems[1:]:
            g = g * h
    elif args.action == "inv":
        g = inverse(elems[0])
    else:
        g = elems[0]
    data = g.to_json()
    if args.action == "isometry":
        data["matrix"] = [[_frac(x) for x in row] for row in to_isometry(g, m)]
    _emit(args, data, str(g))
    return EXIT_OK


def cmd_report(args, m: EnriquesModel) -> int:
    from . import figures

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rep = run_verification(m, args.max_degree or 4)
    (out / "verify.json").write_text(json.dumps(rep.to_json(), indent=2) + "\n")
    (out / "pencil_types.csv").write_text(pencil_table_csv(rep.pencil_table))
    d = build_diagram(m)
    ps = enumerate_max_parabolics(d)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "type", "vertices", "census_10A", "census_6B", "census_4C"])
    for k, p in enumerate(ps):
        w.writerow([k, p.type_string, " ".join(map(str, p.vertices)), *p.census_counts])
    (out / "parabolics.csv").write_text(buf.getvalue())
    lengths = list(range(args.max_word_len + 1))
    sizes = [len(orbit_ball(m, max_word_len=n)) for n in lengths]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["max_word_len", "vertices"])
    w.writerows(zip(lengths, sizes))
    (out / "ball_growth.csv").write_text(buf.getvalue())
    counts = {k: n for k, (n, _) in sorted(census_table(ps).items(), key=lambda kv: -kv[1][0])}
    written = [
        figures.draw_coxeter_diagram(d, out / "coxeter_diagram.png"),
        figures.draw_census(counts, out / "parabolic_census.png"),
        figures.draw_ball_growth(lengths, sizes, out / "ball_growth.png"),
    ]
    names = ["verify.json", "pencil_types.csv", "parabolics.csv", "ball_growth.csv"] + [p.name for p in written]
    _emit(args, {"out": str(out), "files": names, "verify_exit_status": rep.exit_status},
          "\n".join(str(out / n) for n in names))
    return EXIT_OK


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--model", metavar="FILE", help="model JSON (default: bundled golden model)")
    common.add_argument("--max-degree", type=int, metavar="N")
    common.add_argument("--max-word-len", type=int, default=1, metavar="N")
    common.add_argument("--threads", type=int, default=1, metavar="N")

    p = argparse.ArgumentParser(prog="enriques-lattice", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run every check; exit 1 on any failure")
    sub.add_parser("gram", parents=[common], help="20x20 intersection matrix")
    sub.add_parser("parabolics", parents=[common], help="maximal parabolic subdiagrams")
    sub.add_parser("automorphisms", parents=[common], help="diagram symmetry group")
    r = sub.add_parser("reduce", parents=[common], help="sigma-reduce a class")
    r.add_argument("vector")
    c = sub.add_parser("classify", parents=[common], help="classify a (-2)- or isotropic class")
    c.add_argument("kind", choices=["curve", "pencil"])
    c.add_argument("vector")
    e = sub.add_parser("enumerate", parents=[common], help="bounded-degree vectors")
    e.add_argument("--norm", type=int, choices=[-2, 0], default=-2)
    e.add_argument("--primitive", action="store_true")
    e.add_argument("--lattice", choices=["curve", "numerical"], default="curve")
    e.add_argument("--classify", action="store_true")
    sub.add_parser("ball", parents=[common], help="bounded curve graph and its characterizations")
    g = sub.add_parser("group", parents=[common], help="word arithmetic in S4 x| F")
    g.add_argument("action", choices=["mul", "inv", "show", "isometry", "faithfulness"])
    g.add_argument("elements", nargs="*", help='elements such as "(1 2) . s1 s3"')
    rp = sub.add_parser("report", parents=[common], help="write CSV/JSON tables and figures")
    rp.add_argument("--out", default="report", metavar="DIR")
    return p


COMMANDS = {
    "verify": cmd_verify, "gram": cmd_gram, "parabolics": cmd_parabolics,
    "automorphisms": cmd_automorphisms, "reduce": cmd_reduce, "classify": cmd_classify,
    "enumerate": cmd_enumerate, "ball": cmd_ball, "group": cmd_group, "report": cmd_report,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        m = load_model(args.model)
    except (OSError, json.JSONDecodeError, ModelError, LatticeError, KeyError, ValueError) as exc:
        print(f"error: cannot load model: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        return COMMANDS[args.command](args, m)
    except (ParseError, WordError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OrbitError, LatticeError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
