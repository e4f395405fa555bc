"""Command-line interface.

Exit codes: 0 for success or a true verdict, 1 for a false verdict, 2 for
usage, parse or structural errors.  Diagnostics go to stderr; ``--format
json`` makes every output a single stable-ordered JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import algebra as alg
from . import completion, serialize, sketches, transforms
from .core import free_to_explicit
from .dsl import parse as dsl_parse
from .errors import SketchforgeError
from .resolution import enumerate_resolution_words
from .sketches import Sketch, builtin, builtin_sorted_structure


class CliError(Exception):
    pass


def _add_source_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("file", nargs="?", help="sketch DSL file")
    p.add_argument("--builtin", choices=sketches.BUILTIN_NAMES, help="built-in sketch")
    p.add_argument("--trunc", type=int, default=1, help="builtin truncation N")
    p.add_argument("--m", type=int, default=None, help="delta-loop parameter m")


def _load_document(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(str(exc))
    result = dsl_parse(text)
    errors = [d for d in result.diagnostics if d.severity == "error"]
    if errors or result.document is None:
        for d in result.diagnostics:
            print(d.render(), file=sys.stderr)
        raise CliError("parse failed")
    return result.document


def _load_sketch(args) -> tuple[Sketch, object]:
    """Returns (sketch, sorted structure or None)."""
    if args.builtin:
        s = builtin(args.builtin, args.trunc, args.m)
        return s, builtin_sorted_structure(args.builtin, args.trunc)
    if not args.file:
        raise CliError("need a sketch file or --builtin")
    doc = _load_document(args.file)
    return doc.to_sketch(), doc.to_sorted_structure()


def _load_theory(args):
    if args.builtin:
        if args.builtin != "binary":
            raise CliError("only the binary builtin has a free semi-theory fragment")
        return sketches.binary_free_fragment()
    if not args.file:
        raise CliError("need a sketch file or --builtin binary")
    return _load_document(args.file).to_free_semitheory()


def _materialize(s: Sketch) -> Sketch:
    """Turn a free-category sketch into an explicit one when finite."""
    from .core import ExplicitCategory, FreeCategory, _word_name

    if isinstance(s.cat, ExplicitCategory):
        return s
    if not isinstance(s.cat, FreeCategory):
        raise CliError("cannot materialize this category")
    cat = free_to_explicit(s.cat)
    cones = tuple(
        sketches.Cone(
            c.name,
            c.apex,
            c.legs,
            tuple(_word_name(p) for p in c.projections),
        )
        for c in s.cones
    )
    return Sketch(cat, cones)


def _parse_tuple(text: str) -> tuple:
    inner = text.strip()
    if inner.startswith("(") and inner.endswith(")"):
        inner = inner[1:-1]
    return tuple(p.strip() for p in inner.split(",") if p.strip())


def _emit(args, text_lines, json_data) -> None:
    if args.format == "json":
        sys.stdout.write(serialize.dumps(json_data))
    else:
        for line in text_lines:
            print(line)


def _report_lines(report) -> list[str]:
    lines = [f"verdict: {'true' if report.verdict else 'false'}"]
    lines.extend(f"violation {rule}: {data!r}" for rule, data in report.violations)
    return lines


def _report_json(report) -> dict:
    return {
        "verdict": report.verdict,
        "violations": [[rule, repr(data)] for rule, data in report.violations],
    }


def cmd_validate(args) -> int:
    s, _ = _load_sketch(args)
    report = sketches.validate_sketch(s)
    _emit(args, _report_lines(report), _report_json(report))
    return 0 if report.verdict else 1


def cmd_is_semitheory(args) -> int:
    s, sorted_structure = _load_sketch(args)
    if sorted_structure is None:
        raise CliError("sketch has no sorted structure (sorts and object indices)")
    report = sketches.is_semi_theory(s, sorted_structure)
    _emit(args, _report_lines(report), _report_json(report))
    return 0 if report.verdict else 1


def cmd_is_theory(args) -> int:
    s, sorted_structure = _load_sketch(args)
    if sorted_structure is None:
        raise CliError("sketch has no sorted structure (sorts and object indices)")
    s = _materialize(s)
    report = sketches.is_algebraic_theory(s, sorted_structure)
    _emit(args, _report_lines(report), _report_json(report))
    return 0 if report.verdict else 1


def cmd_complete(args) -> int:
    theory = _load_theory(args)
    domain = _parse_tuple(args.domain)
    trees = list(
        completion.enumerate_trees(theory, domain, args.cod, args.max_nodes)
    )
    _emit(
        args,
        [serialize.tree_to_text(t) for t in trees],
        {"count": len(trees), "trees": [serialize.tree_to_json(t) for t in trees]},
    )
    return 0


def cmd_transform(args) -> int:
    s, _ = _load_sketch(args)
    s = _materialize(s)
    if args.resolve is not None:
        return _transform_resolve(args, s)
    mu = transforms.mu_transform(s)
    if args.mu:
        data = serialize.sketch_to_json(mu.sketch)
        data["distinguished"] = sorted(
            serialize.canonical_token(x) for x in mu.canonical_distinguished
        )
        _emit(args, serialize.sketch_to_dsl(mu.sketch, "mu").splitlines(), data)
        return 0
    trunc = args.sigma if args.sigma is not None else args.pipeline[0]
    sigma = transforms.sigma_transform(mu, trunc)
    semi = sigma.semi
    cat = sigma.category
    data = {
        "sorts": [serialize.canonical_token(x) for x in semi.sorted_structure.sorts],
        "objects": [serialize.canonical_token(o) for o in cat.objects()],
        "cones": [
            {
                "name": c.name,
                "apex": serialize.canonical_token(c.apex),
                "legs": [serialize.canonical_token(l) for l in c.legs],
            }
            for c in semi.sketch.cones
        ],
    }
    lines = [f"sigma transform at truncation {sigma.trunc}"]
    lines += [f"object {serialize.canonical_token(o)}" for o in cat.objects()]
    if args.pipeline is not None:
        level = args.pipeline[1]
        data["resolution_level"] = level
        lines.append(f"resolution level {level} over the sigma category (free levels)")
    _emit(args, lines, data)
    return 0


def _transform_resolve(args, s: Sketch) -> int:
    level = args.resolve
    cat = s.cat
    sample = []
    for a in cat.objects():
        for b in cat.objects():
            sample.extend(enumerate_resolution_words(cat, level, a, b, 1))
            if len(sample) > 40:
                break
        if len(sample) > 40:
            break
    data = {
        "level": level,
        "objects": [serialize.canonical_token(o) for o in cat.objects()],
        "truncated": True,
        "word_sample": [_render_word(w) for w in sample[:40]],
    }
    if level == 0:
        data["generators"] = [
            serialize.canonical_token(f) for f in cat.morphism_names()
        ]
        data["truncated"] = False
    lines = [f"resolution level {level}: {len(sample[:40])} sample words"]
    lines += data["word_sample"][:10]
    _emit(args, lines, data)
    return 0


def _render_word(w) -> str:
    if w.level == 0:
        inner = ",".join(serialize.canonical_token(m) for m in w.letters)
        return f"({inner})"
    return "(" + ",".join(_render_word(l) for l in w.letters) + ")"


def _parse_carriers(s: Sketch, specs: list[str]) -> dict:
    tokens = {serialize.canonical_token(o): o for o in s.cat.objects()}
    out = {}
    for spec in specs:
        if "=" not in spec:
            raise CliError(f"bad carrier spec {spec!r}; want OBJ=N")
        name, size = spec.rsplit("=", 1)
        if name not in tokens:
            raise CliError(f"unknown object {name!r}")
        out[tokens[name]] = int(size)
    return out


def cmd_enumerate_algebras(args) -> int:
    s, _ = _load_sketch(args)
    s = _materialize(s)
    carriers = _parse_carriers(s, args.carrier or [])
    algebras = alg.enumerate_strict_algebras(s, carriers)
    lines = [f"count {len(algebras)}"]
    data = {
        "count": len(algebras),
        "algebras": [serialize.algebra_to_json(s.cat, a) for a in algebras],
    }
    _emit(args, lines, data)
    return 0


def cmd_check_algebra(args) -> int:
    s, _ = _load_sketch(args)
    s = _materialize(s)
    try:
        with open(args.algebra_file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(str(exc))
    a = serialize.algebra_from_json(s.cat, data)
    witness = alg.is_strict_algebra(s, a)
    lines = [f"strict: {'true' if witness.verdict else 'false'}"]
    lines += [f"cone {name}: {'ok' if ok else 'not bijective'}" for name, ok in witness.cones]
    _emit(
        args,
        lines,
        {"strict": witness.verdict, "cones": [[n, ok] for n, ok in witness.cones]},
    )
    return 0 if witness.verdict else 1


def cmd_eval_tree(args) -> int:
    try:
        with open(args.file, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(str(exc))
    if "builtin" in data:
        if data["builtin"] != "binary":
            raise CliError("only the binary builtin has a free semi-theory fragment")
        theory = sketches.binary_free_fragment()
    else:
        spec = data["theory"]
        theory = sketches.FreeSemiTheory(
            spec["sorts"],
            [
                sketches.SortGenerator(g["name"], tuple(g["dom"]), tuple(g["cod"]))
                for g in spec["generators"]
            ],
        )
    algebra = serialize.sorted_algebra_from_json(theory, data["algebra"])
    if "tree_text" in data:
        tree = serialize.tree_from_text(theory, data["tree_text"])
    else:
        tree = serialize.tree_from_json(theory, data["tree"])
    tt = completion.TreeTuple(tree.domain, (tree.cod_sort,), (tree,))
    report = completion.tree_validate(tree, theory)
    if not report.verdict:
        for rule, detail in report.violations:
            print(f"invalid tree, condition {rule}: {detail!r}", file=sys.stderr)
        return 2
    table = alg.evaluate_tree(theory, algebra, tt)
    items = sorted(table.items(), key=lambda kv: json.dumps(serialize.elem_to_json(kv[0])))
    lines = [f"{x!r} -> {y!r}" for x, y in items]
    _emit(
        args,
        lines,
        {"table": [[serialize.elem_to_json(x), serialize.elem_to_json(y)] for x, y in items]},
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sketchforge",
        description="finite product sketches, tree completions, strict algebra enumeration",
    )
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled demos")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check cone well-formedness")
    _add_source_args(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("is-semitheory", help="check the sorted semi-theory clauses")
    _add_source_args(p)
    p.set_defaults(fn=cmd_is_semitheory)

    p = sub.add_parser("is-theory", help="check for a multi-sorted algebraic theory")
    _add_source_args(p)
    p.set_defaults(fn=cmd_is_theory)

    p = sub.add_parser("complete", help="enumerate completion trees")
    _add_source_args(p)
    p.add_argument("--domain", required=True, help="domain tuple, e.g. '(s,s)'")
    p.add_argument("--cod", required=True, help="codomain sort")
    p.add_argument("--max-nodes", type=int, default=6)
    p.set_defaults(fn=cmd_complete)

    p = sub.add_parser("transform", help="mu / sigma / resolution transforms")
    _add_source_args(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--mu", action="store_true")
    group.add_argument("--sigma", type=int, metavar="L")
    group.add_argument("--resolve", type=int, metavar="K")
    group.add_argument("--pipeline", type=int, nargs=2, metavar=("L", "K"))
    p.set_defaults(fn=cmd_transform)

    p = sub.add_parser("enumerate-algebras", help="count strict algebras")
    _add_source_args(p)
    p.add_argument("--carrier", action="append", metavar="OBJ=N")
    p.set_defaults(fn=cmd_enumerate_algebras)

    p = sub.add_parser("check-algebra", help="strictness of a JSON algebra")
    p.add_argument("algebra_file")
    _add_source_args(p)
    p.set_defaults(fn=cmd_check_algebra)

    p = sub.add_parser("eval-tree", help="evaluate a tree on an algebra")
    p.add_argument("file")
    p.set_defaults(fn=cmd_eval_tree)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CliError, SketchforgeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
