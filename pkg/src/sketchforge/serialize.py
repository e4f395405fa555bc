"""Stable text and JSON encodings for sketches, trees and algebras.

JSON outputs sort keys and lists so identical inputs produce byte-identical
documents.  Tree text uses the parenthesized form ``(p1, p2) -> mu.1`` read
bottom-up: the children feed the generator edge, whose output coordinate
follows the dot.  Leaf labels ``pK`` always denote projections of the tree's
declared domain.
"""

from __future__ import annotations

import json
import re

from .algebra import FinSetAlgebra, SortedAlgebra
from .completion import Branch, GenLabel, LabeledTree, LeafLabel, TreeTuple
from .core import ExplicitCategory, FreeCategory, Word
from .errors import SketchforgeError
from .sketches import Cone, FreeSemiTheory, Sketch, SortedStructure


def canonical_token(x) -> str:
    """A readable, injective string form for object and morphism names."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return repr(x)
    if isinstance(x, int):
        return f"[{x}]"
    if isinstance(x, tuple):
        return "(" + ",".join(canonical_token(p) for p in x) + ")"
    return repr(x)


def elem_to_json(x):
    if isinstance(x, tuple):
        return [elem_to_json(p) for p in x]
    return x


def elem_from_json(x):
    if isinstance(x, list):
        return tuple(elem_from_json(p) for p in x)
    return x


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


# ---------------------------------------------------------------------------
# sketches
# ---------------------------------------------------------------------------


def sketch_to_json(s: Sketch, sorted_structure: SortedStructure | None = None) -> dict:
    cat = s.cat
    if isinstance(cat, ExplicitCategory):
        data = {
            "kind": "explicit",
            "objects": [canonical_token(o) for o in cat.objects()],
            "morphisms": [
                {
                    "name": canonical_token(f),
                    "dom": canonical_token(cat.dom(f)),
                    "cod": canonical_token(cat.cod(f)),
                }
                for f in cat.morphism_names()
            ],
            "identities": {
                canonical_token(o): canonical_token(cat.identity(o)) for o in cat.objects()
            },
            "compose": sorted(
                [
                    [canonical_token(f), canonical_token(g), canonical_token(cat.compose(f, g))]
                    for f in cat.morphism_names()
                    for g in cat.morphism_names()
                    if cat.cod(f) == cat.dom(g)
                ]
            ),
        }
        proj = canonical_token
    elif isinstance(cat, FreeCategory):
        data = {
            "kind": "free",
            "objects": [canonical_token(o) for o in cat.objects()],
            "generators": [
                {"name": g.name, "dom": canonical_token(g.dom), "cod": canonical_token(g.cod)}
                for g in cat.generators()
            ],
        }

        def proj(w: Word) -> str:
            return ".".join(g.name for g in w.letters) or "<id>"

    else:
        raise SketchforgeError("only explicit and free sketches serialize to JSON")
    data["cones"] = [
        {
            "name": c.name,
            "apex": canonical_token(c.apex),
            "legs": [canonical_token(l) for l in c.legs],
            "projections": [proj(p) for p in c.projections],
        }
        for c in s.cones
    ]
    if sorted_structure is not None:
        data["sorts"] = [canonical_token(x) for x in sorted_structure.sorts]
        data["object_index"] = sorted(
            [
                [[canonical_token(x) for x in t], canonical_token(o)]
                for t, o in sorted_structure.object_index.items()
            ]
        )
    return data


_NAME_RE = re.compile(r"[^A-Za-z0-9_]")


def _sanitize(token: str, taken: dict) -> str:
    base = _NAME_RE.sub("_", token).strip("_") or "x"
    if base[0].isdigit():
        base = "n" + base
    name = base
    i = 1
    while name in taken and taken[name] != token:
        name = f"{base}_{i}"
        i += 1
    taken[name] = token
    return name


def sketch_to_dsl(s: Sketch, name: str = "emitted") -> str:
    """Render a sketch as a DSL document.

    Free sketches round-trip; explicit sketches are emitted as the free
    presentation on their non-identity morphisms (the composition table does
    not fit the grammar and is noted in a comment; JSON keeps it).
    """
    lines = [f"sketch {name} {{"]
    taken: dict = {}
    cat = s.cat
    if isinstance(cat, ExplicitCategory):
        obj_names = {o: _sanitize(canonical_token(o), taken) for o in cat.objects()}
        lines.append("  # explicit category: composition table omitted, see JSON output")
        for o in cat.objects():
            lines.append(f"  object {obj_names[o]}")
        mor_names = {}
        for f in cat.morphism_names():
            if cat.is_identity(f):
                continue
            mor_names[f] = _sanitize(canonical_token(f), taken)
            m = cat.morphism(f)
            lines.append(
                f"  gen {mor_names[f]} : {obj_names[m.dom]} -> {obj_names[m.cod]}"
            )
        for c in s.cones:
            legs = []
            for leg, p in zip(c.legs, c.projections):
                if cat.is_identity(p):
                    # identity projections cannot be spelled as a path; alias them
                    alias = _sanitize(canonical_token(p), taken)
                    lines.insert(
                        2, f"  gen {alias} : {obj_names[leg]} -> {obj_names[leg]}"
                    )
                    mor_names[p] = alias
                legs.append(f"{obj_names[leg]} via {mor_names[p]}")
            body = ", ".join(legs)
            lines.append(f"  cone {_sanitize(c.name, taken)} : {obj_names[c.apex]} => ({body})")
    elif isinstance(cat, FreeCategory):
        obj_names = {o: _sanitize(canonical_token(o), taken) for o in cat.objects()}
        for o in cat.objects():
            lines.append(f"  object {obj_names[o]}")
        for g in cat.generators():
            lines.append(f"  gen {g.name} : {obj_names[g.dom]} -> {obj_names[g.cod]}")
        for c in s.cones:
            legs = ", ".join(
                f"{obj_names[leg]} via {'.'.join(x.name for x in p.letters)}"
                for leg, p in zip(c.legs, c.projections)
            )
            lines.append(f"  cone {c.name} : {obj_names[c.apex]} => ({legs})")
    else:
        raise SketchforgeError("cannot emit a lazy category as DSL")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------


def _branch_to_text(b: Branch) -> str:
    if isinstance(b.label, LeafLabel):
        return f"p{b.label.k}"
    inner = ", ".join(_branch_to_text(c) for c in b.children)
    return f"({inner}) -> {b.label.gen.name}.{b.label.coord}"


def tree_to_text(t: LabeledTree) -> str:
    dom = ",".join(str(s) for s in t.domain)
    return f"tree dom=({dom}) cod={t.cod_sort} : {_branch_to_text(t.root)}"


_TREE_TOKEN = re.compile(r"\s*(->|[(),.:=]|[A-Za-z_][A-Za-z0-9_]*|\d+)")


def tree_from_text(theory: FreeSemiTheory, text: str) -> LabeledTree:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TREE_TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise SketchforgeError(f"bad tree syntax at {text[pos:pos+10]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    it = iter(tokens)
    buf: list[str] = list(tokens)
    idx = [0]

    def peek():
        return buf[idx[0]] if idx[0] < len(buf) else None

    def take(expected=None):
        t = peek()
        if t is None or (expected is not None and t != expected):
            raise SketchforgeError(f"expected {expected!r}, found {t!r}")
        idx[0] += 1
        return t

    take("tree")
    take("dom")
    take("=")
    take("(")
    domain = []
    while peek() != ")":
        domain.append(take())
        if peek() == ",":
            take(",")
    take(")")
    take("cod")
    take("=")
    cod = take()
    take(":")

    def branch() -> Branch:
        t = peek()
        if t == "(":
            take("(")
            children = [branch()]
            while peek() == ",":
                take(",")
                children.append(branch())
            take(")")
            take("->")
            name = take()
            take(".")
            coord = int(take())
            return Branch(GenLabel(theory.generator(name), coord), tuple(children))
        tok = take()
        m = re.fullmatch(r"p(\d+)", tok)
        if m is None:
            raise SketchforgeError(f"expected a leaf pK or '(', found {tok!r}")
        return Branch(LeafLabel(int(m.group(1))))

    root = branch()
    return LabeledTree(tuple(domain), cod, root)


def tree_to_json(t: LabeledTree) -> dict:
    nodes = []

    def walk(b: Branch, parent: int) -> None:
        me = len(nodes)
        if isinstance(b.label, LeafLabel):
            label = f"p{b.label.k}"
        else:
            label = f"{b.label.gen.name}.{b.label.coord}"
        nodes.append({"id": me, "parent": parent, "label": label})
        for c in b.children:
            walk(c, me)

    walk(t.root, -1)
    return {"dom": list(t.domain), "cod": t.cod_sort, "nodes": nodes}


def tree_from_json(theory: FreeSemiTheory, data: dict) -> LabeledTree:
    children: dict[int, list[int]] = {}
    labels: dict[int, str] = {}
    for node in data["nodes"]:
        labels[node["id"]] = node["label"]
        children.setdefault(node["parent"], []).append(node["id"])
    for kids in children.values():
        kids.sort()

    def build(i: int) -> Branch:
        label = labels[i]
        m = re.fullmatch(r"p(\d+)", label)
        kids = tuple(build(j) for j in children.get(i, ()))
        if m is not None:
            if kids:
                return Branch(LeafLabel(int(m.group(1))), kids)
            return Branch(LeafLabel(int(m.group(1))))
        name, coord = label.rsplit(".", 1)
        return Branch(GenLabel(theory.generator(name), int(coord)), kids)

    roots = children.get(-1, [])
    if len(roots) != 1:
        raise SketchforgeError("tree JSON must have exactly one root")
    return LabeledTree(tuple(data["dom"]), data["cod"], build(roots[0]))


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------


def algebra_to_json(cat, a: FinSetAlgebra) -> dict:
    return {
        "kind": "explicit",
        "carriers": {
            canonical_token(o): [elem_to_json(x) for x in elems]
            for o, elems in a.carrier.items()
        },
        "actions": {
            canonical_token(f): sorted(
                [[elem_to_json(x), elem_to_json(y)] for x, y in table.items()],
                key=lambda p: json.dumps(p[0], sort_keys=True),
            )
            for f, table in a.action.items()
        },
    }


def algebra_from_json(cat, data: dict) -> FinSetAlgebra:
    by_token_obj = {canonical_token(o): o for o in cat.objects()}
    by_token_mor = {canonical_token(f): f for f in cat.morphism_names()}
    carrier = {}
    for token, elems in data["carriers"].items():
        if token not in by_token_obj:
            raise SketchforgeError(f"unknown object {token!r}")
        carrier[by_token_obj[token]] = tuple(elem_from_json(x) for x in elems)
    action = {}
    for token, pairs in data["actions"].items():
        if token not in by_token_mor:
            raise SketchforgeError(f"unknown morphism {token!r}")
        action[by_token_mor[token]] = {
            elem_from_json(x): elem_from_json(y) for x, y in pairs
        }
    return FinSetAlgebra(carrier, action)


def sorted_algebra_to_json(a: SortedAlgebra) -> dict:
    return {
        "kind": "sorted",
        "carriers": {
            canonical_token(t): [elem_to_json(x) for x in elems]
            for t, elems in a.carriers.items()
        },
        "projections": {
            f"{canonical_token(t)}#{k}": sorted(
                [[elem_to_json(x), elem_to_json(y)] for x, y in table.items()],
                key=lambda p: json.dumps(p[0], sort_keys=True),
            )
            for (t, k), table in a.proj_action.items()
        },
        "generators": {
            name: sorted(
                [[elem_to_json(x), elem_to_json(y)] for x, y in table.items()],
                key=lambda p: json.dumps(p[0], sort_keys=True),
            )
            for name, table in a.gen_action.items()
        },
    }


def sorted_algebra_from_json(theory: FreeSemiTheory, data: dict) -> SortedAlgebra:
    def parse_tuple(token: str) -> tuple:
        inner = token.strip()
        if not (inner.startswith("(") and inner.endswith(")")):
            raise SketchforgeError(f"bad tuple token {token!r}")
        inner = inner[1:-1]
        return tuple(p for p in inner.split(",") if p)

    carriers = {
        parse_tuple(token): tuple(elem_from_json(x) for x in elems)
        for token, elems in data["carriers"].items()
    }
    proj_action = {}
    for key, pairs in data.get("projections", {}).items():
        token, k = key.rsplit("#", 1)
        proj_action[(parse_tuple(token), int(k))] = {
            elem_from_json(x): elem_from_json(y) for x, y in pairs
        }
    gen_action = {
        name: {elem_from_json(x): elem_from_json(y) for x, y in pairs}
        for name, pairs in data.get("generators", {}).items()
    }
    return SortedAlgebra(carriers=carriers, proj_action=proj_action, gen_action=gen_action)
