"""Parser, printer and diagnostics for the sketch description language.

Grammar (line comments start with ``#``)::

    document := "sketch" NAME "{" item* "}"
    item     := sorts | object | gen | cone
    sorts    := "sorts" NAME+
    object   := "object" NAME ["@" tuple]
    gen      := "gen" NAME ":" NAME "->" NAME
    cone     := "cone" NAME ":" NAME "=>" "(" leg ("," leg)* ")"
              | "cone" NAME ":" NAME "=>" "()"
    leg      := NAME "via" PATH
    tuple    := "(" NAME* ")"
    PATH     := NAME ("." NAME)*

Paths compose left to right: "f.g" is f then g.  Errors do not abort the
parse; the parser records a diagnostic and resynchronizes at the next item
keyword, so one pass reports every problem with a source span.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import Generator, Word, free_category
from .sketches import (
    Cone,
    FreeSemiTheory,
    Sketch,
    SortGenerator,
    SortedStructure,
)
from .errors import SketchforgeError

ITEM_KEYWORDS = ("sorts", "object", "gen", "cone")


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int
    start: int
    end: int

    def slice(self, text: str) -> str:
        return text[self.start : self.end]


@dataclass
class Diagnostic:
    severity: str
    span: Span
    message: str
    rule: str

    def render(self) -> str:
        return (
            f"{self.severity}[{self.rule}] {self.span.line}:{self.span.col}: {self.message}"
        )


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


def _tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    diagnostics: list[Diagnostic] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def span(start_i, start_line, start_col, end_i, end_line, end_col):
        return Span(start_line, start_col, end_line, end_col, start_i, end_i)

    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        start = (i, line, col)
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            tokens.append(
                Token("name", word, span(i, line, col, j, line, col + (j - i)))
            )
            col += j - i
            i = j
            continue
        if text.startswith("->", i):
            tokens.append(Token("arrow", "->", span(i, line, col, i + 2, line, col + 2)))
            i += 2
            col += 2
            continue
        if text.startswith("=>", i):
            tokens.append(Token("darrow", "=>", span(i, line, col, i + 2, line, col + 2)))
            i += 2
            col += 2
            continue
        if c in "{}():,@.":
            kind = {
                "{": "lbrace",
                "}": "rbrace",
                "(": "lparen",
                ")": "rparen",
                ":": "colon",
                ",": "comma",
                "@": "at",
                ".": "dot",
            }[c]
            tokens.append(Token(kind, c, span(i, line, col, i + 1, line, col + 1)))
            i += 1
            col += 1
            continue
        diagnostics.append(
            Diagnostic(
                "error",
                span(i, line, col, i + 1, line, col + 1),
                f"unexpected character {c!r}",
                "bad-char",
            )
        )
        i += 1
        col += 1
    eof = Span(line, col, line, col, n, n)
    tokens.append(Token("eof", "", eof))
    return tokens, diagnostics


@dataclass
class LegDecl:
    obj: str
    path: tuple[str, ...]
    span: Span


@dataclass
class ConeDecl:
    name: str
    apex: str
    legs: tuple[LegDecl, ...]
    span: Span


@dataclass
class ObjectDecl:
    name: str
    sort_tuple: tuple[str, ...] | None
    span: Span


@dataclass
class GenDecl:
    name: str
    dom: str
    cod: str
    span: Span


@dataclass
class SketchDocument:
    name: str
    sorts: tuple[str, ...] = ()
    objects: tuple[ObjectDecl, ...] = ()
    gens: tuple[GenDecl, ...] = ()
    cones: tuple[ConeDecl, ...] = ()

    def key(self):
        """Span-free normal form, used for round-trip comparison."""
        return (
            self.name,
            self.sorts,
            tuple((o.name, o.sort_tuple) for o in self.objects),
            tuple((g.name, g.dom, g.cod) for g in self.gens),
            tuple(
                (c.name, c.apex, tuple((l.obj, l.path) for l in c.legs))
                for c in self.cones
            ),
        )

    # -- conversions ---------------------------------------------------------

    def to_sketch(self) -> Sketch:
        gens = {g.name: Generator(g.name, g.dom, g.cod) for g in self.gens}
        cat = free_category([o.name for o in self.objects], list(gens.values()))
        cones = []
        for c in self.cones:
            projections = []
            for leg in c.legs:
                letters = tuple(gens[p] for p in leg.path if p in gens)
                if len(letters) != len(leg.path):
                    raise SketchforgeError(f"cone {c.name!r} path has unknown generator")
                dom = letters[0].dom if letters else c.apex
                cod = letters[-1].cod if letters else c.apex
                projections.append(Word(dom, cod, letters))
            cones.append(
                Cone(c.name, c.apex, tuple(l.obj for l in c.legs), tuple(projections))
            )
        return Sketch(cat, tuple(cones))

    def to_sorted_structure(self) -> SortedStructure | None:
        if not self.sorts:
            return None
        index = {}
        for o in self.objects:
            if o.sort_tuple is not None:
                index[o.sort_tuple] = o.name
        if not index:
            return None
        return SortedStructure(self.sorts, index)

    def to_free_semitheory(self) -> FreeSemiTheory:
        """View the document as a free semi-theory presentation.

        Requires sorts, a tuple index on every object, and single-generator
        cone legs; generators used as cone projections become the implicit
        tuple projections, the rest are the theory's generators.
        """
        if not self.sorts:
            raise SketchforgeError("free semi-theory needs a sorts declaration")
        tuple_of: dict[str, tuple[str, ...]] = {}
        for o in self.objects:
            if o.sort_tuple is None:
                raise SketchforgeError(f"object {o.name!r} has no tuple index")
            tuple_of[o.name] = o.sort_tuple
        projection_names: set[str] = set()
        for c in self.cones:
            for leg in c.legs:
                if len(leg.path) != 1:
                    raise SketchforgeError(
                        f"cone {c.name!r} projections must be single generators"
                    )
                projection_names.add(leg.path[0])
        generators = []
        for g in self.gens:
            if g.name in projection_names:
                continue
            generators.append(SortGenerator(g.name, tuple_of[g.dom], tuple_of[g.cod]))
        return FreeSemiTheory(self.sorts, generators)


@dataclass
class ParseResult:
    document: SketchDocument | None
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None and not any(
            d.severity == "error" for d in self.diagnostics
        )


class _Parser:
    def __init__(self, tokens: list[Token], diagnostics: list[Diagnostic]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics = diagnostics

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, rule: str, span: Span | None = None) -> None:
        self.diagnostics.append(
            Diagnostic("error", span or self.peek().span, message, rule)
        )

    def expect(self, kind: str, what: str, rule: str = "syntax") -> Token | None:
        t = self.peek()
        if t.kind != kind:
            self.error(f"expected {what}, found {t.text or 'end of input'!r}", rule)
            return None
        return self.advance()

    def expect_keyword(self, word: str) -> Token | None:
        t = self.peek()
        if t.kind != "name" or t.text != word:
            self.error(f"expected {word!r}", "syntax")
            return None
        return self.advance()

    def sync(self) -> None:
        while True:
            t = self.peek()
            if t.kind == "eof" or t.kind == "rbrace":
                return
            if t.kind == "name" and t.text in ITEM_KEYWORDS:
                return
            self.advance()

    def parse(self) -> SketchDocument | None:
        if self.expect_keyword("sketch") is None:
            return None
        name_tok = self.expect("name", "sketch name")
        if name_tok is None:
            return None
        if self.expect("lbrace", "'{'") is None:
            return None
        sorts: list[str] = []
        objects: list[ObjectDecl] = []
        gens: list[GenDecl] = []
        cones: list[ConeDecl] = []
        while True:
            t = self.peek()
            if t.kind == "rbrace":
                self.advance()
                break
            if t.kind == "eof":
                self.error("unexpected end of input; missing '}'", "syntax")
                break
            if t.kind == "name" and t.text == "sorts":
                self.advance()
                if self.peek().kind != "name":
                    self.error("sorts needs at least one name", "syntax")
                    self.sync()
                    continue
                while self.peek().kind == "name" and self.peek().text not in ITEM_KEYWORDS:
                    sorts.append(self.advance().text)
                continue
            if t.kind == "name" and t.text == "object":
                decl = self.parse_object()
                if decl is None:
                    self.sync()
                else:
                    objects.append(decl)
                continue
            if t.kind == "name" and t.text == "gen":
                decl = self.parse_gen()
                if decl is None:
                    self.sync()
                else:
                    gens.append(decl)
                continue
            if t.kind == "name" and t.text == "cone":
                decl = self.parse_cone()
                if decl is None:
                    self.sync()
                else:
                    cones.append(decl)
                continue
            self.error(f"expected an item, found {t.text!r}", "syntax")
            self.advance()
            self.sync()
        doc = SketchDocument(
            name_tok.text, tuple(sorts), tuple(objects), tuple(gens), tuple(cones)
        )
        self._resolve(doc)
        return doc

    def parse_object(self) -> ObjectDecl | None:
        kw = self.advance()
        name = self.expect("name", "object name")
        if name is None:
            return None
        sort_tuple = None
        if self.peek().kind == "at":
            self.advance()
            if self.expect("lparen", "'('") is None:
                return None
            parts = []
            while self.peek().kind == "name":
                parts.append(self.advance().text)
            if self.expect("rparen", "')'") is None:
                return None
            sort_tuple = tuple(parts)
        return ObjectDecl(name.text, sort_tuple, _join(kw.span, name.span))

    def parse_gen(self) -> GenDecl | None:
        kw = self.advance()
        name = self.expect("name", "generator name")
        if name is None or self.expect("colon", "':'") is None:
            return None
        dom = self.expect("name", "domain object")
        if dom is None or self.expect("arrow", "'->'") is None:
            return None
        cod = self.expect("name", "codomain object")
        if cod is None:
            return None
        return GenDecl(name.text, dom.text, cod.text, _join(kw.span, cod.span))

    def parse_cone(self) -> ConeDecl | None:
        kw = self.advance()
        name = self.expect("name", "cone name")
        if name is None or self.expect("colon", "':'") is None:
            return None
        apex = self.expect("name", "apex object")
        if apex is None or self.expect("darrow", "'=>'") is None:
            return None
        if self.expect("lparen", "'('") is None:
            return None
        legs: list[LegDecl] = []
        if self.peek().kind == "rparen":
            close = self.advance()
            return ConeDecl(name.text, apex.text, (), _join(kw.span, close.span))
        while True:
            leg = self.parse_leg()
            if leg is None:
                return None
            legs.append(leg)
            if self.peek().kind == "comma":
                self.advance()
                continue
            break
        close = self.expect("rparen", "')'")
        if close is None:
            return None
        return ConeDecl(name.text, apex.text, tuple(legs), _join(kw.span, close.span))

    def parse_leg(self) -> LegDecl | None:
        obj = self.expect("name", "leg object")
        if obj is None:
            return None
        via = self.peek()
        if via.kind != "name" or via.text != "via":
            self.error("expected 'via'", "syntax")
            return None
        self.advance()
        first = self.expect("name", "path segment")
        if first is None:
            return None
        path = [first.text]
        last = first
        while self.peek().kind == "dot":
            self.advance()
            seg = self.expect("name", "path segment")
            if seg is None:
                return None
            path.append(seg.text)
            last = seg
        return LegDecl(obj.text, tuple(path), _join(obj.span, last.span))

    def _resolve(self, doc: SketchDocument) -> None:
        objects = {o.name for o in doc.objects}
        gens = {g.name for g in doc.gens}
        sorts = set(doc.sorts)
        for o in doc.objects:
            if o.sort_tuple is not None:
                for s in o.sort_tuple:
                    if s not in sorts:
                        self.diagnostics.append(
                            Diagnostic(
                                "error", o.span, f"unknown sort {s!r}", "unresolved-name"
                            )
                        )
        for g in doc.gens:
            for end in (g.dom, g.cod):
                if end not in objects:
                    self.diagnostics.append(
                        Diagnostic(
                            "error", g.span, f"unknown object {end!r}", "unresolved-name"
                        )
                    )
        for c in doc.cones:
            if c.apex not in objects:
                self.diagnostics.append(
                    Diagnostic(
                        "error", c.span, f"unknown object {c.apex!r}", "unresolved-name"
                    )
                )
            for leg in c.legs:
                if leg.obj not in objects:
                    self.diagnostics.append(
                        Diagnostic(
                            "error",
                            leg.span,
                            f"unknown object {leg.obj!r}",
                            "unresolved-name",
                        )
                    )
                for p in leg.path:
                    if p not in gens:
                        self.diagnostics.append(
                            Diagnostic(
                                "error",
                                leg.span,
                                f"unknown generator {p!r}",
                                "unresolved-name",
                            )
                        )


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.col, b.end_line, b.end_col, a.start, b.end)


def parse(text: str) -> ParseResult:
    """Parse a sketch document, collecting diagnostics instead of raising."""
    tokens, diagnostics = _tokenize(text)
    parser = _Parser(tokens, diagnostics)
    doc = parser.parse()
    return ParseResult(doc, parser.diagnostics)


def print_document(doc: SketchDocument) -> str:
    """Canonical text rendering; parses back to an equal document."""
    lines = [f"sketch {doc.name} {{"]
    if doc.sorts:
        lines.append(f"  sorts {' '.join(doc.sorts)}")
    for o in doc.objects:
        if o.sort_tuple is None:
            lines.append(f"  object {o.name}")
        else:
            lines.append(f"  object {o.name} @ ({' '.join(o.sort_tuple)})")
    for g in doc.gens:
        lines.append(f"  gen {g.name} : {g.dom} -> {g.cod}")
    for c in doc.cones:
        if not c.legs:
            lines.append(f"  cone {c.name} : {c.apex} => ()")
        else:
            legs = ", ".join(f"{l.obj} via {'.'.join(l.path)}" for l in c.legs)
            lines.append(f"  cone {c.name} : {c.apex} => ({legs})")
    lines.append("}")
    return "\n".join(lines) + "\n"
