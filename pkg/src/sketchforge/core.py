"""Small-category representations and brute-force category utilities.

Two concrete representations live here: explicit finite categories (full hom
and composition tables) and free categories on a finite graph (morphisms are
words of generators, equal iff letter sequences are equal).  Lazily generated
categories elsewhere in the library answer the same query interface:
``objects()``, ``hom(a, b, bound)``, ``compose(f, g)``, ``identity(a)``.

Objects are arbitrary hashable tokens (strings for user-declared categories,
ints or tuples for generated ones).  ``compose(f, g)`` always means "f then
g", i.e. the classical g after f; the same left-to-right order is used by the
DSL path syntax.

Everything is immutable after construction and every operation is pure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Iterable

from .errors import EmptyLabelSet, NotComposable, UnknownObject

ObjId = Hashable
MorName = Hashable


@dataclass(frozen=True)
class Morphism:
    """A named arrow of an explicit category."""

    name: MorName
    dom: ObjId
    cod: ObjId


class ExplicitCategory:
    """A small category given by complete hom and composition tables.

    ``morphisms`` lists (name, dom, cod) triples in declaration order,
    ``compose`` maps composable name pairs (f, g) with cod(f) = dom(g) to the
    name of "f then g", and ``identities`` picks the identity name per object.
    Construction verifies totality, endpoint coherence and the unit laws;
    associativity is a separate exhaustive scan (``check_associativity``)
    because it is cubic in hom sizes.
    """

    def __init__(
        self,
        objects: Iterable[ObjId],
        morphisms: Iterable[tuple[MorName, ObjId, ObjId]],
        compose: dict[tuple[MorName, MorName], MorName],
        identities: dict[ObjId, MorName],
        check: bool = True,
    ):
        self._objects = tuple(objects)
        obj_set = set(self._objects)
        if len(obj_set) != len(self._objects):
            raise ValueError("duplicate objects")
        self._mor: dict[MorName, Morphism] = {}
        for name, dom, cod in morphisms:
            if name in self._mor:
                raise ValueError(f"duplicate morphism name {name!r}")
            if dom not in obj_set or cod not in obj_set:
                raise UnknownObject(f"morphism {name!r} has undeclared endpoint")
            self._mor[name] = Morphism(name, dom, cod)
        self._hom: dict[tuple[ObjId, ObjId], tuple[MorName, ...]] = {}
        by_pair: dict[tuple[ObjId, ObjId], list[MorName]] = {}
        for m in self._mor.values():
            by_pair.setdefault((m.dom, m.cod), []).append(m.name)
        self._hom = {k: tuple(v) for k, v in by_pair.items()}
        self._compose = dict(compose)
        self._identities = dict(identities)
        if check:
            self._check_tables()

    def _check_tables(self) -> None:
        for a in self._objects:
            i = self._identities.get(a)
            if i is None or i not in self._mor:
                raise ValueError(f"missing identity for {a!r}")
            m = self._mor[i]
            if m.dom != a or m.cod != a:
                raise ValueError(f"identity of {a!r} has wrong endpoints")
        for (f, g), h in self._compose.items():
            mf, mg = self._mor.get(f), self._mor.get(g)
            if mf is None or mg is None or h not in self._mor:
                raise ValueError("compose table references unknown morphism")
            if mf.cod != mg.dom:
                raise ValueError(f"compose table entry ({f!r}, {g!r}) not composable")
            mh = self._mor[h]
            if mh.dom != mf.dom or mh.cod != mg.cod:
                raise ValueError(f"compose table entry ({f!r}, {g!r}) has wrong endpoints")
        # totality and unit laws
        for mf in self._mor.values():
            for mg in self._mor.values():
                if mf.cod != mg.dom:
                    continue
                if (mf.name, mg.name) not in self._compose:
                    raise ValueError(f"compose table missing ({mf.name!r}, {mg.name!r})")
            if self.compose(self._identities[mf.dom], mf.name) != mf.name:
                raise ValueError(f"left unit law fails at {mf.name!r}")
            if self.compose(mf.name, self._identities[mf.cod]) != mf.name:
                raise ValueError(f"right unit law fails at {mf.name!r}")

    def check_associativity(self) -> bool:
        """Exhaustive triple scan; quadratic memory is avoided, time is cubic."""
        for mf in self._mor.values():
            for g in self.hom_out(mf.cod):
                fg = self.compose(mf.name, g)
                mg_cod = self._mor[g].cod
                for h in self.hom_out(mg_cod):
                    if self.compose(fg, h) != self.compose(mf.name, self.compose(g, h)):
                        return False
        return True

    # -- query interface ----------------------------------------------------

    def objects(self) -> tuple[ObjId, ...]:
        return self._objects

    def morphism_names(self) -> tuple[MorName, ...]:
        return tuple(self._mor)

    def morphism(self, name: MorName) -> Morphism:
        return self._mor[name]

    def dom(self, f: MorName) -> ObjId:
        return self._mor[f].dom

    def cod(self, f: MorName) -> ObjId:
        return self._mor[f].cod

    def hom(self, a: ObjId, b: ObjId, bound: int | None = None) -> tuple[MorName, ...]:
        return self._hom.get((a, b), ())

    def hom_out(self, a: ObjId) -> tuple[MorName, ...]:
        return tuple(m.name for m in self._mor.values() if m.dom == a)

    def compose(self, f: MorName, g: MorName) -> MorName:
        """Return the name of "f then g"."""
        key = (f, g)
        if key not in self._compose:
            if f not in self._mor or g not in self._mor:
                raise NotComposable(f"unknown morphism in ({f!r}, {g!r})")
            raise NotComposable(f"cod({f!r}) != dom({g!r})")
        return self._compose[key]

    def identity(self, a: ObjId) -> MorName:
        if a not in self._identities:
            raise UnknownObject(f"no identity for {a!r}")
        return self._identities[a]

    def is_identity(self, f: MorName) -> bool:
        m = self._mor[f]
        return self._identities.get(m.dom) == f


@dataclass(frozen=True)
class Generator:
    """A generating arrow of a free category."""

    name: str
    dom: ObjId
    cod: ObjId


@dataclass(frozen=True)
class Word:
    """A morphism of a free category: a composable sequence of generators.

    The empty word is the identity; equality is letter-sequence equality.
    Letters apply left to right: ``letters[0]`` first.
    """

    dom: ObjId
    cod: ObjId
    letters: tuple[Generator, ...]

    def __len__(self) -> int:
        return len(self.letters)


class FreeCategory:
    """The free category on a finite graph; morphisms are :class:`Word` values."""

    def __init__(self, objects: Iterable[ObjId], generators: Iterable[Generator]):
        self._objects = tuple(objects)
        obj_set = set(self._objects)
        self._generators = tuple(generators)
        for g in self._generators:
            if g.dom not in obj_set or g.cod not in obj_set:
                raise UnknownObject(f"generator {g.name!r} has undeclared endpoint")

    def objects(self) -> tuple[ObjId, ...]:
        return self._objects

    def generators(self) -> tuple[Generator, ...]:
        return self._generators

    def identity(self, a: ObjId) -> Word:
        if a not in self._objects:
            raise UnknownObject(repr(a))
        return Word(a, a, ())

    def compose(self, f: Word, g: Word) -> Word:
        if f.cod != g.dom:
            raise NotComposable(f"cod {f.cod!r} != dom {g.dom!r}")
        return Word(f.dom, g.cod, f.letters + g.letters)

    def hom(self, a: ObjId, b: ObjId, bound: int) -> tuple[Word, ...]:
        """All words a -> b of length <= bound, by length then declaration order."""
        if a not in self._objects or b not in self._objects:
            raise UnknownObject(f"{a!r} or {b!r}")
        out: list[Word] = []
        frontier: list[tuple[ObjId, tuple[Generator, ...]]] = [(a, ())]
        for _ in range(bound + 1):
            for at, letters in frontier:
                if at == b:
                    out.append(Word(a, b, letters))
            frontier = [
                (g.cod, letters + (g,))
                for at, letters in frontier
                for g in self._generators
                if g.dom == at
            ]
            if not frontier:
                break
        return tuple(out)

    def is_cyclic(self) -> bool:
        """True iff some directed cycle of generators exists (infinite homs)."""
        adj: dict[ObjId, list[ObjId]] = {}
        for g in self._generators:
            adj.setdefault(g.dom, []).append(g.cod)
        state: dict[ObjId, int] = {}

        def visit(v: ObjId) -> bool:
            state[v] = 1
            for w in adj.get(v, ()):
                s = state.get(w, 0)
                if s == 1 or (s == 0 and visit(w)):
                    return True
            state[v] = 2
            return False

        return any(state.get(v, 0) == 0 and visit(v) for v in self._objects)


def free_category(objects: Iterable[ObjId], generators: Iterable[Generator]) -> FreeCategory:
    """Build the free category on the given graph."""
    return FreeCategory(objects, generators)


def compose(cat, f, g):
    """Compose two morphisms in any category view: "f then g"."""
    return cat.compose(f, g)


def product_category(c1: ExplicitCategory, c2: ExplicitCategory) -> ExplicitCategory:
    """The product of two explicit categories: pair objects, pair morphisms."""
    objects = [(a, b) for a in c1.objects() for b in c2.objects()]
    morphisms = [
        ((f, g), (c1.dom(f), c2.dom(g)), (c1.cod(f), c2.cod(g)))
        for f in c1.morphism_names()
        for g in c2.morphism_names()
    ]
    comp = {}
    for (f1, g1), _, _ in morphisms:
        for (f2, g2), _, _ in morphisms:
            if c1.cod(f1) == c1.dom(f2) and c2.cod(g1) == c2.dom(g2):
                comp[((f1, g1), (f2, g2))] = (c1.compose(f1, f2), c2.compose(g1, g2))
    identities = {
        (a, b): (c1.identity(a), c2.identity(b)) for a in c1.objects() for b in c2.objects()
    }
    return ExplicitCategory(objects, morphisms, comp, identities, check=False)


def indiscrete_category(labels: Iterable[ObjId]) -> ExplicitCategory:
    """Exactly one morphism between every ordered pair of objects."""
    objs = tuple(labels)
    if not objs:
        raise EmptyLabelSet("indiscrete category needs at least one object")
    morphisms = [((a, b), a, b) for a in objs for b in objs]
    comp = {
        (((a, b), (b2, c))): (a, c)
        for a, b in itertools.product(objs, objs)
        for b2, c in itertools.product(objs, objs)
        if b == b2
    }
    identities = {a: (a, a) for a in objs}
    return ExplicitCategory(morphisms=morphisms, objects=objs, compose=comp, identities=identities, check=False)


def free_to_explicit(fc: FreeCategory) -> ExplicitCategory:
    """Materialize a finite free category as an explicit one.

    Raises NotComposable-free ValueError if the generator graph has a cycle,
    since the category would then have infinitely many morphisms.
    """
    if fc.is_cyclic():
        raise ValueError("free category has a generator cycle; cannot materialize")
    words: list[Word] = []
    for a in fc.objects():
        for b in fc.objects():
            words.extend(fc.hom(a, b, bound=len(fc.generators()) + 1))
    names = {w: _word_name(w) for w in words}
    morphisms = [(names[w], w.dom, w.cod) for w in words]
    comp = {}
    for w1 in words:
        for w2 in words:
            if w1.cod == w2.dom:
                comp[(names[w1], names[w2])] = names[fc.compose(w1, w2)]
    identities = {a: names[fc.identity(a)] for a in fc.objects()}
    return ExplicitCategory(fc.objects(), morphisms, comp, identities, check=False)


def _word_name(w: Word) -> MorName:
    if not w.letters:
        return ("id", w.dom)
    return ("w",) + tuple(g.name for g in w.letters)


def is_explicit(cat) -> bool:
    return isinstance(cat, ExplicitCategory)
