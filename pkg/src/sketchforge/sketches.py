"""Cones, finite product sketches, sortedness predicates and built-in sketches.

A sketch pairs a category with a chosen list of cones.  The predicates here
decide, by brute force over explicit data, whether a sketch is a multi-sorted
semi-theory, an algebraic theory, or a multi-sorted finite product sketch
with some distinguished object set.

Convention used throughout the library: the cone attached to a 1-tuple (s) is
the identity cone (apex = leg = the sort object, projection = identity)
unless the sketch declares an explicit 1-fold cone with that apex.  This
keeps the initial semi-theory finite at every truncation and makes the sorted
predicates agree on all the built-ins.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable

from . import core
from .core import ExplicitCategory, FreeCategory, Generator, ObjId, Word
from .errors import BadParam, NotComposable, NotExplicit, UnknownObject, UnsupportedGenerator


@dataclass(frozen=True)
class Cone:
    """An n-fold cone: apex, ordered legs, and one projection per leg."""

    name: str
    apex: ObjId
    legs: tuple[ObjId, ...]
    projections: tuple[Hashable, ...]

    @property
    def arity(self) -> int:
        return len(self.legs)


@dataclass(frozen=True)
class Sketch:
    """A category together with a list of cones in it."""

    cat: object
    cones: tuple[Cone, ...]


@dataclass
class CheckReport:
    """Outcome of a structural check: verdict plus per-rule violations."""

    verdict: bool
    violations: list[tuple[str, object]] = field(default_factory=list)

    @classmethod
    def from_violations(cls, violations: list[tuple[str, object]]) -> "CheckReport":
        return cls(verdict=not violations, violations=violations)


class SortedStructure:
    """An assignment of tuple indices over a sort set to category objects.

    ``object_index`` maps tuples of sorts to objects, injectively; the object
    indexed by the 1-tuple (s) is the distinguished object of sort s.
    """

    def __init__(self, sorts: Iterable[str], object_index: dict[tuple, ObjId]):
        self.sorts = tuple(sorts)
        self.object_index = dict(object_index)
        values = list(self.object_index.values())
        if len(set(values)) != len(values):
            raise ValueError("object_index is not injective")
        for t in self.object_index:
            if any(s not in self.sorts for s in t):
                raise ValueError(f"tuple {t!r} uses unknown sorts")

    def distinguished(self, s: str) -> ObjId:
        key = (s,)
        if key not in self.object_index:
            raise UnknownObject(f"sort {s!r} has no distinguished object")
        return self.object_index[key]

    def tuple_of(self, obj: ObjId):
        for t, o in self.object_index.items():
            if o == obj:
                return t
        return None


@dataclass
class SemiTheory:
    """A sketch validated against a sorted structure, with its cone-per-tuple map."""

    sketch: Sketch
    sorted_structure: SortedStructure
    cone_of_tuple: dict[tuple, Cone]


def _endpoints(cat, f) -> tuple[ObjId, ObjId]:
    if isinstance(cat, ExplicitCategory):
        m = cat.morphism(f)
        return m.dom, m.cod
    if isinstance(f, Word):
        return f.dom, f.cod
    return cat.dom(f), cat.cod(f)


def _morphism_valid(cat, f) -> bool:
    if isinstance(cat, ExplicitCategory):
        try:
            cat.morphism(f)
            return True
        except KeyError:
            return False
    if isinstance(cat, FreeCategory):
        if not isinstance(f, Word):
            return False
        gens = set(cat.generators())
        at = f.dom
        for g in f.letters:
            if g not in gens or g.dom != at:
                return False
            at = g.cod
        return at == f.cod and f.dom in cat.objects() and f.cod in cat.objects()
    try:
        cat.dom(f)
        return True
    except Exception:
        return False


def validate_sketch(s: Sketch) -> CheckReport:
    """Check that every cone's apex, legs and projections live in the category."""
    violations: list[tuple[str, object]] = []
    objects = set(s.cat.objects())
    for idx, cone in enumerate(s.cones):
        where = (idx, cone.name)
        if cone.apex not in objects:
            violations.append(("unknown-apex", where))
            continue
        if len(cone.legs) != len(cone.projections):
            violations.append(("leg-count", where))
            continue
        for k, (leg, p) in enumerate(zip(cone.legs, cone.projections), start=1):
            if leg not in objects:
                violations.append(("unknown-leg", (idx, cone.name, k)))
                continue
            if not _morphism_valid(s.cat, p):
                violations.append(("unknown-projection", (idx, cone.name, k)))
                continue
            dom, cod = _endpoints(s.cat, p)
            if dom != cone.apex:
                violations.append(("projection-domain", (idx, cone.name, k)))
            if cod != leg:
                violations.append(("projection-codomain", (idx, cone.name, k)))
    return CheckReport.from_violations(violations)


def is_product_cone(cat: ExplicitCategory, cone: Cone) -> bool:
    """Brute-force universal property: unique factorization through the apex.

    A 0-fold cone passes iff the apex is terminal.
    """
    if not isinstance(cat, ExplicitCategory):
        raise NotExplicit("product check needs an explicit finite category")
    for d in cat.objects():
        if cone.arity == 0:
            if len(cat.hom(d, cone.apex)) != 1:
                return False
            continue
        candidates = cat.hom(d, cone.apex)
        for fs in itertools.product(*(cat.hom(d, leg) for leg in cone.legs)):
            matches = [
                u
                for u in candidates
                if all(cat.compose(u, p) == f for p, f in zip(cone.projections, fs))
            ]
            if len(matches) != 1:
                return False
    return True


def _is_identity_cone(cat, cone: Cone) -> bool:
    if cone.arity != 1 or cone.legs[0] != cone.apex:
        return False
    try:
        return cone.projections[0] == cat.identity(cone.apex)
    except Exception:
        return False


def is_semi_theory(s: Sketch, sorted_structure: SortedStructure) -> CheckReport:
    """Check the sorted semi-theory clauses against the indexed tuples.

    Clause (i): the index covers the category's objects injectively.  Clause
    (ii): every indexed tuple has a unique matching cone (1-tuples may fall
    back on the implicit identity cone) and every declared cone matches some
    indexed tuple.
    """
    violations: list[tuple[str, object]] = []
    st = sorted_structure
    objects = set(s.cat.objects())
    rev: dict[ObjId, tuple] = {}
    for t, obj in st.object_index.items():
        rev[obj] = t
        if obj not in objects:
            violations.append(("index-object-unknown", (t, obj)))
    for obj in objects:
        if obj not in rev:
            violations.append(("unindexed-object", obj))

    def pattern(t: tuple) -> tuple[ObjId, tuple[ObjId, ...]] | None:
        try:
            legs = tuple(st.distinguished(x) for x in t)
        except UnknownObject:
            return None
        return st.object_index[t], legs

    for t in st.object_index:
        pat = pattern(t)
        if pat is None:
            violations.append(("missing-sort-object", t))
            continue
        apex, legs = pat
        matching = [c for c in s.cones if c.apex == apex and c.legs == legs]
        if len(matching) > 1:
            violations.append(("duplicate-cone", (t, [c.name for c in matching])))
        elif not matching and len(t) != 1:
            violations.append(("missing-cone", t))
    for idx, cone in enumerate(s.cones):
        t = rev.get(cone.apex)
        if t is None:
            violations.append(("stray-cone", (idx, cone.name)))
            continue
        pat = pattern(t)
        if pat is None or cone.legs != pat[1]:
            violations.append(("stray-cone", (idx, cone.name)))
    return CheckReport.from_violations(violations)


def is_algebraic_theory(s: Sketch, sorted_structure: SortedStructure) -> CheckReport:
    """A semi-theory whose cones are all genuine product cones."""
    if not isinstance(s.cat, ExplicitCategory):
        raise NotExplicit("algebraic theory check needs an explicit finite category")
    report = is_semi_theory(s, sorted_structure)
    violations = list(report.violations)
    for cone in s.cones:
        if not is_product_cone(s.cat, cone):
            violations.append(("non-product-cone", cone.name))
    return CheckReport.from_violations(violations)


def is_multisorted_fps(s: Sketch) -> tuple[bool, frozenset | None]:
    """Search for a distinguished object set making the sketch multi-sorted.

    The constraints force the candidate set from below (every leg must be
    distinguished) and cap it from above (no apex of a non-identity cone may
    be), so checking the minimal forced set decides existence.  Cone legs are
    compared as ordered tuples.
    """
    cones = s.cones
    for a, b in itertools.combinations(cones, 2):
        if a.arity == b.arity and a.legs == b.legs and a != b:
            return False, None
        if a.apex == b.apex and a != b:
            return False, None
    forced: set[ObjId] = set()
    for c in cones:
        forced.update(c.legs)
    for c in cones:
        if _is_identity_cone(s.cat, c):
            continue
        if c.apex in forced:
            return False, None
    return True, frozenset(forced)


# ---------------------------------------------------------------------------
# Free multi-sorted semi-theories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjLetter:
    """The projection p_k out of the tuple object ``dom`` (len(dom) >= 2)."""

    dom: tuple
    k: int

    @property
    def cod(self) -> tuple:
        return (self.dom[self.k - 1],)


@dataclass(frozen=True)
class SortGenerator:
    """A free non-projection generator between tuple objects of a semi-theory."""

    name: str
    dom: tuple
    cod: tuple


Letter = ProjLetter | SortGenerator


@dataclass(frozen=True)
class SortWord:
    """A morphism of a free semi-theory: a composable sequence of letters.

    Letters apply left to right; the empty word is the identity.
    """

    dom: tuple
    cod: tuple
    letters: tuple[Letter, ...]

    def __len__(self) -> int:
        return len(self.letters)


class FreeSemiTheory:
    """A free multi-sorted semi-theory presented by sorts and generators.

    Objects are all tuples over the sort set (never materialized); morphisms
    are words whose letters are either tuple projections (for tuples of
    length >= 2; 1-tuple projections are identities by convention) or the
    declared generators.  Generators with an empty domain tuple are rejected:
    the tree completion has no representation for constants.
    """

    def __init__(self, sorts: Iterable[str], generators: Iterable[SortGenerator]):
        self.sorts = tuple(sorts)
        if len(set(self.sorts)) != len(self.sorts):
            raise ValueError("duplicate sorts")
        self.generators = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        for g in self.generators:
            if len(g.dom) == 0:
                raise UnsupportedGenerator(
                    f"generator {g.name!r} has empty domain; constants are not supported"
                )
            for x in g.dom + g.cod:
                if x not in self.sorts:
                    raise UnknownObject(f"generator {g.name!r} uses unknown sort {x!r}")

    def generator(self, name: str) -> SortGenerator:
        for g in self.generators:
            if g.name == name:
                return g
        raise UnknownObject(f"no generator named {name!r}")

    def identity(self, t: tuple) -> SortWord:
        return SortWord(t, t, ())

    def compose(self, f: SortWord, g: SortWord) -> SortWord:
        if f.cod != g.dom:
            raise NotComposable(f"cod {f.cod!r} != dom {g.dom!r}")
        return SortWord(f.dom, g.cod, f.letters + g.letters)

    def out_letters(self, t: tuple) -> tuple[Letter, ...]:
        projections: tuple[Letter, ...] = ()
        if len(t) >= 2:
            projections = tuple(ProjLetter(t, k) for k in range(1, len(t) + 1))
        return projections + tuple(g for g in self.generators if g.dom == t)

    def hom(self, a: tuple, b: tuple, bound: int) -> tuple[SortWord, ...]:
        """All words a -> b with at most ``bound`` letters, by length."""
        return self.hom_complete(a, b, bound)[0]

    def hom_complete(self, a: tuple, b: tuple, bound: int) -> tuple[tuple[SortWord, ...], bool]:
        """Words a -> b up to the bound, plus whether the search exhausted.

        The second component is True iff no word out of ``a`` (to any target)
        is longer than the bound, so the returned list is provably complete.
        """
        out: list[SortWord] = []
        frontier: list[tuple[tuple, tuple[Letter, ...]]] = [(a, ())]
        for _ in range(bound + 1):
            for at, letters in frontier:
                if at == b:
                    out.append(SortWord(a, b, letters))
            new_frontier = [
                (letter_cod(l), letters + (l,))
                for at, letters in frontier
                for l in self.out_letters(at)
            ]
            if not new_frontier:
                return tuple(out), True
            frontier = new_frontier
        return tuple(out), False


def letter_dom(l: Letter) -> tuple:
    return l.dom


def letter_cod(l: Letter) -> tuple:
    return l.cod


def word_is_projection_free_start(w: SortWord) -> bool:
    """True iff the word is nonempty and its first letter is not a projection."""
    return bool(w.letters) and not isinstance(w.letters[0], ProjLetter)


# ---------------------------------------------------------------------------
# Built-in sketches
# ---------------------------------------------------------------------------

BUILTIN_NAMES = ("binary", "gamma", "delta-loop", "prezma")


def builtin(name: str, trunc: int = 1, m: int | None = None) -> Sketch:
    """Construct a built-in sketch by its stable CLI identifier.

    ``trunc`` is the truncation bound N (ignored by ``binary``); ``m`` is the
    extra parameter of ``delta-loop``.
    """
    key = name.replace("_", "-")
    if key == "binary":
        return binary_sketch()
    if key == "gamma":
        return gamma_sketch(trunc)
    if key == "delta-loop":
        if m is None:
            raise BadParam("delta-loop needs the parameter m")
        return delta_loop_sketch(trunc, m)
    if key == "prezma":
        return prezma_sketch(trunc)
    raise BadParam(f"unknown builtin {name!r}")


def binary_sketch() -> Sketch:
    """Two objects, three parallel arrows, one 2-fold cone (a binary operation)."""
    morphisms = [
        ("id_b1", "b1", "b1"),
        ("id_b2", "b2", "b2"),
        ("phi1", "b2", "b1"),
        ("phi2", "b2", "b1"),
        ("mu", "b2", "b1"),
    ]
    comp = {}
    for f, dom, cod in morphisms:
        comp[(f"id_{dom}", f)] = f
        comp[(f, f"id_{cod}")] = f
    # avoid double-writing identity pairs
    comp[("id_b1", "id_b1")] = "id_b1"
    comp[("id_b2", "id_b2")] = "id_b2"
    cat = ExplicitCategory(
        ["b1", "b2"], morphisms, comp, {"b1": "id_b1", "b2": "id_b2"}
    )
    cone = Cone("alpha", "b2", ("b1", "b1"), ("phi1", "phi2"))
    return Sketch(cat, (cone,))


def binary_sorted_structure() -> SortedStructure:
    return SortedStructure(["s"], {("s",): "b1", ("s", "s"): "b2"})


def binary_free_fragment() -> FreeSemiTheory:
    """The one-sorted free semi-theory fragment with a single binary generator."""
    return FreeSemiTheory(["s"], [SortGenerator("mu", ("s", "s"), ("s",))])


def _pointed_maps(n: int, mx: int):
    """All maps [n] -> [mx] fixing 0, as value tuples including position 0."""
    for tail in itertools.product(range(mx + 1), repeat=n):
        yield (0,) + tail


def gamma_sketch(n_max: int) -> Sketch:
    """Truncated category of finite pointed sets with indicator-map cones."""
    if n_max < 1:
        raise BadParam("gamma needs trunc >= 1")
    objects = list(range(n_max + 1))
    morphisms = []
    for n in objects:
        for mx in objects:
            for values in _pointed_maps(n, mx):
                morphisms.append((("g", n, mx, values), n, mx))
    comp = {}
    for name1, n1, m1 in morphisms:
        for name2, n2, m2 in morphisms:
            if m1 != n2:
                continue
            v = tuple(name2[3][i] for i in name1[3])
            comp[(name1, name2)] = ("g", n1, m2, v)
    identities = {n: ("g", n, n, tuple(range(n + 1))) for n in objects}
    cat = ExplicitCategory(objects, morphisms, comp, identities, check=False)
    cones = [Cone("alpha0", 0, (), ())]
    for n in range(1, n_max + 1):
        projections = tuple(
            ("g", n, 1, tuple(1 if i == k else 0 for i in range(n + 1)))
            for k in range(1, n + 1)
        )
        cones.append(Cone(f"alpha{n}", n, (1,) * n, projections))
    return Sketch(cat, tuple(cones))


def gamma_sorted_structure(n_max: int) -> SortedStructure:
    return SortedStructure(["s"], {("s",) * n: n for n in range(n_max + 1)})


def _monotone_maps(src: int, dst: int):
    """All non-decreasing maps [src] -> [dst] as value tuples."""
    for comb in itertools.combinations_with_replacement(range(dst + 1), src + 1):
        yield comb


def _delta_op_category(n_max: int) -> ExplicitCategory:
    """Truncated opposite simplex category; the arrow [k] -> [l] stores the
    underlying non-decreasing map [l] -> [k]."""
    objects = list(range(n_max + 1))
    morphisms = []
    for k in objects:
        for l in objects:
            for values in _monotone_maps(l, k):
                morphisms.append((("d", k, l, values), k, l))
    comp = {}
    for name1, k1, l1 in morphisms:
        for name2, k2, l2 in morphisms:
            if l1 != k2:
                continue
            # underlying maps compose the other way around
            v = tuple(name1[3][i] for i in name2[3])
            comp[(name1, name2)] = ("d", k1, l2, v)
    identities = {k: ("d", k, k, tuple(range(k + 1))) for k in objects}
    return ExplicitCategory(objects, morphisms, comp, identities, check=False)


def delta_loop_sketch(n_max: int, m: int) -> Sketch:
    """Truncated opposite simplex category with choose-m projection cones."""
    if m < 1:
        raise BadParam("delta-loop needs m >= 1")
    if n_max < m:
        raise BadParam("delta-loop needs trunc >= m")
    cat = _delta_op_category(n_max)
    cones = []
    for k in range(n_max + 1):
        if k < m:
            cones.append(Cone(f"alpha{k}", k, (), ()))
            continue
        legs = []
        projections = []
        # strictly increasing maps [m] -> [k] fixing 0, in lexicographic order
        for tail in itertools.combinations(range(1, k + 1), m):
            legs.append(m)
            projections.append(("d", k, m, (0,) + tail))
        cones.append(Cone(f"alpha{k}", k, tuple(legs), tuple(projections)))
    return Sketch(cat, tuple(cones))


def prezma_sketch(n_max: int) -> Sketch:
    """Truncated product of the opposite simplex category with the walking arrow.

    Cones follow the monoid-with-action pattern: apexes over the i1 component
    decompose into copies of ([1], i1); apexes over i0 decompose into the
    acted-on object and the monoid part, once through each endpoint map.
    """
    if n_max < 1:
        raise BadParam("prezma needs trunc >= 1")
    delta = _delta_op_category(n_max)
    eye = ExplicitCategory(
        ["i0", "i1"],
        [("ii0", "i0", "i0"), ("ii1", "i1", "i1"), ("pi", "i0", "i1")],
        {
            ("ii0", "ii0"): "ii0",
            ("ii1", "ii1"): "ii1",
            ("ii0", "pi"): "pi",
            ("pi", "ii1"): "pi",
        },
        {"i0": "ii0", "i1": "ii1"},
    )
    cat = core.product_category(delta, eye)

    def dmor(k: int, l: int, values: tuple) -> Hashable:
        return ("d", k, l, values)

    def did(k: int) -> Hashable:
        return dmor(k, k, tuple(range(k + 1)))

    cones = [Cone("alpha0", (0, "i1"), (), ())]
    for n in range(1, n_max + 1):
        projections = tuple(
            (dmor(n, 1, (k - 1, k)), "ii1") for k in range(1, n + 1)
        )
        cones.append(Cone(f"alpha{n}", (n, "i1"), ((1, "i1"),) * n, projections))
    seen_shapes = set()
    extra = []
    for n in range(n_max + 1):
        for label, vertex in (("beta", 0), ("gamma", n)):
            cone = Cone(
                f"{label}{n}",
                (n, "i0"),
                ((0, "i0"), (n, "i1")),
                ((dmor(n, 0, (vertex,)), "ii0"), (did(n), "pi")),
            )
            shape = (cone.apex, cone.legs, cone.projections)
            if shape in seen_shapes:
                continue
            seen_shapes.add(shape)
            extra.append(cone)
    return Sketch(cat, tuple(cones) + tuple(extra))


def builtin_sorted_structure(name: str, trunc: int = 1) -> SortedStructure | None:
    """The natural sorted structure of a built-in, when it has one."""
    key = name.replace("_", "-")
    if key == "binary":
        return binary_sorted_structure()
    if key == "gamma":
        return gamma_sorted_structure(trunc)
    return None
