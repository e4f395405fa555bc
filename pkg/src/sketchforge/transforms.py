"""The sketch-to-semi-theory pipeline and the initial semi-theory.

``mu_transform`` makes an arbitrary explicit sketch multi-sorted by tripling
it with the indiscrete category on its cone set and the walking isomorphism,
lifting each cone over the third coordinate.  ``sigma_transform`` then adds a
fresh object with free projections for every missing tuple of sorts, giving a
semi-theory presented lazily (the category has infinitely many objects; all
enumerating queries carry an explicit truncation and fail loudly past it).

``initial_semitheory`` builds the projections-only semi-theory at a chosen
truncation, and ``left_extend`` is the explicit left adjoint to restriction
along its inclusion into a free semi-theory: a coproduct indexed by the
words whose first letter is not a projection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import ExplicitCategory, MorName, ObjId
from .errors import (
    BadParam,
    BoundExceeded,
    NotComposable,
    NotConePreserving,
    NotInjectiveOnObjects,
    SortMismatch,
    TupleIndexCollision,
    UnknownObject,
)
from .sketches import (
    Cone,
    FreeSemiTheory,
    ProjLetter,
    Sketch,
    SortedStructure,
    SemiTheory,
    SortGenerator,
    SortWord,
    is_multisorted_fps,
)


# ---------------------------------------------------------------------------
# mu: B to B x K x J
# ---------------------------------------------------------------------------


@dataclass
class MuSketch:
    """Result of the multi-sorting transform, with its bookkeeping maps."""

    sketch: Sketch
    base: Sketch
    trivial: bool
    lifted: dict[str, Cone] = field(default_factory=dict)
    distinguished_legs: frozenset = frozenset()
    canonical_distinguished: frozenset = frozenset()

    def origin_object(self, obj):
        if self.trivial:
            return obj
        return obj[0]


def _triple_name(f: MorName, kpair: tuple, jpair: tuple) -> MorName:
    return (f, kpair, jpair)


def mu_transform(s: Sketch) -> MuSketch:
    """Build the product sketch with lifted cones and identity padding cones.

    An empty cone set would make the transform pointless, so it is returned
    as a flagged identity transform instead of an error.
    """
    if not isinstance(s.cat, ExplicitCategory):
        raise BadParam("mu transform needs an explicit finite category")
    if not s.cones:
        return MuSketch(sketch=s, base=s, trivial=True)
    base = s.cat
    cone_names = [c.name for c in s.cones]
    if len(set(cone_names)) != len(cone_names):
        raise BadParam("cone names must be unique")
    j_objs = (0, 1)
    objects = [
        (b, a, j) for b in base.objects() for a in cone_names for j in j_objs
    ]
    morphisms = []
    for f in base.morphism_names():
        m = base.morphism(f)
        for a in cone_names:
            for b in cone_names:
                for i in j_objs:
                    for j in j_objs:
                        name = _triple_name(f, (a, b), (i, j))
                        morphisms.append((name, (m.dom, a, i), (m.cod, b, j)))
    comp = {}
    for f1, d1, c1 in morphisms:
        for f2, d2, c2 in morphisms:
            if c1 != d2:
                continue
            comp[(f1, f2)] = _triple_name(
                base.compose(f1[0], f2[0]), (f1[1][0], f2[1][1]), (f1[2][0], f2[2][1])
            )
    identities = {
        (b, a, j): _triple_name(base.identity(b), (a, a), (j, j))
        for (b, a, j) in objects
    }
    cat = ExplicitCategory(objects, morphisms, comp, identities, check=False)

    lifted: dict[str, Cone] = {}
    covered: set = set()
    for c in s.cones:
        apex = (c.apex, c.name, 0)
        legs = tuple((leg, c.name, 1) for leg in c.legs)
        projections = tuple(
            _triple_name(p, (c.name, c.name), (0, 1)) for p in c.projections
        )
        lifted[c.name] = Cone(f"mu_{c.name}", apex, legs, projections)
        covered.add(apex)
        covered.update(legs)
    identity_cones = []
    for obj in objects:
        if obj not in covered:
            identity_cones.append(
                Cone(f"mu_id_{_obj_token(obj)}", obj, (obj,), (cat.identity(obj),))
            )
    legs_set = frozenset(
        leg for cone in lifted.values() for leg in cone.legs
    )
    canonical = legs_set | frozenset(c.apex for c in identity_cones)
    mu = MuSketch(
        sketch=Sketch(cat, tuple(lifted.values()) + tuple(identity_cones)),
        base=s,
        trivial=False,
        lifted=lifted,
        distinguished_legs=legs_set,
        canonical_distinguished=canonical,
    )
    return mu


def _obj_token(obj) -> str:
    return repr(obj)


@dataclass
class Functor:
    """An explicit functor given by object and morphism dictionaries."""

    source: object
    target: object
    obj_map: dict
    mor_map: dict

    def obj(self, o):
        return self.obj_map[o]

    def mor(self, f):
        return self.mor_map[f]

    def check(self) -> None:
        src, dst = self.source, self.target
        for o in src.objects():
            if self.obj_map[o] not in set(dst.objects()):
                raise UnknownObject(f"image of {o!r} is not a target object")
            if self.mor(src.identity(o)) != dst.identity(self.obj(o)):
                raise NotComposable(f"identity of {o!r} not preserved")
        for f in src.morphism_names():
            m = src.morphism(f)
            img = dst.morphism(self.mor(f))
            if img.dom != self.obj(m.dom) or img.cod != self.obj(m.cod):
                raise NotComposable(f"endpoints of {f!r} not preserved")
        for f in src.morphism_names():
            for g in src.morphism_names():
                if src.morphism(f).cod != src.morphism(g).dom:
                    continue
                if self.mor(src.compose(f, g)) != dst.compose(self.mor(f), self.mor(g)):
                    raise NotComposable(f"composition not preserved at ({f!r}, {g!r})")


@dataclass
class SketchMorphism:
    """A functor between explicit sketches that sends cones to cones."""

    functor: Functor
    source: Sketch
    target: Sketch
    cone_map: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.cone_map:
            self.cone_map = self._match_cones()

    def _match_cones(self) -> dict[str, str]:
        out = {}
        for c in self.source.cones:
            image = (
                self.functor.obj(c.apex),
                tuple(self.functor.obj(l) for l in c.legs),
                tuple(self.functor.mor(p) for p in c.projections),
            )
            match = None
            for d in self.target.cones:
                if (d.apex, d.legs, d.projections) == image:
                    match = d.name
                    break
            if match is None:
                raise NotConePreserving(f"cone {c.name!r} has no image cone")
            out[c.name] = match
        return out

    def check_injective_on_objects(self) -> None:
        images = [self.functor.obj(o) for o in self.source.cat.objects()]
        if len(set(images)) != len(images):
            raise NotInjectiveOnObjects("object map is not injective")


def compose_sketch_morphisms(g1: SketchMorphism, g2: SketchMorphism) -> SketchMorphism:
    """The composite sketch morphism "g1 then g2"."""
    if g1.target is not g2.source and g1.target != g2.source:
        raise NotComposable("sketch morphisms not composable")
    obj_map = {o: g2.functor.obj(g1.functor.obj(o)) for o in g1.source.cat.objects()}
    mor_map = {
        f: g2.functor.mor(g1.functor.mor(f)) for f in g1.source.cat.morphism_names()
    }
    return SketchMorphism(
        Functor(g1.source.cat, g2.target.cat, obj_map, mor_map), g1.source, g2.target
    )


def mu_inclusion_functor(mu: MuSketch, fixed_cone: str | None = None) -> Functor:
    """The embedding of the base sketch into the mu transform.

    The middle coordinate is a fixed cone, the first in declaration order
    unless named explicitly; the choice is immaterial up to isomorphism.
    """
    if mu.trivial:
        raise BadParam("trivial mu transform has no embedding data")
    a0 = fixed_cone or mu.base.cones[0].name
    base = mu.base.cat
    obj_map = {b: (b, a0, 0) for b in base.objects()}
    mor_map = {
        f: _triple_name(f, (a0, a0), (0, 0)) for f in base.morphism_names()
    }
    return Functor(base, mu.sketch.cat, obj_map, mor_map)


# ---------------------------------------------------------------------------
# sigma: lazily add the missing tuple objects
# ---------------------------------------------------------------------------


class SigmaCategory:
    """The lazily generated category of the sigma transform.

    Old objects keep their morphisms; a new tuple object has its identity,
    free projections to its sorts' distinguished objects, and the free
    composites of those projections with old morphisms.  Nothing maps into a
    new object.  Enumerations beyond the truncation raise.
    """

    def __init__(self, base: ExplicitCategory, index: dict[tuple, ObjId], sorts: tuple, trunc: int):
        self.base = base
        self.index = dict(index)
        self.rev = {obj: t for t, obj in self.index.items()}
        self.sorts = tuple(sorts)
        self.trunc = trunc

    # -- objects -------------------------------------------------------------

    def obj_of_tuple(self, t: tuple):
        if t in self.index:
            return self.index[t]
        self._check_trunc(t)
        return ("sob", t)

    def is_new(self, obj) -> bool:
        return isinstance(obj, tuple) and len(obj) == 2 and obj[0] == "sob"

    def _check_trunc(self, t: tuple) -> None:
        if len(t) > self.trunc:
            raise BadParam(
                f"tuple {t!r} exceeds the sigma truncation {self.trunc}"
            )
        for s in t:
            if s not in self.sorts:
                raise UnknownObject(f"unknown sort {s!r}")

    def new_tuples(self) -> tuple[tuple, ...]:
        out = []
        for n in range(self.trunc + 1):
            for t in itertools.product(self.sorts, repeat=n):
                if t not in self.index:
                    out.append(t)
        return tuple(out)

    def objects(self) -> tuple:
        return tuple(self.base.objects()) + tuple(
            ("sob", t) for t in self.new_tuples()
        )

    # -- morphisms -----------------------------------------------------------

    def identity(self, obj):
        if self.is_new(obj):
            return ("sid", obj[1])
        return self.base.identity(obj)

    def dom(self, f):
        if isinstance(f, tuple) and f and f[0] == "sid":
            return ("sob", f[1])
        if isinstance(f, tuple) and f and f[0] == "sfree":
            return ("sob", f[1])
        return self.base.morphism(f).dom

    def cod(self, f):
        if isinstance(f, tuple) and f and f[0] == "sid":
            return ("sob", f[1])
        if isinstance(f, tuple) and f and f[0] == "sfree":
            return self.base.morphism(f[3]).cod
        return self.base.morphism(f).cod

    def hom(self, a, b, bound: int | None = None) -> tuple:
        if not self.is_new(a):
            if self.is_new(b):
                return ()
            return self.base.hom(a, b)
        t = a[1]
        if self.is_new(b):
            return (("sid", t),) if a == b else ()
        out = []
        for k in range(1, len(t) + 1):
            sort_obj = t[k - 1]
            for m in self.base.hom(sort_obj, b):
                out.append(("sfree", t, k, m))
        return tuple(out)

    def compose(self, f, g):
        fid = isinstance(f, tuple) and f and f[0] == "sid"
        gid = isinstance(g, tuple) and g and g[0] == "sid"
        if fid:
            if self.dom(g) != ("sob", f[1]):
                raise NotComposable("sigma identity not composable")
            return g
        if gid:
            if self.cod(f) != ("sob", g[1]):
                raise NotComposable("sigma identity not composable")
            return f
        ffree = isinstance(f, tuple) and f and f[0] == "sfree"
        gfree = isinstance(g, tuple) and g and g[0] == "sfree"
        if gfree:
            raise NotComposable("nothing maps into a new sigma object")
        if ffree:
            return ("sfree", f[1], f[2], self.base.compose(f[3], g))
        return self.base.compose(f, g)

    def free_projection(self, t: tuple, k: int):
        """The k-th free projection of a non-indexed tuple."""
        sort_obj = t[k - 1]
        return ("sfree", t, k, self.base.identity(sort_obj))


@dataclass
class SigmaTheory:
    """The sigma transform packaged as a truncated semi-theory."""

    semi: SemiTheory
    mu: MuSketch
    trunc: int

    @property
    def category(self) -> SigmaCategory:
        return self.semi.sketch.cat


def sigma_transform(mu: MuSketch, trunc: int) -> SigmaTheory:
    """Freely add tuple objects and projection cones up to the truncation."""
    ok, canonical = is_multisorted_fps(mu.sketch)
    if not ok:
        raise BadParam("sigma transform needs a multi-sorted input sketch")
    base = mu.sketch.cat
    sorts = tuple(sorted(canonical, key=repr))
    index: dict[tuple, ObjId] = {(s,): s for s in sorts}
    for cone in mu.sketch.cones:
        t = tuple(cone.legs)
        if len(t) == 1 and cone.apex == cone.legs[0]:
            continue
        if t in index:
            if index[t] != cone.apex:
                raise TupleIndexCollision(
                    f"tuple {t!r} would index both {index[t]!r} and {cone.apex!r}"
                )
            continue
        index[t] = cone.apex
    cat = SigmaCategory(base, index, sorts, trunc)

    cones: list[Cone] = list(mu.sketch.cones)
    have_pattern = set()
    for cone in cones:
        have_pattern.add((cone.apex, cone.legs))
    for s in sorts:
        if ((s, (s,))) not in have_pattern:
            cones.append(Cone(f"sigma_id_{_obj_token(s)}", s, (s,), (base.identity(s),)))
    for t in cat.new_tuples():
        apex = ("sob", t)
        legs = tuple(t)
        projections = tuple(cat.free_projection(t, k) for k in range(1, len(t) + 1))
        cones.append(Cone(f"sigma_{_obj_token(t)}", apex, legs, projections))

    full_index = dict(index)
    for t in cat.new_tuples():
        full_index[t] = ("sob", t)
    sorted_structure = SortedStructure(sorts, full_index)
    cone_of_tuple: dict[tuple, Cone] = {}
    for cone in cones:
        obj = cone.apex
        t = None
        for tt, o in full_index.items():
            if o == obj and tuple(cone.legs) == tt:
                t = tt
                break
        if t is not None:
            cone_of_tuple[t] = cone
    semi = SemiTheory(
        sketch=Sketch(cat, tuple(cones)),
        sorted_structure=sorted_structure,
        cone_of_tuple=cone_of_tuple,
    )
    return SigmaTheory(semi=semi, mu=mu, trunc=trunc)


# ---------------------------------------------------------------------------
# transport of sketch morphisms through the pipeline
# ---------------------------------------------------------------------------


@dataclass
class PipelineFunctor:
    """A sort-preserving functor between two sigma transforms."""

    source: SigmaTheory
    target: SigmaTheory
    mu_obj: dict
    mu_mor: dict

    def obj(self, o):
        src_cat = self.source.category
        if src_cat.is_new(o):
            t = tuple(self.sort_image(s) for s in o[1])
            return self.target.category.obj_of_tuple(t)
        return self.mu_obj[o]

    def sort_image(self, s):
        return self.mu_obj[s]

    def mor(self, f):
        src_cat = self.source.category
        dst_cat = self.target.category
        if isinstance(f, tuple) and f and f[0] == "sid":
            return dst_cat.identity(self.obj(("sob", f[1])))
        if isinstance(f, tuple) and f and f[0] == "sfree":
            t = tuple(self.sort_image(s) for s in f[1])
            proj = self.target_projection(t, f[2])
            rest = self.mu_mor[f[3]]
            return dst_cat.compose(proj, rest)
        return self.mu_mor[f]

    def target_projection(self, t: tuple, k: int):
        dst = self.target
        cone = dst.semi.cone_of_tuple.get(t)
        if cone is not None:
            return cone.projections[k - 1]
        return dst.category.free_projection(t, k)


def transport_functor(g: SketchMorphism, trunc: int) -> PipelineFunctor:
    """Push a cone-preserving, object-injective sketch morphism through mu and sigma."""
    g.functor.check()
    g.check_injective_on_objects()
    mu1 = mu_transform(g.source)
    mu2 = mu_transform(g.target)
    sig1 = sigma_transform(mu1, trunc)
    sig2 = sigma_transform(mu2, trunc)
    mu_obj = {}
    for (b, a, i) in mu1.sketch.cat.objects():
        mu_obj[(b, a, i)] = (g.functor.obj(b), g.cone_map[a], i)
    mu_mor = {}
    for f in mu1.sketch.cat.morphism_names():
        base_f, (a1, a2), (i, j) = f
        mu_mor[f] = _triple_name(
            g.functor.mor(base_f), (g.cone_map[a1], g.cone_map[a2]), (i, j)
        )
    return PipelineFunctor(source=sig1, target=sig2, mu_obj=mu_obj, mu_mor=mu_mor)


# ---------------------------------------------------------------------------
# the initial semi-theory and its left extension
# ---------------------------------------------------------------------------


@dataclass
class InitialTheory:
    """The projections-only semi-theory over a sort set, truncated."""

    sorts: tuple
    trunc: int
    semi: SemiTheory

    @property
    def category(self) -> ExplicitCategory:
        return self.semi.sketch.cat


def initial_semitheory(sorts, trunc: int) -> InitialTheory:
    """Build the initial semi-theory: only projections beside identities."""
    sorts = tuple(sorts)
    if len(set(sorts)) != len(sorts):
        raise BadParam("duplicate sorts")
    objects = [
        t for n in range(trunc + 1) for t in itertools.product(sorts, repeat=n)
    ]
    morphisms = []
    for t in objects:
        morphisms.append((("pid", t), t, t))
        if len(t) >= 2:
            for k in range(1, len(t) + 1):
                morphisms.append((("proj", t, k), t, (t[k - 1],)))
    comp = {}
    for name, dom, cod in morphisms:
        comp[(("pid", dom), name)] = name
        comp[(name, ("pid", cod))] = name
    cat = ExplicitCategory(objects, morphisms, comp, {t: ("pid", t) for t in objects})
    cones = []
    for t in objects:
        if len(t) == 0:
            cones.append(Cone("p_cone_empty", t, (), ()))
        elif len(t) == 1:
            cones.append(Cone(f"p_cone_{_obj_token(t)}", t, (t,), (("pid", t),)))
        else:
            legs = tuple((s,) for s in t)
            projections = tuple(("proj", t, k) for k in range(1, len(t) + 1))
            cones.append(Cone(f"p_cone_{_obj_token(t)}", t, legs, projections))
    index = {t: t for t in objects}
    semi = SemiTheory(
        sketch=Sketch(cat, tuple(cones)),
        sorted_structure=SortedStructure(sorts, index),
        cone_of_tuple={t: c for t, c in zip(objects, cones)},
    )
    return InitialTheory(sorts=sorts, trunc=trunc, semi=semi)


def unique_map_to(p: InitialTheory, c: SemiTheory) -> Functor:
    """The unique sort- and projection-preserving functor out of the initial theory."""
    if frozenset(p.sorts) != frozenset(c.sorted_structure.sorts):
        raise SortMismatch("sort sets differ")
    obj_map = {}
    mor_map = {}
    for t in p.category.objects():
        if t not in c.sorted_structure.object_index:
            raise UnknownObject(f"target has no object for tuple {t!r}")
        obj_map[t] = c.sorted_structure.object_index[t]
    target_cat = c.sketch.cat
    for name in p.category.morphism_names():
        if name[0] == "pid":
            mor_map[name] = target_cat.identity(obj_map[name[1]])
        else:
            _, t, k = name
            cone = c.cone_of_tuple.get(t)
            if cone is None:
                raise UnknownObject(f"target has no cone for tuple {t!r}")
            mor_map[name] = cone.projections[k - 1]
    return Functor(p.category, target_cat, obj_map, mor_map)


def projection_words_with_nonprojection_start(
    theory: FreeSemiTheory, target: tuple, bound: int
) -> tuple[SortWord, ...]:
    """All words into ``target`` whose first letter is a generator.

    Words are enumerated forward from each generator, so the branching is
    finite; raises when the enumeration cannot be proven complete within the
    bound.
    """
    out: list[SortWord] = []
    for g in theory.generators:
        tails, exhausted = theory.hom_complete(g.cod, target, bound - 1)
        if not exhausted:
            raise BoundExceeded(
                f"word enumeration into {target!r} exceeds bound {bound}"
            )
        head = SortWord(g.dom, g.cod, (g,))
        out.extend(theory.compose(head, t) for t in tails)
    out.sort(key=lambda w: (len(w.letters), repr(w.letters)))
    return tuple(out)


@dataclass(frozen=True)
class ExtElem:
    """An element of a shifted component of the left extension."""

    word: SortWord
    value: object


def left_extend(y, theory: FreeSemiTheory, bound: int = 12):
    """The explicit left adjoint applied to a projections-only algebra.

    The carrier at an object is the base carrier plus one copy of the source
    carrier for every word into the object that starts with a generator;
    generators shift components along post-composition, projections act on
    the base through the original algebra.  With no generators the extension
    is the algebra itself.
    """
    from .algebra import SortedAlgebra

    support = tuple(y.carriers.keys())
    support_set = set(support)
    for g in theory.generators:
        if g.dom not in support_set or g.cod not in support_set:
            raise UnknownObject(
                f"algebra support is missing an endpoint of generator {g.name!r}"
            )
    words: dict[tuple, tuple[SortWord, ...]] = {
        c: projection_words_with_nonprojection_start(theory, c, bound) for c in support
    }
    carriers = {}
    for c in support:
        elems = list(y.carriers[c])
        for w in words[c]:
            elems.extend(ExtElem(w, v) for v in y.carriers[w.dom])
        carriers[c] = tuple(elems)

    proj_action = {}
    for (t, k), table in y.proj_action.items():
        if t not in support_set:
            continue
        target = (t[k - 1],)
        if target not in support_set:
            continue
        letter = ProjLetter(t, k)
        step = {}
        for v in y.carriers[t]:
            step[v] = table[v]
        for w in words[t]:
            shifted = theory.compose(w, SortWord(t, target, (letter,)))
            for v in y.carriers[w.dom]:
                step[ExtElem(w, v)] = ExtElem(shifted, v)
        proj_action[(t, k)] = step

    gen_action = {}
    for g in theory.generators:
        step = {}
        single = SortWord(g.dom, g.cod, (g,))
        for v in y.carriers[g.dom]:
            step[v] = ExtElem(single, v)
        for w in words[g.dom]:
            shifted = theory.compose(w, single)
            for v in y.carriers[w.dom]:
                step[ExtElem(w, v)] = ExtElem(shifted, v)
        gen_action[g.name] = step

    return SortedAlgebra(carriers=carriers, proj_action=proj_action, gen_action=gen_action)


def restrict_to_projections(x):
    """Forget the generator actions: the right adjoint to ``left_extend``."""
    from .algebra import SortedAlgebra

    return SortedAlgebra(
        carriers=dict(x.carriers), proj_action=dict(x.proj_action), gen_action={}
    )
