"""Set-valued strict algebras: checking, enumeration, tree evaluation.

An algebra over an explicit sketch is a functor into finite sets given by
explicit carrier lists and value tables.  Enumeration fixes carriers up
front: every cone whose apex carrier is not otherwise determined gets the
literal cartesian product of its leg carriers with coordinate projections,
so counts match oracles that enumerate operations directly.  Cones whose
apex was already determined contribute bijectivity checks instead.

Algebras over free semi-theories (``SortedAlgebra``) carry one table per
tuple projection and per generator; tree evaluation reads leaves through the
projection tables and crosses each generator edge by inverting the strict
comparison of its domain tuple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .completion import Branch, GenLabel, LabeledTree, LeafLabel, TreeTuple, theta
from .core import ExplicitCategory
from .errors import (
    CarrierConflict,
    CarrierUnderdetermined,
    NotExplicit,
    NotFunctorial,
    NotStrict,
)
from .sketches import CheckReport, Cone, FreeSemiTheory, ProjLetter, Sketch, SortWord
from .transforms import Functor


@dataclass
class FinSetAlgebra:
    """A functor from an explicit category to finite sets, as tables."""

    carrier: dict
    action: dict

    def apply(self, f, x):
        return self.action[f][x]


@dataclass
class StrictnessWitness:
    """Per-cone comparison maps and bijectivity verdicts."""

    verdict: bool
    cones: list[tuple[str, bool]]
    comparisons: dict[str, dict]


def functor_check(cat: ExplicitCategory, algebra: FinSetAlgebra) -> CheckReport:
    """Exhaustively verify functoriality of the value tables."""
    violations: list[tuple[str, object]] = []
    for obj in cat.objects():
        if obj not in algebra.carrier:
            violations.append(("missing-carrier", obj))
    for f in cat.morphism_names():
        m = cat.morphism(f)
        table = algebra.action.get(f)
        if table is None:
            violations.append(("missing-action", f))
            continue
        dom = algebra.carrier.get(m.dom, ())
        cod = set(algebra.carrier.get(m.cod, ()))
        if set(table) != set(dom) or any(v not in cod for v in table.values()):
            violations.append(("bad-table", f))
    if violations:
        return CheckReport.from_violations(violations)
    for obj in cat.objects():
        i = cat.identity(obj)
        if any(algebra.action[i][x] != x for x in algebra.carrier[obj]):
            violations.append(("identity", obj))
    for f in cat.morphism_names():
        mf = cat.morphism(f)
        for g in cat.morphism_names():
            if mf.cod != cat.morphism(g).dom:
                continue
            h = cat.compose(f, g)
            for x in algebra.carrier[mf.dom]:
                if algebra.action[h][x] != algebra.action[g][algebra.action[f][x]]:
                    violations.append(("composition", (f, g)))
                    break
            else:
                continue
            break
    return CheckReport.from_violations(violations)


def _comparison(algebra: FinSetAlgebra, cone: Cone) -> dict:
    return {
        x: tuple(algebra.action[p][x] for p in cone.projections)
        for x in algebra.carrier[cone.apex]
    }


def is_strict_algebra(s: Sketch, algebra: FinSetAlgebra) -> StrictnessWitness:
    """Check functoriality, then bijectivity of every cone comparison."""
    report = functor_check(s.cat, algebra)
    if not report.verdict:
        raise NotFunctorial(str(report.violations[:3]))
    cones = []
    comparisons = {}
    for cone in s.cones:
        cmp_map = _comparison(algebra, cone)
        comparisons[cone.name] = cmp_map
        size = 1
        for leg in cone.legs:
            size *= len(algebra.carrier[leg])
        bijective = len(set(cmp_map.values())) == len(cmp_map) == size
        cones.append((cone.name, bijective))
    return StrictnessWitness(all(b for _, b in cones), cones, comparisons)


# ---------------------------------------------------------------------------
# enumeration of strict algebras with fixed carriers
# ---------------------------------------------------------------------------


def resolve_carriers(s: Sketch, given: dict) -> tuple[dict, list[Cone], list[Cone]]:
    """Assign carriers: user choices, then cone apexes as literal products.

    Returns (carrier, forcing cones, check-only cones).  A cone whose apex
    carrier preexists only contributes a cardinality check.
    """
    cat = s.cat
    carrier: dict = {}
    for obj, spec in given.items():
        if obj not in set(cat.objects()):
            raise CarrierUnderdetermined(f"unknown object {obj!r}")
        carrier[obj] = tuple(range(spec)) if isinstance(spec, int) else tuple(spec)
    forcing: list[Cone] = []
    checks: list[Cone] = []
    pending = list(s.cones)
    progress = True
    while progress and pending:
        progress = False
        for cone in list(pending):
            if not all(l in carrier for l in cone.legs):
                continue
            size = 1
            for l in cone.legs:
                size *= len(carrier[l])
            if cone.apex in carrier:
                if len(carrier[cone.apex]) != size:
                    raise CarrierConflict(
                        f"cone {cone.name!r} forces carrier size {size} at {cone.apex!r}"
                    )
                checks.append(cone)
            else:
                carrier[cone.apex] = tuple(
                    itertools.product(*(carrier[l] for l in cone.legs))
                )
                forcing.append(cone)
            pending.remove(cone)
            progress = True
    if pending:
        raise CarrierUnderdetermined(
            f"cones {[c.name for c in pending]} have undetermined leg carriers"
        )
    for obj in cat.objects():
        if obj not in carrier:
            raise CarrierUnderdetermined(f"no carrier for object {obj!r}")
    return carrier, forcing, checks


class _Search:
    """Backtracking enumeration of functors extending the forced tables."""

    def __init__(self, s: Sketch, carrier: dict, forcing: list[Cone], checks: list[Cone]):
        self.cat: ExplicitCategory = s.cat
        self.carrier = carrier
        self.checks = checks
        self.morphisms = list(self.cat.morphism_names())
        # tupling plans: apex-targeted morphisms are determined coordinatewise
        self.tuplings: list[tuple[object, tuple]] = []
        trigger: dict = {}
        for cone in forcing:
            if cone.arity == 0:
                continue
            for f in self.morphisms:
                if self.cat.cod(f) != cone.apex:
                    continue
                comps = tuple(self.cat.compose(f, p) for p in cone.projections)
                self.tuplings.append((f, comps))
        for i, (f, comps) in enumerate(self.tuplings):
            for c in comps:
                trigger.setdefault(c, []).append(i)
        self.trigger = trigger
        self.out_of: dict = {}
        self.into: dict = {}
        for f in self.morphisms:
            self.out_of.setdefault(self.cat.dom(f), []).append(f)
            self.into.setdefault(self.cat.cod(f), []).append(f)
        self.seed: dict = {}
        for obj in self.cat.objects():
            self.seed[self.cat.identity(obj)] = {x: x for x in carrier[obj]}
        for cone in forcing:
            for k, p in enumerate(cone.projections):
                table = {x: x[k] for x in carrier[cone.apex]}
                old = self.seed.get(p)
                if old is not None and old != table:
                    raise CarrierConflict(f"projection {p!r} forced twice, differently")
                self.seed[p] = table
        for f in self.morphisms:
            cod = self.cat.cod(f)
            if len(carrier[cod]) == 1 and f not in self.seed:
                only = carrier[cod][0]
                self.seed[f] = {x: only for x in carrier[self.cat.dom(f)]}

    def run(self) -> list[FinSetAlgebra]:
        results: list[FinSetAlgebra] = []
        val = dict(self.seed)
        if self._propagate(val, list(val)):
            self._search(val, results)
        return results

    def _search(self, val: dict, results: list[FinSetAlgebra]) -> None:
        unassigned = [f for f in self.morphisms if f not in val]
        if not unassigned:
            if self._checks_pass(val):
                results.append(
                    FinSetAlgebra(dict(self.carrier), {f: dict(t) for f, t in val.items()})
                )
            return
        f = min(
            unassigned,
            key=lambda g: (
                len(self.carrier[self.cat.cod(g)]) ** len(self.carrier[self.cat.dom(g)]),
                repr(g),
            ),
        )
        dom = self.carrier[self.cat.dom(f)]
        cod = self.carrier[self.cat.cod(f)]
        for outputs in itertools.product(cod, repeat=len(dom)):
            trial = dict(val)
            trial[f] = dict(zip(dom, outputs))
            if self._propagate(trial, [f]):
                self._search(trial, results)

    def _propagate(self, val: dict, queue: list) -> bool:
        while queue:
            f = queue.pop()
            fd, fc = self.cat.dom(f), self.cat.cod(f)
            for g in self.out_of.get(fc, ()):
                if g in val and not self._derive(val, queue, f, g):
                    return False
            for g in self.into.get(fd, ()):
                if g in val and not self._derive(val, queue, g, f):
                    return False
            for i in self.trigger.get(f, ()):
                h, comps = self.tuplings[i]
                if all(c in val for c in comps):
                    table = {
                        x: tuple(val[c][x] for c in comps)
                        for x in self.carrier[self.cat.dom(h)]
                    }
                    if not self._record(val, queue, h, table):
                        return False
        return True

    def _derive(self, val: dict, queue: list, f, g) -> bool:
        h = self.cat.compose(f, g)
        tf, tg = val[f], val[g]
        table = {x: tg[tf[x]] for x in self.carrier[self.cat.dom(f)]}
        return self._record(val, queue, h, table)

    def _record(self, val: dict, queue: list, h, table: dict) -> bool:
        old = val.get(h)
        if old is not None:
            return old == table
        val[h] = table
        queue.append(h)
        return True

    def _checks_pass(self, val: dict) -> bool:
        for cone in self.checks:
            seen = set()
            for x in self.carrier[cone.apex]:
                image = tuple(val[p][x] for p in cone.projections)
                if image in seen:
                    return False
                seen.add(image)
        return True


def enumerate_strict_algebras(s: Sketch, carriers: dict) -> list[FinSetAlgebra]:
    """All strict algebras with the given carriers, in deterministic order.

    ``carriers`` maps objects to either an int (canonical range carrier) or
    an explicit element sequence.  Cone apexes take literal product carriers
    with coordinate projections unless already determined, in which case the
    cone is checked instead; a size mismatch raises ``CarrierConflict``.
    """
    if not isinstance(s.cat, ExplicitCategory):
        raise NotExplicit("enumeration needs an explicit finite category")
    carrier, forcing, checks = resolve_carriers(s, carriers)
    return _Search(s, carrier, forcing, checks).run()


# ---------------------------------------------------------------------------
# algebras over free semi-theories and tree evaluation
# ---------------------------------------------------------------------------


@dataclass
class SortedAlgebra:
    """A finite-set algebra over a free semi-theory or the initial theory.

    Carriers are indexed by tuple objects; actions by tuple projections and
    by generator name.  The projection of a 1-tuple is the identity and is
    never stored.
    """

    carriers: dict
    proj_action: dict = field(default_factory=dict)
    gen_action: dict = field(default_factory=dict)

    @classmethod
    def canonical(
        cls, theory: FreeSemiTheory, sort_carriers: dict, gen_tables: dict, tuples=()
    ) -> "SortedAlgebra":
        """Strict-by-construction algebra: tuple carriers are literal products."""
        needed = {(s,) for s in theory.sorts}
        for g in theory.generators:
            needed.add(g.dom)
            needed.add(g.cod)
        needed.update(tuples)
        carriers = {}
        proj_action = {}
        for t in sorted(needed, key=repr):
            if len(t) == 1:
                carriers[t] = tuple(sort_carriers[t[0]])
                continue
            carriers[t] = tuple(
                itertools.product(*(tuple(sort_carriers[s]) for s in t))
            )
            for k in range(1, len(t) + 1):
                proj_action[(t, k)] = {x: x[k - 1] for x in carriers[t]}
        return cls(carriers=carriers, proj_action=proj_action, gen_action=dict(gen_tables))

    def carrier(self, t: tuple) -> tuple:
        return self.carriers[t]

    def proj(self, t: tuple, k: int) -> dict:
        if len(t) == 1 and k == 1:
            return {x: x for x in self.carriers[t]}
        return self.proj_action[(t, k)]

    def comparison(self, t: tuple) -> dict:
        """The strictness comparison of a tuple object, as a table."""
        return {
            x: tuple(self.proj(t, k)[x] for k in range(1, len(t) + 1))
            for x in self.carriers[t]
        }

    def comparison_inverse(self, t: tuple) -> dict:
        cmp_map = self.comparison(t)
        size = 1
        for s in t:
            size *= len(self.carriers[(s,)])
        if len(set(cmp_map.values())) != len(cmp_map) or len(cmp_map) != size:
            raise NotStrict(f"comparison at {t!r} is not a bijection")
        return {v: x for x, v in cmp_map.items()}


def word_action(theory: FreeSemiTheory, algebra: SortedAlgebra, w: SortWord) -> dict:
    """The algebra's action on a word, letter by letter."""
    table = {x: x for x in algebra.carrier(w.dom)}
    for letter in w.letters:
        if isinstance(letter, ProjLetter):
            step = algebra.proj(letter.dom, letter.k)
        else:
            step = algebra.gen_action[letter.name]
        table = {x: step[v] for x, v in table.items()}
    return table


def evaluate_tree(theory: FreeSemiTheory, algebra: SortedAlgebra, tt: TreeTuple) -> dict:
    """Evaluate a completion morphism on a strict algebra.

    Leaves read coordinates through the projection tables, generator edges
    invert the domain comparison, apply the generator and project the output
    coordinate; the tuple is reassembled through the codomain comparison.
    """
    inverses: dict[tuple, dict] = {}

    def inverse(t: tuple) -> dict:
        if t not in inverses:
            inverses[t] = algebra.comparison_inverse(t)
        return inverses[t]

    def eval_branch(b: Branch, x, domain: tuple):
        if isinstance(b.label, LeafLabel):
            return algebra.proj(domain, b.label.k)[x]
        gen, coord = b.label.gen, b.label.coord
        parts = tuple(eval_branch(c, x, domain) for c in b.children)
        y = algebra.gen_action[gen.name][inverse(gen.dom)[parts]]
        return algebra.proj(gen.cod, coord)[y]

    out = {}
    for x in algebra.carrier(tt.domain):
        values = tuple(eval_branch(t.root, x, tt.domain) for t in tt.trees)
        out[x] = inverse(tt.codomain)[values]
    return out


def extend_restrict_roundtrip(
    theory: FreeSemiTheory, algebra: SortedAlgebra, bound: int = 10
) -> CheckReport:
    """Desk-scale check that the algebra extends uniquely to the completion.

    Verifies that every tree up to the node bound evaluates, that evaluation
    respects grafting on a deterministic family of composites, and that
    restricting along the completion functor gives back the word action.
    """
    from .completion import enumerate_trees, graft_compose, projection_tuple

    violations: list[tuple[str, object]] = []
    domains = sorted(
        {g.dom for g in theory.generators}
        | {g.cod for g in theory.generators}
        | {(s,) for s in theory.sorts},
        key=repr,
    )
    singles: dict[tuple, dict[str, list[LabeledTree]]] = {}
    for d in domains:
        singles[d] = {}
        for s in theory.sorts:
            trees = list(enumerate_trees(theory, d, s, bound))
            singles[d][s] = trees
            for tree in trees:
                tt = TreeTuple(d, (s,), (tree,))
                try:
                    evaluate_tree(theory, algebra, tt)
                except NotStrict as exc:
                    violations.append(("eval", (tree, str(exc))))

    # grafting compatibility on small composable families
    small_bound = max(3, bound // 2)
    for d in domains:
        for mid in domains:
            t_parts = []
            for s in mid:
                pool = [t for t in singles[d].get(s, ()) if t.nodes() <= small_bound]
                if not pool:
                    break
                t_parts.append(pool[:2])
            else:
                for combo in itertools.product(*t_parts) if t_parts else [()]:
                    t_tuple = TreeTuple(d, mid, tuple(combo))
                    for s in theory.sorts:
                        for w_tree in [
                            t for t in singles[mid].get(s, ()) if t.nodes() <= small_bound
                        ][:3]:
                            w_tuple = TreeTuple(mid, (s,), (w_tree,))
                            left = evaluate_tree(
                                theory, algebra, graft_compose(w_tuple, t_tuple)
                            )
                            ev_t = evaluate_tree(theory, algebra, t_tuple)
                            ev_w = evaluate_tree(theory, algebra, w_tuple)
                            right = {x: ev_w[ev_t[x]] for x in ev_t}
                            if left != right:
                                violations.append(("graft", (w_tree, t_tuple)))

    # restriction along the completion functor recovers the word action
    for d in domains:
        for target in domains:
            for w in theory.hom(d, target, bound=4):
                via_theta = evaluate_tree(theory, algebra, theta(theory, w))
                direct = word_action(theory, algebra, w)
                if via_theta != direct:
                    violations.append(("theta", w))
    return CheckReport.from_violations(violations)


# ---------------------------------------------------------------------------
# restriction, corepresented diagrams, localizing maps
# ---------------------------------------------------------------------------


def restrict_along(g: Functor, x: FinSetAlgebra) -> FinSetAlgebra:
    """Precompose an algebra with a functor."""
    carrier = {o: x.carrier[g.obj(o)] for o in g.source.objects()}
    action = {f: x.action[g.mor(f)] for f in g.source.morphism_names()}
    return FinSetAlgebra(carrier, action)


def corepresented(cat: ExplicitCategory, c) -> FinSetAlgebra:
    """The Yoneda diagram of an object: hom sets with post-composition."""
    if not isinstance(cat, ExplicitCategory):
        raise NotExplicit("corepresented diagram needs an explicit category")
    carrier = {d: cat.hom(c, d) for d in cat.objects()}
    action = {}
    for f in cat.morphism_names():
        m = cat.morphism(f)
        action[f] = {g: cat.compose(g, f) for g in carrier[m.dom]}
    return FinSetAlgebra(carrier, action)


@dataclass
class LocalizingMap:
    """The coproduct-of-legs to apex map of corepresented diagrams for a cone."""

    cone: Cone
    cat: ExplicitCategory

    def induced(self, x: FinSetAlgebra, transformations: list[dict]) -> list[tuple]:
        """Precompose natural transformations out of the apex diagram.

        Returns, per transformation, the tuple of its restrictions along each
        leg inclusion, each restriction being a per-object component table.
        """
        out = []
        for t in transformations:
            restricted = []
            for k, leg in enumerate(self.cone.legs):
                p = self.cone.projections[k]
                comp = {
                    d: {
                        h: t[d][self.cat.compose(p, h)]
                        for h in self.cat.hom(leg, d)
                    }
                    for d in self.cat.objects()
                }
                restricted.append(_freeze_nat(comp))
            out.append(tuple(restricted))
        return out


def localizing_map(s: Sketch, cone: Cone) -> LocalizingMap:
    if not isinstance(s.cat, ExplicitCategory):
        raise NotExplicit("localizing maps need an explicit category")
    return LocalizingMap(cone=cone, cat=s.cat)


def natural_transformations(cat: ExplicitCategory, x: FinSetAlgebra, y: FinSetAlgebra) -> list[dict]:
    """Enumerate all natural transformations between two finite diagrams."""
    objects = list(cat.objects())
    by_dom: dict = {}
    for f in cat.morphism_names():
        m = cat.morphism(f)
        by_dom.setdefault(m.dom, []).append((f, m.cod))
    results: list[dict] = []

    def extend(i: int, components: dict) -> None:
        if i == len(objects):
            results.append({o: dict(t) for o, t in components.items()})
            return
        obj = objects[i]
        xs = x.carrier[obj]
        ys = y.carrier[obj]
        for outputs in itertools.product(ys, repeat=len(xs)):
            comp = dict(zip(xs, outputs))
            components[obj] = comp
            if _squares_ok(cat, x, y, components, by_dom):
                extend(i + 1, components)
            del components[obj]

    extend(0, {})
    return results


def _squares_ok(cat, x, y, components, by_dom) -> bool:
    for a, comp_a in components.items():
        for f, b in by_dom.get(a, ()):
            comp_b = components.get(b)
            if comp_b is None:
                continue
            for v in x.carrier[a]:
                if comp_b[x.action[f][v]] != y.action[f][comp_a[v]]:
                    return False
    return True


def _freeze_nat(t: dict) -> tuple:
    return tuple(
        (d, tuple(sorted(t[d].items(), key=repr))) for d in sorted(t, key=repr)
    )


def sorted_natural_transformations(
    theory: FreeSemiTheory, x: SortedAlgebra, y: SortedAlgebra, projections_only: bool = False
) -> list[dict]:
    """Natural transformations between algebras over a free semi-theory.

    Components range over the algebras' common support; naturality is checked
    over every stored projection and (unless ``projections_only``) every
    generator, which suffices since all morphisms are words in those letters.
    """
    support = sorted(set(x.carriers) & set(y.carriers), key=repr)
    arrows: list[tuple[tuple, tuple, dict, dict]] = []
    for (t, k), table in x.proj_action.items():
        target = (t[k - 1],)
        if t in set(support) and target in set(support) and (t, k) in y.proj_action:
            arrows.append((t, target, table, y.proj_action[(t, k)]))
    if not projections_only:
        for g in theory.generators:
            if g.name in x.gen_action and g.name in y.gen_action:
                arrows.append((g.dom, g.cod, x.gen_action[g.name], y.gen_action[g.name]))
    results: list[dict] = []

    def squares_ok(components: dict) -> bool:
        for dom, cod, xf, yf in arrows:
            ca, cb = components.get(dom), components.get(cod)
            if ca is None or cb is None:
                continue
            for v in x.carriers[dom]:
                if cb[xf[v]] != yf[ca[v]]:
                    return False
        return True

    def extend(i: int, components: dict) -> None:
        if i == len(support):
            results.append({t: dict(c) for t, c in components.items()})
            return
        t = support[i]
        xs = x.carriers[t]
        ys = y.carriers[t]
        for outputs in itertools.product(ys, repeat=len(xs)):
            components[t] = dict(zip(xs, outputs))
            if squares_ok(components):
                extend(i + 1, components)
            del components[t]

    extend(0, {})
    return results


def is_strictly_local(s: Sketch, x: FinSetAlgebra) -> bool:
    """Decide strictness through the localizing maps alone.

    For every cone, precomposition must be a bijection from transformations
    out of the apex diagram onto tuples of transformations out of the legs.
    """
    cat = s.cat
    for cone in s.cones:
        apex_nats = natural_transformations(cat, corepresented(cat, cone.apex), x)
        leg_nats = [
            natural_transformations(cat, corepresented(cat, leg), x)
            for leg in cone.legs
        ]
        total = 1
        for ln in leg_nats:
            total *= len(ln)
        images = localizing_map(s, cone).induced(x, apex_nats)
        if len(set(images)) != len(images) or len(images) != total:
            return False
    return True
