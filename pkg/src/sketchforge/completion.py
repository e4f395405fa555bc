"""Tree-shaped morphisms of the algebraic completion of a free semi-theory.

A morphism from the tuple object of ``dom`` to a single sort is a rooted
planar tree of labeled edges.  The representation here is a recursive
``Branch``: one branch per edge, children ordered, the tree's root branch
being the lowest edge.  Leaf branches carry a projection of the tree's domain
("read coordinate k"); internal branches carry a generator with an output
coordinate.  With that encoding, grafting a tuple of trees onto the leaves of
another tree is plain substitution, and substituting a bare projection tree
degenerates to relabeling a leaf, so validity is preserved syntactically.

Tuple-to-tuple morphisms are tuples of trees, composed componentwise.  Trees
are the normal forms of the completion: equality is structural equality and
no rewriting ever happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import NotComposable, UnsupportedGenerator
from .sketches import CheckReport, FreeSemiTheory, ProjLetter, SortGenerator, SortWord


@dataclass(frozen=True)
class LeafLabel:
    """Projection of the ambient tree's domain tuple onto coordinate k."""

    k: int


@dataclass(frozen=True)
class GenLabel:
    """A generator edge selecting coordinate ``coord`` of the generator's codomain."""

    gen: SortGenerator
    coord: int


@dataclass(frozen=True)
class Branch:
    """One edge of a tree plus everything grafted above its tail vertex."""

    label: LeafLabel | GenLabel
    children: tuple["Branch", ...] = ()

    def edges(self) -> int:
        return 1 + sum(c.edges() for c in self.children)


@dataclass(frozen=True)
class LabeledTree:
    """A single-output morphism of the completion: domain tuple to one sort."""

    domain: tuple
    cod_sort: str
    root: Branch

    def nodes(self) -> int:
        return self.root.edges() + 1


@dataclass(frozen=True)
class TreeTuple:
    """A tuple of trees sharing a domain; the general completion morphism."""

    domain: tuple
    codomain: tuple
    trees: tuple[LabeledTree, ...]


def selected_sort(domain: tuple, b: Branch) -> str | None:
    """The sort the branch's edge carries, or None if the label is out of range."""
    if isinstance(b.label, LeafLabel):
        if 1 <= b.label.k <= len(domain):
            return domain[b.label.k - 1]
        return None
    if 1 <= b.label.coord <= len(b.label.gen.cod):
        return b.label.gen.cod[b.label.coord - 1]
    return None


def projection_tree(domain: tuple, k: int) -> LabeledTree:
    return LabeledTree(domain, domain[k - 1], Branch(LeafLabel(k)))


def projection_tuple(domain: tuple) -> TreeTuple:
    """The identity of the tuple object: one bare projection tree per slot."""
    return TreeTuple(
        domain, domain, tuple(projection_tree(domain, k) for k in range(1, len(domain) + 1))
    )


def tree_validate(t: LabeledTree, theory: FreeSemiTheory) -> CheckReport:
    """Check the six tree conditions, reporting each violation by number.

    Condition (1), one incoming edge at the lowest vertex, is guaranteed by
    the branch encoding and is never reported.
    """
    violations: list[tuple[str, object]] = []
    declared = set(theory.generators)

    def walk(b: Branch, path: tuple[int, ...]) -> None:
        if isinstance(b.label, LeafLabel):
            if b.children:
                violations.append(("(5)", path))
            if not (1 <= b.label.k <= len(t.domain)):
                violations.append(("(4)", path))
            return
        gen, coord = b.label.gen, b.label.coord
        if gen not in declared:
            violations.append(("(2)", path))
            return
        if not (1 <= coord <= len(gen.cod)):
            violations.append(("(2)", path))
            return
        if not b.children:
            # a generator edge out of a childless vertex would be an initial
            # edge not labeled by a projection
            violations.append(("(4)", path))
            return
        picked = tuple(selected_sort(t.domain, c) for c in b.children)
        if None not in picked and gen.dom != picked:
            violations.append(("(3)", path))
        for i, c in enumerate(b.children):
            walk(c, path + (i,))

    if any(s not in theory.sorts for s in t.domain) or t.cod_sort not in theory.sorts:
        violations.append(("(2)", ()))
    walk(t.root, ())
    if selected_sort(t.domain, t.root) != t.cod_sort:
        violations.append(("(6)", ()))
    return CheckReport.from_violations(violations)


def tuple_validate(tt: TreeTuple, theory: FreeSemiTheory) -> CheckReport:
    violations: list[tuple[str, object]] = []
    if len(tt.trees) != len(tt.codomain):
        violations.append(("tuple-length", len(tt.trees)))
    for i, (tree, sort) in enumerate(zip(tt.trees, tt.codomain)):
        if tree.domain != tt.domain:
            violations.append(("tuple-domain", i))
        if tree.cod_sort != sort:
            violations.append(("tuple-codomain", i))
        rep = tree_validate(tree, theory)
        violations.extend((rule, (i, data)) for rule, data in rep.violations)
    return CheckReport.from_violations(violations)


def graft_compose(w: TreeTuple, t: TreeTuple) -> TreeTuple:
    """Componentwise grafting: plant t's trees into w's leaves; "w after t"."""
    if w.domain != t.codomain:
        raise NotComposable(f"domain {w.domain!r} != codomain {t.codomain!r}")

    def graft(b: Branch) -> Branch:
        if isinstance(b.label, LeafLabel):
            return t.trees[b.label.k - 1].root
        return Branch(b.label, tuple(graft(c) for c in b.children))

    trees = tuple(
        LabeledTree(t.domain, tree.cod_sort, graft(tree.root)) for tree in w.trees
    )
    return TreeTuple(t.domain, w.codomain, trees)


def _theta_letter(letter) -> TreeTuple:
    if isinstance(letter, ProjLetter):
        return TreeTuple(letter.dom, letter.cod, (projection_tree(letter.dom, letter.k),))
    gen: SortGenerator = letter
    if len(gen.dom) == 0:
        raise UnsupportedGenerator(f"generator {gen.name!r} has empty domain")
    fan_children = tuple(Branch(LeafLabel(k)) for k in range(1, len(gen.dom) + 1))
    trees = tuple(
        LabeledTree(gen.dom, gen.cod[j - 1], Branch(GenLabel(gen, j), fan_children))
        for j in range(1, len(gen.cod) + 1)
    )
    return TreeTuple(gen.dom, gen.cod, trees)


def theta(theory: FreeSemiTheory, word: SortWord) -> TreeTuple:
    """The completion functor on a word: graft the per-letter tree tuples."""
    acc = projection_tuple(word.dom)
    for letter in word.letters:
        acc = graft_compose(_theta_letter(letter), acc)
    return acc


def theta_preimage(theory: FreeSemiTheory, tt: TreeTuple) -> SortWord | None:
    """Invert the completion functor structurally; None if not in its image.

    Trees are normal forms, so the decomposition is deterministic: a
    projection tuple is the image of an identity, a single bare projection
    tree is the image of that projection, and a tuple of same-generator fans
    over a common forest strips one letter.
    """
    if tt == projection_tuple(tt.domain) and tt.codomain == tt.domain:
        return SortWord(tt.domain, tt.codomain, ())
    if len(tt.trees) == 1 and isinstance(tt.trees[0].root.label, LeafLabel):
        k = tt.trees[0].root.label.k
        if (
            len(tt.domain) >= 2
            and not tt.trees[0].root.children
            and 1 <= k <= len(tt.domain)
            and tt.codomain == (tt.domain[k - 1],)
        ):
            return SortWord(tt.domain, tt.codomain, (ProjLetter(tt.domain, k),))
        return None
    if not tt.trees:
        return _theta_preimage_empty(theory, tt)
    roots = [tree.root for tree in tt.trees]
    first = roots[0].label
    if not isinstance(first, GenLabel):
        return None
    gen = first.gen
    if len(tt.trees) != len(gen.cod):
        return None
    for j, b in enumerate(roots, start=1):
        if not isinstance(b.label, GenLabel) or b.label.gen != gen or b.label.coord != j:
            return None
        if b.children != roots[0].children:
            return None
    forest = roots[0].children
    if len(forest) != len(gen.dom):
        return None
    inner = TreeTuple(
        tt.domain,
        gen.dom,
        tuple(
            LabeledTree(tt.domain, gen.dom[i], forest[i]) for i in range(len(forest))
        ),
    )
    prefix = theta_preimage(theory, inner)
    if prefix is None:
        return None
    return SortWord(tt.domain, gen.cod, prefix.letters + (gen,))


def _theta_preimage_empty(theory: FreeSemiTheory, tt: TreeTuple) -> SortWord | None:
    # The empty tuple out of a tuple object is the theta image of any word
    # into the empty tuple; search for the shortest witness.
    if tt.codomain != ():
        return None
    if tt.domain == ():
        return SortWord((), (), ())
    words, _ = theory.hom_complete(tt.domain, (), bound=8)
    return words[0] if words else None


def enumerate_trees(
    theory: FreeSemiTheory, domain: tuple, cod_sort: str, max_nodes: int
) -> Iterator[LabeledTree]:
    """Complete, duplicate-free enumeration of valid trees.

    Order: by edge count, then projections before generators (declaration
    order), then child splits lexicographically.  A tree has edges + 1 nodes,
    so the bound must be at least 2 to produce anything.
    """
    max_edges = max_nodes - 1
    memo: dict[tuple[str, int], tuple[Branch, ...]] = {}

    def branches(sort: str, edges: int) -> tuple[Branch, ...]:
        key = (sort, edges)
        if key in memo:
            return memo[key]
        out: list[Branch] = []
        if edges >= 1:
            if edges == 1:
                for k in range(1, len(domain) + 1):
                    if domain[k - 1] == sort:
                        out.append(Branch(LeafLabel(k)))
            else:
                for gen in theory.generators:
                    arity = len(gen.dom)
                    if arity == 0 or arity > edges - 1:
                        continue
                    for coord in range(1, len(gen.cod) + 1):
                        if gen.cod[coord - 1] != sort:
                            continue
                        for split in _compositions(edges - 1, arity):
                            for kids in _product_branches(gen.dom, split, branches):
                                out.append(Branch(GenLabel(gen, coord), kids))
        memo[key] = tuple(out)
        return memo[key]

    for edges in range(1, max_edges + 1):
        for b in branches(cod_sort, edges):
            yield LabeledTree(domain, cod_sort, b)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of ``total`` into ``parts`` positive summands."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _product_branches(sorts: tuple, split: tuple[int, ...], branches) -> Iterator[tuple]:
    if not sorts:
        yield ()
        return
    for head in branches(sorts[0], split[0]):
        for tail in _product_branches(sorts[1:], split[1:], branches):
            yield (head,) + tail


# ---------------------------------------------------------------------------
# Filtration degree
# ---------------------------------------------------------------------------


def filtration_degree(theory: FreeSemiTheory, tt: TreeTuple) -> int:
    """Least filtration level containing the tuple.

    Level 0 is the image of the underlying free semi-theory; each next level
    adds tuples of lower-level single trees, closed under post-composition
    with level-0 morphisms.  The search enumerates joint leaf cuts: the part
    below a cut must be a level-0 image and the grafted subtrees recurse.
    """
    return _degree(theory, tt, frozenset())


def s_filtration_degree(theory: FreeSemiTheory, tt: TreeTuple) -> int:
    """The projection-closure variant: tupling without free post-composition."""
    if theta_preimage(theory, tt) is not None:
        return 0
    return 1 + max(
        (_degree(theory, _as_single(t), frozenset()) for t in tt.trees), default=0
    )


def _as_single(tree: LabeledTree) -> TreeTuple:
    return TreeTuple(tree.domain, (tree.cod_sort,), (tree,))


def _degree(theory: FreeSemiTheory, tt: TreeTuple, active: frozenset) -> int:
    if theta_preimage(theory, tt) is not None:
        return 0
    best = None
    for cut_sets in _joint_cuts(tt):
        subtrees, lower = cut_sets
        if len(tt.trees) == 1 and len(subtrees) == 1 and subtrees[0] == _as_single(tt.trees[0]):
            continue
        if theta_preimage(theory, lower) is None:
            continue
        if any(s in active for s in subtrees):
            continue
        depth = 0
        ok = True
        for sub in subtrees:
            d = _degree(theory, sub, active | frozenset(subtrees))
            if d is None:
                ok = False
                break
            depth = max(depth, d)
        if ok:
            cand = 1 + depth
            best = cand if best is None else min(best, cand)
            if best == 1:
                break
    if best is None:
        # trivial cut always exists, so this is unreachable for valid input
        raise ValueError("no decomposition found")
    return best


def _branch_cuts(b: Branch) -> Iterator[tuple[tuple[Branch, ...], object]]:
    """All leaf-covering antichain cuts of a branch.

    Yields (cut subtree roots in left-to-right order, skeleton) where the
    skeleton is the branch with each cut edge replaced by a placeholder
    index into the cut list.
    """
    yield (b,), ("cut", 0)
    if isinstance(b.label, GenLabel) and b.children:
        for combo in _product_cuts(b.children):
            subs, skels = combo
            shifted = []
            offset = 0
            fixed_skels = []
            for sub_list, skel in zip(subs, skels):
                fixed_skels.append(_shift(skel, offset))
                offset += len(sub_list)
                shifted.extend(sub_list)
            yield tuple(shifted), (b.label, tuple(fixed_skels))


def _product_cuts(children: tuple[Branch, ...]):
    if not children:
        yield (), ()
        return
    for head_subs, head_skel in _branch_cuts(children[0]):
        for tail_subs, tail_skels in _product_cuts(children[1:]):
            yield ((head_subs,) + tail_subs, (head_skel,) + tail_skels)


def _shift(skel, offset: int):
    if isinstance(skel, tuple) and len(skel) == 2 and skel[0] == "cut":
        return ("cut", skel[1] + offset)
    label, kids = skel
    return (label, tuple(_shift(k, offset) for k in kids))


def _joint_cuts(tt: TreeTuple):
    """Joint cuts across all components with shared identification of equal
    cut subtrees; yields (distinct subtrees as singles, lower TreeTuple)."""
    per_tree = [list(_branch_cuts(t.root)) for t in tt.trees]
    for choice in _product_list(per_tree):
        all_subs: list[Branch] = []
        skels = []
        for subs, skel in choice:
            base = len(all_subs)
            all_subs.extend(subs)
            skels.append(_shift(skel, base))
        distinct: list[Branch] = []
        remap: dict[int, int] = {}
        for i, sub in enumerate(all_subs):
            try:
                j = distinct.index(sub)
            except ValueError:
                j = len(distinct)
                distinct.append(sub)
            remap[i] = j
        lower_domain = tuple(
            selected_sort(tt.domain, sub) for sub in distinct
        )
        if None in lower_domain:
            continue
        lower_trees = tuple(
            LabeledTree(lower_domain, tt.codomain[i], _rebuild(skels[i], remap, lower_domain))
            for i in range(len(tt.trees))
        )
        lower = TreeTuple(lower_domain, tt.codomain, lower_trees)
        singles = tuple(
            _as_single(LabeledTree(tt.domain, selected_sort(tt.domain, sub), sub))
            for sub in distinct
        )
        yield singles, lower


def _rebuild(skel, remap: dict[int, int], lower_domain: tuple) -> Branch:
    if isinstance(skel, tuple) and len(skel) == 2 and skel[0] == "cut":
        return Branch(LeafLabel(remap[skel[1]] + 1))
    label, kids = skel
    return Branch(label, tuple(_rebuild(k, remap, lower_domain) for k in kids))


def _product_list(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product_list(lists[1:]):
            yield (head,) + tail
