"""Levelwise free resolution of a category and its simplicial operators.

A level-0 word is a composable sequence of base-category morphisms (the free
category on all morphisms); a level-k word is a composable sequence of
level-(k-1) words.  Composition at every level is concatenation, the empty
word is the identity, and no flattening across brackets ever happens.

The face and degeneracy operators are the comonad bar operators: face i
merges the bracket layer at depth i (the innermost face composes in the base
category), degeneracy i wraps each letter at depth i in a singleton bracket.
They satisfy the simplicial identities, which the test suite checks
exhaustively at low levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .errors import IndexOutOfRange, LevelMismatch, NotComposable


@dataclass(frozen=True)
class ResolutionWord:
    """A morphism of the level-k free resolution category."""

    level: int
    dom: object
    cod: object
    letters: tuple

    def __len__(self) -> int:
        return len(self.letters)


def word0(cat, morphisms) -> ResolutionWord:
    """Level-0 word from a composable sequence of base morphisms."""
    ms = tuple(morphisms)
    if not ms:
        raise ValueError("empty sequence needs an explicit object; use identity_word")
    dom = _dom(cat, ms[0])
    at = dom
    for m in ms:
        if _dom(cat, m) != at:
            raise NotComposable("letters are not composable")
        at = _cod(cat, m)
    return ResolutionWord(0, dom, at, ms)


def identity_word(level: int, obj) -> ResolutionWord:
    return ResolutionWord(level, obj, obj, ())


def wrap(w: ResolutionWord) -> ResolutionWord:
    """The singleton bracket: a one-letter word one level up."""
    return ResolutionWord(w.level + 1, w.dom, w.cod, (w,))


def include_at_level(cat, f, level: int) -> ResolutionWord:
    """A base morphism as a level-k word of iterated singleton brackets."""
    w = ResolutionWord(0, _dom(cat, f), _cod(cat, f), (f,))
    for _ in range(level):
        w = wrap(w)
    return w


def resolution_compose(a: ResolutionWord, b: ResolutionWord) -> ResolutionWord:
    """Concatenation at a common level: "a then b"."""
    if a.level != b.level:
        raise LevelMismatch(f"levels {a.level} != {b.level}")
    if a.cod != b.dom:
        raise NotComposable(f"cod {a.cod!r} != dom {b.dom!r}")
    return ResolutionWord(a.level, a.dom, b.cod, a.letters + b.letters)


def counit(cat, w: ResolutionWord):
    """Flatten all brackets and compose in the base category."""
    if w.level == 0:
        return _fold(cat, w.dom, w.letters)
    return _fold(cat, w.dom, [counit(cat, l) for l in w.letters])


def face(cat, i: int, w: ResolutionWord) -> ResolutionWord:
    """The i-th face: merge brackets at depth i (compose in the base at i = level)."""
    if w.level < 1:
        raise IndexOutOfRange("face needs level >= 1")
    if not 0 <= i <= w.level:
        raise IndexOutOfRange(f"face index {i} out of range for level {w.level}")
    if i == 0:
        merged = reduce(resolution_compose, w.letters, identity_word(w.level - 1, w.dom))
        return merged
    if w.level == 1:
        return ResolutionWord(0, w.dom, w.cod, tuple(_fold(cat, l.dom, l.letters) for l in w.letters))
    return ResolutionWord(
        w.level - 1, w.dom, w.cod, tuple(face(cat, i - 1, l) for l in w.letters)
    )


def degeneracy(cat, i: int, w: ResolutionWord) -> ResolutionWord:
    """The i-th degeneracy: wrap letters at depth i in singleton brackets."""
    if not 0 <= i <= w.level:
        raise IndexOutOfRange(f"degeneracy index {i} out of range for level {w.level}")
    if i == 0:
        if w.level == 0:
            letters = tuple(
                ResolutionWord(0, _dom(cat, l), _cod(cat, l), (l,)) for l in w.letters
            )
            return ResolutionWord(1, w.dom, w.cod, letters)
        return ResolutionWord(w.level + 1, w.dom, w.cod, tuple(wrap(l) for l in w.letters))
    return ResolutionWord(
        w.level + 1, w.dom, w.cod, tuple(degeneracy(cat, i - 1, l) for l in w.letters)
    )


def enumerate_resolution_words(
    cat, level: int, a, b, max_word_len: int
) -> list[ResolutionWord]:
    """All level-k words a -> b whose words have at most ``max_word_len``
    letters at every level.  Letters at level 0 range over all base
    morphisms, identities included, since each resolution level is free on
    all morphisms of the previous one."""
    if level == 0:
        base = _base_morphisms(cat)
        out = [identity_word(0, a)] if a == b else []
        frontier = [(a, ())]
        for _ in range(max_word_len):
            frontier = [
                (cat.cod(m) if hasattr(cat, "cod") else m.cod, letters + (m,))
                for at, letters in frontier
                for m in base.get(at, ())
            ]
            out.extend(
                ResolutionWord(0, a, b, letters) for at, letters in frontier if at == b
            )
        return out
    out = [identity_word(level, a)] if a == b else []
    chains = [[a]]
    for _ in range(max_word_len):
        chains = [c + [o] for c in chains for o in cat.objects()]
        for chain in chains:
            if chain[-1] != b:
                continue
            pools = [
                enumerate_resolution_words(cat, level - 1, x, y, max_word_len)
                for x, y in zip(chain, chain[1:])
            ]
            for letters in _product(pools):
                out.append(ResolutionWord(level, a, b, letters))
    return out


def _product(pools):
    if not pools:
        yield ()
        return
    for head in pools[0]:
        for tail in _product(pools[1:]):
            yield (head,) + tail


def _base_morphisms(cat) -> dict:
    by_dom: dict = {}
    try:
        names = cat.morphism_names()
        for f in names:
            by_dom.setdefault(cat.dom(f), []).append(f)
    except AttributeError:
        for a in cat.objects():
            for b in cat.objects():
                for w in cat.hom(a, b, 3):
                    by_dom.setdefault(a, []).append(w)
    return by_dom


def _fold(cat, dom, morphisms):
    out = cat.identity(dom)
    for m in morphisms:
        out = cat.compose(out, m)
    return out


def _dom(cat, f):
    try:
        return cat.dom(f)
    except AttributeError:
        return f.dom


def _cod(cat, f):
    try:
        return cat.cod(f)
    except AttributeError:
        return f.cod
