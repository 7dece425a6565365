"""Expansion automaton of an updated partial replica.

States are ``ForestState(tag, sort, forest)``. ``Close`` states generate
non-bud trees of the sort whose projection is ``sort[forest]`` (visible sort)
or ``forest`` itself (invisible sort); ``Open`` states generate the bud.
"""
from __future__ import annotations

from typing import NamedTuple

from .automaton import TreeAutomaton
from .grammar import Bud, ExtendedGrammar, SortTree
from .views import ViewError, check_view_tree, dyck_key

OPEN = "Open"
CLOSE = "Close"


class ForestState(NamedTuple):
    tag: str
    sort: str
    forest: tuple  # of SortTree

    @property
    def key(self) -> tuple:
        return (self.tag, self.sort, dyck_key(self.forest))

    def __str__(self) -> str:
        body = " ".join(t.sexpr() for t in self.forest)
        return f"<{self.tag} {self.sort}, [{body}]>"


def _splits(forest: tuple, rhs: tuple, visible, start: int = 0):
    """Yield child-state lists for every admissible cut of ``forest[start:]``.

    Visible positions consume exactly one tree of that sort; invisible ones
    consume any contiguous run, possibly empty.
    """
    if not rhs:
        if start == len(forest):
            yield ()
        return
    x, rest = rhs[0], rhs[1:]
    remaining_visible = sum(1 for s in rest if s in visible)
    if x in visible:
        if start >= len(forest):
            return
        tree = forest[start]
        if tree.sort != x:
            return
        child = ForestState(OPEN, x, ()) if tree.bud else ForestState(CLOSE, x, tree.children)
        for tail in _splits(forest, rest, visible, start + 1):
            yield (child,) + tail
    else:
        for end in range(start, len(forest) - remaining_visible + 1):
            child = ForestState(CLOSE, x, forest[start:end])
            for tail in _splits(forest, rest, visible, end):
                yield (child,) + tail


def expansion_automaton(eg: ExtendedGrammar, v, r: SortTree) -> tuple:
    """Automaton whose trees are exactly the minimal documents projecting onto ``r``.

    Returns ``(automaton, initial_state)``.
    """
    visible = frozenset(v)
    check_view_tree(eg, visible, r)
    if r.sort != eg.axiom:
        raise ViewError(f"replica root is {r.sort}, expected the axiom {eg.axiom}")
    q0 = ForestState(OPEN, r.sort, ()) if r.bud else ForestState(CLOSE, r.sort, r.children)

    def is_exit(q):
        return q.tag == OPEN or (q.sort not in visible and not q.forest)

    def next_fn(q):
        if is_exit(q):
            return [(Bud(q.sort), ())]
        out = []
        for p in eg.productions_of(q.sort):
            for kids in _splits(q.forest, p.rhs, visible):
                out.append((p.name, kids))
        return out

    a = TreeAutomaton(
        is_exit,
        next_fn,
        lambda q: q.sort,
        asleep=lambda x: ForestState(OPEN, x, ()),
        name=f"expansion[{','.join(sorted(visible))}]",
        describe=str,
    )
    return a, q0


def forest_slices(r: SortTree) -> set:
    """All contiguous runs of every children sequence in ``r`` (plus ``(r,)``)."""
    out = {(), (r,)}
    for _, node in r.items():
        kids = node.children
        for i in range(len(kids)):
            for j in range(i + 1, len(kids) + 1):
                out.add(kids[i:j])
    return out
