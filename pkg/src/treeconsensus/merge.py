"""Tree-level conflicts and consensus."""
from __future__ import annotations

import functools
from typing import Iterable

from .grammar import DocTree, ExtendedGrammar, TreeError


class RootTypeConflict(TreeError):
    pass


def have_consensus_trees(eg: ExtendedGrammar, t1: DocTree, t2: DocTree) -> bool:
    return eg.type_of_label(t1.label) == eg.type_of_label(t2.label)


def _check_roots(eg, t1, t2):
    if not have_consensus_trees(eg, t1, t2):
        raise RootTypeConflict(
            f"roots have types {eg.type_of_label(t1.label)} and {eg.type_of_label(t2.label)}"
        )


def trees_in_conflict(eg: ExtendedGrammar, t1: DocTree, t2: DocTree) -> list:
    """Minimal addresses where both trees hold different non-bud labels."""
    _check_roots(eg, t1, t2)
    out = []

    def go(a, b, w):
        if a.is_bud or b.is_bud:
            return
        if a.label != b.label:
            out.append(w)
            return
        for i, (x, y) in enumerate(zip(a.children, b.children), 1):
            go(x, y, w + (i,))

    go(t1, t2, ())
    return out


def tree_consensus(eg: ExtendedGrammar, t1: DocTree, t2: DocTree) -> DocTree:
    """Merge two same-type trees; a bud yields to the other side, a conflict becomes a bud."""
    _check_roots(eg, t1, t2)

    def go(a, b):
        if a.is_bud:
            return b
        if b.is_bud:
            return a
        if a.label != b.label:
            return DocTree.bud(eg.type_of_label(a.label))
        if a is b:
            return a
        return DocTree(a.label, [go(x, y) for x, y in zip(a.children, b.children)])

    return go(t1, t2)


def fold_consensus(eg: ExtendedGrammar, trees: Iterable[DocTree]) -> DocTree:
    return functools.reduce(lambda x, y: tree_consensus(eg, x, y), trees)


def mutual_updates(eg: ExtendedGrammar, t1: DocTree, t2: DocTree) -> bool:
    """Each tree has a bud at some address where the other is developed."""
    if trees_in_conflict(eg, t1, t2):
        raise TreeError("trees are in conflict")
    left = right = False

    def go(a, b):
        nonlocal left, right
        if a.is_bud and not b.is_bud:
            left = True
            return
        if b.is_bud and not a.is_bud:
            right = True
            return
        for x, y in zip(a.children, b.children):
            go(x, y)

    go(t1, t2)
    return left and right
