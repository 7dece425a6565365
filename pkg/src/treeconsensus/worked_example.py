"""The two-author worked example: grammar, views and the edited replicas.

Replicas are written as bracket words: ``()`` is A, ``[]`` is B in the first
view and C in the second.
"""
from __future__ import annotations

from .grammar import ExtendedGrammar, extend_grammar, fig8_grammar
from .views import make_view, parse_dyck

TV1 = "(([[()()][()]])[()])"
TV2 = "([([][]()[]())[]][[][]]())"
BRACKETS1 = {"A": "()", "B": "[]"}
BRACKETS2 = {"A": "()", "C": "[]"}


def grammar() -> ExtendedGrammar:
    return extend_grammar(fig8_grammar())


def replicas(eg: ExtendedGrammar | None = None) -> list:
    """``[(view, view_tree), ...]`` for the two co-authors."""
    eg = grammar() if eg is None else eg
    (tv1,) = parse_dyck(TV1, BRACKETS1)
    (tv2,) = parse_dyck(TV2, BRACKETS2)
    return [(make_view(eg, "AB"), tv1), (make_view(eg, "AC"), tv2)]
