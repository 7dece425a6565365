"""Conflict detection and consensual merging on automata."""
from __future__ import annotations

import itertools

from .automaton import DEFAULT_BUDGET, TreeAutomaton, enumerate_trees, reachable_states, trim
from .expansion import expansion_automaton
from .grammar import Bud, DocTree, ExtendedGrammar
from .merge import (
    RootTypeConflict,
    fold_consensus,
    have_consensus_trees,
    mutual_updates,
    tree_consensus,
    trees_in_conflict,
)


def states_in_conflict(a1: TreeAutomaton, a2: TreeAutomaton, q1, q2) -> bool:
    """No transition of q1 shares label and arity with a transition of q2."""
    if a1.type_of(q1) != a2.type_of(q2):
        raise TypeError(f"states have types {a1.type_of(q1)} and {a2.type_of(q2)}")
    shared = {(lab, len(kids)) for lab, kids in a1.next(q1)}
    return not any((lab, len(kids)) in shared for lab, kids in a2.next(q2))


def consensus_product(a1: TreeAutomaton, q01, a2: TreeAutomaton, q02) -> tuple:
    """Relaxed synchronous product whose trees are the consensus documents.

    Product states are pairs. A component that reached an exit state sleeps
    (it is replaced by an asleep state of the right type in every child) and
    no longer constrains the other one; two non-exit components without a
    common transition are in conflict and the pair becomes an exit state.
    """
    if a1.type_of(q01) != a2.type_of(q02):
        raise RootTypeConflict(f"initial states have types {a1.type_of(q01)} and {a2.type_of(q02)}")

    def typed(q):
        s1, s2 = q
        x = a1.type_of(s1)
        # unreachable from a well-typed initial pair
        assert x == a2.type_of(s2), f"reachable state with mismatched types: {q!r}"
        return x

    def is_exit(q):
        typed(q)
        s1, s2 = q
        e1, e2 = a1.is_exit(s1), a2.is_exit(s2)
        if e1 and e2:
            return True
        if e1 or e2:
            return False
        return states_in_conflict(a1, a2, s1, s2)

    def next_fn(q):
        x = typed(q)
        s1, s2 = q
        e1, e2 = a1.is_exit(s1), a2.is_exit(s2)
        if not e1 and not e2:
            if states_in_conflict(a1, a2, s1, s2):
                return [(Bud(x), ())]
            return [
                (l1, tuple(zip(k1, k2)))
                for l1, k1 in a1.next(s1)
                for l2, k2 in a2.next(s2)
                if l1 == l2 and len(k1) == len(k2)
            ]
        if not e1:
            return [(lab, tuple((k, a2.asleep(a1.type_of(k))) for k in kids)) for lab, kids in a1.next(s1)]
        if not e2:
            return [(lab, tuple((a1.asleep(a2.type_of(k)), k) for k in kids)) for lab, kids in a2.next(s2)]
        return [(l1, ()) for l1, k1 in a1.next(s1) if not k1 for l2, k2 in a2.next(s2) if not k2 and l1 == l2]

    def asleep(sort):
        return (a1.asleep(sort), a2.asleep(sort))

    def describe(q):
        return f"({a1.describe(q[0])}, {a2.describe(q[1])})"

    a = TreeAutomaton(is_exit, next_fn, typed, asleep=asleep, name=f"({a1.name} ⊗ {a2.name})", describe=describe)
    return a, (q01, q02)


def consensus_product_k(pairs: list) -> tuple:
    """Left fold of :func:`consensus_product` over ``(automaton, initial_state)`` pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("need at least one automaton")
    a, q = pairs[0]
    for a2, q2 in pairs[1:]:
        a, q = consensus_product(a, q, a2, q2)
    return a, q


def simplest_asts(a: TreeAutomaton, q0, state_budget: int = DEFAULT_BUDGET) -> list:
    """Trees generated without repeating a state along any root-to-node path."""
    reachable_states(a, q0, state_budget)
    memo = {}

    def gen(q, path: frozenset) -> frozenset:
        # only states on the path that are reachable from q matter
        key = (q, path)
        if key in memo:
            return memo[key]
        path2 = path | {q}
        out = set()
        for label, kids in a.next(q):
            if any(k in path2 for k in kids):
                continue
            options = [gen(k, path2) for k in kids]
            if any(not o for o in options):
                continue
            out.update(_combine(label, options))
        res = frozenset(out)
        memo[key] = res
        return res

    trees = gen(q0, frozenset())
    return sorted(trees, key=DocTree.sort_key)


def _combine(label, options):
    if not options:
        yield DocTree(label)
        return
    for combo in itertools.product(*options):
        yield DocTree(label, combo)


def build_expansions(eg: ExtendedGrammar, replicas, trim_unproductive: bool = True) -> list:
    out = []
    for v, r in replicas:
        a, q = expansion_automaton(eg, v, r)
        if trim_unproductive:
            a = trim(a, q)
        out.append((a, q))
    return out


def consensus_automaton(eg: ExtendedGrammar, replicas, trim_unproductive: bool = True) -> tuple:
    return consensus_product_k(build_expansions(eg, replicas, trim_unproductive))


def consensual_merge(
    eg: ExtendedGrammar,
    replicas,
    bound: int = 12,
    mode: str = "simplest",
    trim_unproductive: bool = True,
    state_budget: int = DEFAULT_BUDGET,
) -> list:
    """Consensus documents of a family of ``(view, replica)`` pairs.

    ``mode`` is ``"simplest"`` (acyclic unfoldings of the consensus
    automaton) or ``"enumerate"`` (every consensus tree up to ``bound``
    nodes). With ``trim_unproductive`` the expansion automata lose their
    transitions into states that generate no tree before being combined.
    """
    a, q0 = consensus_automaton(eg, replicas, trim_unproductive)
    if mode == "simplest":
        return simplest_asts(a, q0, state_budget)
    if mode == "enumerate":
        return enumerate_trees(a, q0, bound)
    raise ValueError(f"unknown mode {mode!r}")


__all__ = [
    "RootTypeConflict",
    "have_consensus_trees",
    "trees_in_conflict",
    "tree_consensus",
    "fold_consensus",
    "mutual_updates",
    "states_in_conflict",
    "consensus_product",
    "consensus_product_k",
    "simplest_asts",
    "build_expansions",
    "consensus_automaton",
    "consensual_merge",
]
