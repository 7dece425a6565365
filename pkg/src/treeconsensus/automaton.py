"""Lazy descending tree automata with exit states.

An automaton is given behaviourally: ``is_exit(q)``, ``next(q)`` (a list of
``(label, children_states)`` pairs) and ``type_of(q)``. States are built on
demand and must be hashable; equal states are equal keys. ``next`` results
are memoized, so after the first full exploration the automaton behaves as a
frozen, read-only table.
"""
from __future__ import annotations

import itertools
from collections import deque
from typing import Callable

from .grammar import Bud, DocTree, ExtendedGrammar

DEFAULT_BUDGET = 100_000


class BudgetExceeded(RuntimeError):
    pass


class TreeAutomaton:
    def __init__(
        self,
        is_exit: Callable,
        next_fn: Callable,
        type_of: Callable,
        asleep: Callable | None = None,
        name: str = "automaton",
        describe: Callable | None = None,
    ):
        self._is_exit = is_exit
        self._next_fn = next_fn
        self._type_of = type_of
        self._asleep = asleep
        self._describe = describe
        self.name = name
        self._next_cache: dict = {}
        self._exit_cache: dict = {}

    def is_exit(self, q) -> bool:
        try:
            return self._exit_cache[q]
        except KeyError:
            return self._exit_cache.setdefault(q, bool(self._is_exit(q)))

    def next(self, q) -> list:
        try:
            return self._next_cache[q]
        except KeyError:
            pass
        out = []
        seen = set()
        for label, kids in self._next_fn(q):
            tr = (label, tuple(kids))
            if tr not in seen:
                seen.add(tr)
                out.append(tr)
        self._next_cache[q] = out
        return out

    def type_of(self, q) -> str:
        return self._type_of(q)

    def asleep(self, sort: str):
        """An exit state of the given type (used to park a finished component)."""
        if self._asleep is None:
            raise TypeError(f"{self.name} has no asleep states")
        return self._asleep(sort)

    def describe(self, q) -> str:
        return self._describe(q) if self._describe else repr(q)

    def __repr__(self) -> str:
        return f"<TreeAutomaton {self.name}>"


def from_grammar(eg: ExtendedGrammar) -> TreeAutomaton:
    """The grammar read as an automaton; states are sort names and bud sort names.

    State ``X`` has one transition per X-production plus the bud transition,
    so that its language is every (possibly open) AST of type X. State
    ``X_ω`` is an exit state whose only tree is the bud.
    """
    bud_state_sort = {b: x for x, b in eg.bud_sorts.items()}

    def is_exit(q):
        return q in bud_state_sort

    def next_fn(q):
        if q in bud_state_sort:
            return [(Bud(bud_state_sort[q]), ())]
        out = [(p.name, p.rhs) for p in eg.productions_of(q)]
        out.append((Bud(q), ()))
        return out

    def type_of(q):
        return bud_state_sort.get(q, q)

    return TreeAutomaton(is_exit, next_fn, type_of, asleep=lambda x: eg.bud_sorts[x], name="grammar")


def reachable_states(a: TreeAutomaton, q0, state_budget: int = DEFAULT_BUDGET) -> list:
    """Breadth-first closure of ``q0`` under ``next``, in discovery order."""
    seen = {q0: None}
    queue = deque([q0])
    while queue:
        q = queue.popleft()
        for _, kids in a.next(q):
            for k in kids:
                if k not in seen:
                    seen[k] = None
                    if len(seen) > state_budget:
                        raise BudgetExceeded(f"more than {state_budget} states reachable")
                    queue.append(k)
    return list(seen)


def productive_states(a: TreeAutomaton, q0, state_budget: int = DEFAULT_BUDGET) -> set:
    """Least fixpoint: states from which at least one finite tree is generable."""
    states = reachable_states(a, q0, state_budget)
    productive = set()
    changed = True
    while changed:
        changed = False
        for q in states:
            if q in productive:
                continue
            if any(all(k in productive for k in kids) for _, kids in a.next(q)):
                productive.add(q)
                changed = True
    return productive


def nonempty(a: TreeAutomaton, q0, state_budget: int = DEFAULT_BUDGET) -> bool:
    return q0 in productive_states(a, q0, state_budget)


def trim(a: TreeAutomaton, q0, state_budget: int = DEFAULT_BUDGET) -> TreeAutomaton:
    """Same language, with every transition into an unproductive state dropped."""
    productive = productive_states(a, q0, state_budget)

    def next_fn(q):
        return [(lab, kids) for lab, kids in a.next(q) if all(k in productive for k in kids)]

    return TreeAutomaton(
        a.is_exit, next_fn, a.type_of, asleep=a._asleep, name=f"trim({a.name})", describe=a._describe
    )


def accepts(a: TreeAutomaton, q0, t: DocTree) -> int:
    """Number of accepting runs of ``t`` from ``q0`` (0 means rejected)."""
    memo = {}

    def count(q, node):
        key = (q, id(node))
        if key in memo:
            return memo[key]
        total = 0
        n = len(node.children)
        for label, kids in a.next(q):
            if label != node.label or len(kids) != n:
                continue
            runs = 1
            for k, c in zip(kids, node.children):
                runs *= count(k, c)
                if not runs:
                    break
            total += runs
        memo[key] = total
        return total

    return count(q0, t)


def _compositions(total: int, parts: int):
    """Ordered splits of ``total`` into ``parts`` positive integers."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Generator:
    """Trees of exact size per state, memoized on ``(state, size)``."""

    def __init__(self, a: TreeAutomaton, closed_only: bool = False):
        self.a = a
        self.closed_only = closed_only
        self.memo: dict = {}

    def exact(self, q, size: int) -> list:
        key = (q, size)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        out = {}
        for label, kids in self.a.next(q):
            if self.closed_only and isinstance(label, Bud):
                continue
            if not kids:
                if size == 1:
                    out.setdefault(DocTree(label), None)
                continue
            for sizes in _compositions(size - 1, len(kids)):
                options = []
                for k, s in zip(kids, sizes):
                    trees = self.exact(k, s)
                    if not trees:
                        break
                    options.append(trees)
                else:
                    for combo in itertools.product(*options):
                        out.setdefault(DocTree(label, combo), None)
        result = list(out)
        self.memo[key] = result
        return result


def enumerate_trees(a: TreeAutomaton, q0, max_nodes: int, closed_only: bool = False) -> list:
    """Every accepted tree with at most ``max_nodes`` nodes.

    Ordered by node count, then by canonical s-expression.
    """
    gen = _Generator(a, closed_only)
    out = []
    for size in range(1, max_nodes + 1):
        out.extend(sorted(gen.exact(q0, size), key=DocTree.sexpr))
    return out


def count_trees(a: TreeAutomaton, q0, max_nodes: int) -> list:
    """Number of accepting runs per size 1..max_nodes, without building trees."""
    memo = {}

    def exact(q, size):
        key = (q, size)
        if key in memo:
            return memo[key]
        total = 0
        for _, kids in a.next(q):
            if not kids:
                total += size == 1
                continue
            for sizes in _compositions(size - 1, len(kids)):
                prod = 1
                for k, s in zip(kids, sizes):
                    prod *= exact(k, s)
                    if not prod:
                        break
                total += prod
        memo[key] = total
        return total

    return [exact(q0, s) for s in range(1, max_nodes + 1)]


def product_sync(automata: list, states: list) -> tuple:
    """Classical synchronous product: a transition exists iff every component has it."""
    automata = list(automata)
    k = len(automata)
    if k == 0:
        raise ValueError("need at least one automaton")

    def is_exit(q):
        return all(a.is_exit(s) for a, s in zip(automata, q))

    def next_fn(q):
        per = [a.next(s) for a, s in zip(automata, q)]
        out = []
        for combo in itertools.product(*per):
            label, kids0 = combo[0]
            if all(lab == label and len(kids) == len(kids0) for lab, kids in combo[1:]):
                out.append((label, tuple(tuple(tr[1][j] for tr in combo) for j in range(len(kids0)))))
        return out

    def type_of(q):
        return automata[0].type_of(q[0])

    def asleep(sort):
        return tuple(a.asleep(sort) for a in automata)

    prod = TreeAutomaton(is_exit, next_fn, type_of, asleep=asleep, name="product")
    return prod, tuple(states)


def to_dot(a: TreeAutomaton, q0, state_budget: int = DEFAULT_BUDGET) -> str:
    """Graphviz rendering of the reachable part; exit states are double circles."""
    states = reachable_states(a, q0, state_budget)
    ids = {q: f"q{i}" for i, q in enumerate(states)}

    def esc(s):
        return str(s).replace("\\", "\\\\").replace('"', '\\"')

    lines = [f'digraph "{esc(a.name)}" {{', "  rankdir=LR;"]
    for q in states:
        shape = "doublecircle" if a.is_exit(q) else "circle"
        lines.append(f'  {ids[q]} [shape={shape}, label="{esc(ids[q])}\\n{esc(a.describe(q))}"];')
    n = 0
    for q in states:
        for label, kids in a.next(q):
            if not kids:
                lines.append(f'  {ids[q]} -> {ids[q]} [style=dotted, label="{esc(label)}"];')
                continue
            hub = f"t{n}"
            n += 1
            lines.append(f'  {hub} [shape=point];')
            lines.append(f'  {ids[q]} -> {hub} [label="{esc(label)}"];')
            for i, k in enumerate(kids, 1):
                lines.append(f'  {hub} -> {ids[k]} [label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
