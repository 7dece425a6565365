"""Brute-force reference implementations.

Nothing here touches the automaton code: trees are generated straight from
the grammar and filtered by projection, and consensus is computed pairwise
with the tree-level merge. Exponential by design; keep bounds small.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .grammar import DocTree, ExtendedGrammar, Grammar, Production, extend_grammar, is_update, prune_at
from .merge import fold_consensus
from .views import dyck_encode, make_view, project, project_forest


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Conforming:
    """Size-indexed generation of every AST of a sort, optionally with a
    filter on the Dyck word of each subtree's projection."""

    def __init__(self, eg: ExtendedGrammar, closed_only: bool, view=None, allowed=None, minimal=False):
        self.eg = eg
        self.closed_only = closed_only
        self.view = view
        self.allowed = allowed  # set of token tuples a subtree projection may take
        self.minimal = minimal
        self.memo = {}

    def _ok(self, t):
        if self.allowed is None:
            return True
        word = tuple(dyck_encode(project_forest(self.eg, t, self.view)))
        if self.minimal and not word and not t.is_bud and self.eg.type_of_label(t.label) not in self.view:
            # a bud here projects the same and is smaller
            return False
        return word in self.allowed

    def exact(self, sort, size):
        key = (sort, size)
        if key in self.memo:
            return self.memo[key]
        out = []
        if size == 1 and not self.closed_only:
            t = DocTree.bud(sort)
            if self._ok(t):
                out.append(t)
        for p in self.eg.productions_of(sort):
            if not p.rhs:
                if size == 1:
                    t = DocTree(p.name)
                    if self._ok(t):
                        out.append(t)
                continue
            for sizes in _compositions(size - 1, len(p.rhs)):
                opts = [self.exact(x, s) for x, s in zip(p.rhs, sizes)]
                if not all(opts):
                    continue
                for kids in itertools.product(*opts):
                    t = DocTree(p.name, kids)
                    if self._ok(t):
                        out.append(t)
        self.memo[key] = out
        return out

    def count(self, sort, size):
        return len(self.exact(sort, size))


def enumerate_conforming(eg: ExtendedGrammar, sort: str, max_nodes: int, closed_only: bool = False) -> list:
    gen = _Conforming(eg, closed_only)
    out = []
    for n in range(1, max_nodes + 1):
        out.extend(gen.exact(sort, n))
    return out


def count_conforming(eg: ExtendedGrammar, sort: str, size: int, closed_only: bool = False) -> int:
    """Number of ASTs of exactly ``size`` nodes, by counting only (no trees built)."""
    memo = {}

    def c(x, n):
        if (x, n) in memo:
            return memo[(x, n)]
        total = 1 if (n == 1 and not closed_only) else 0
        for p in eg.productions_of(x):
            if not p.rhs:
                total += n == 1
                continue
            for sizes in _compositions(n - 1, len(p.rhs)):
                prod = 1
                for y, s in zip(p.rhs, sizes):
                    prod *= c(y, s)
                total += prod
        memo[(x, n)] = total
        return total

    return c(sort, size)


def brute_expansion(eg: ExtendedGrammar, v, r, max_nodes: int, minimal: bool = False) -> list:
    """Every AST (buds allowed) of the axiom with at most ``max_nodes`` nodes
    whose projection onto ``v`` is ``r``.

    Subtrees whose projection is not a factor of ``r``'s Dyck word are
    discarded early; that cannot lose a solution because the projection of a
    subtree is always a contiguous factor of the projection of the whole.

    With ``minimal`` only the update-order-minimal solutions are kept: no
    developed subtree of an invisible sort may have an empty projection.
    """
    word = tuple(dyck_encode(r))
    allowed = {word[i:j] for i in range(len(word) + 1) for j in range(i, len(word) + 1)}
    gen = _Conforming(eg, closed_only=False, view=frozenset(v), allowed=allowed, minimal=minimal)
    out = []
    for n in range(1, max_nodes + 1):
        for t in gen.exact(eg.axiom, n):
            if eg.type_of_label(t.label) in v and project(eg, t, v) == r:
                out.append(t)
    return out


def single_prunes(eg: ExtendedGrammar, t: DocTree):
    """Trees obtained by replacing one non-bud node with a bud of its sort."""

    def go(node):
        if node.is_bud:
            return
        yield DocTree.bud(eg.type_of_label(node.label))
        for i, c in enumerate(node.children):
            for c2 in go(c):
                kids = list(node.children)
                kids[i] = c2
                yield DocTree(node.label, kids)

    yield from go(t)


def minimal_elements(eg: ExtendedGrammar, trees) -> list:
    """Members with no single-node prune inside the set.

    Exact for projection-defined sets, where any pruned prefix in the set
    implies a single prune in the set.
    """
    pool = set(trees)
    return [t for t in trees if not any(p in pool for p in single_prunes(eg, t))]


def maximal_elements(eg: ExtendedGrammar, trees) -> list:
    """Members that are not a proper prefix of another member."""
    trees = list(trees)
    by_root = {}
    for t in trees:
        by_root.setdefault(t.label, []).append(t)
    out = []
    for t in trees:
        bigger = by_root.get(t.label, []) if not t.is_bud else trees
        if not any(u != t and is_update(eg, t, u) for u in bigger):
            out.append(t)
    return out


def brute_consensus(eg: ExtendedGrammar, tree_sets) -> list:
    seen = {}
    for combo in itertools.product(*tree_sets):
        seen.setdefault(fold_consensus(eg, combo), None)
    return sorted(seen, key=DocTree.sort_key)


# random instances


@dataclass
class Instance:
    seed: int
    grammar: Grammar
    views: list
    globals_: list  # the edited global documents behind each replica
    replicas: list
    base: DocTree

    @property
    def eg(self) -> ExtendedGrammar:
        return extend_grammar(self.grammar)

    def pairs(self):
        return list(zip(self.views, self.replicas))


def random_grammar(rng: random.Random, max_sorts: int = 4, max_productions: int = 8, max_rhs: int = 3) -> Grammar:
    while True:
        n = rng.randint(2, max_sorts)
        sorts = [chr(ord("A") + i) for i in range(n)]
        total = rng.randint(n + 1, max_productions)
        prods = []
        owners = sorts + [rng.choice(sorts) for _ in range(total - n)]
        for i, lhs in enumerate(owners, 1):
            k = rng.choice([0, 1, 2, 2, 3][: max_rhs + 2])
            prods.append(Production(f"P{i}", lhs, tuple(rng.choice(sorts) for _ in range(k))))
        g = Grammar(sorts, prods, "A")
        if _all_productive(g) and _all_reachable(g):
            return g


def _all_productive(g: Grammar) -> bool:
    done = set()
    changed = True
    while changed:
        changed = False
        for p in g.productions:
            if p.lhs not in done and all(x in done for x in p.rhs):
                done.add(p.lhs)
                changed = True
    return done == set(g.sorts)


def _all_reachable(g: Grammar) -> bool:
    seen = {g.axiom}
    todo = [g.axiom]
    while todo:
        x = todo.pop()
        for p in g.by_lhs[x]:
            for y in p.rhs:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return seen == set(g.sorts)


def random_tree(eg: ExtendedGrammar, sort: str, rng: random.Random, max_nodes: int, bud_rate: float = 0.0) -> DocTree:
    """Random closed-ish tree; falls back to the shortest productions near the budget."""
    depth_cost = _min_sizes(eg)
    budget = [max_nodes]

    def go(x):
        if bud_rate and rng.random() < bud_rate:
            budget[0] -= 1
            return DocTree.bud(x)
        opts = [p for p in eg.productions_of(x) if 1 + sum(depth_cost[y] for y in p.rhs) <= budget[0]]
        if not opts:
            budget[0] -= 1
            return DocTree.bud(x)
        p = rng.choice(opts)
        budget[0] -= 1
        reserve = [depth_cost[y] for y in p.rhs]
        kids = []
        for i, y in enumerate(p.rhs):
            budget[0] -= sum(reserve[i + 1 :])
            kids.append(go(y))
            budget[0] += sum(reserve[i + 1 :])
        return DocTree(p.name, kids)

    return go(sort)


def _min_sizes(eg: ExtendedGrammar) -> dict:
    best = {x: float("inf") for x in eg.base.sorts}
    changed = True
    while changed:
        changed = False
        for p in eg.base.productions:
            c = 1 + sum(best[y] for y in p.rhs)
            if c < best[p.lhs]:
                best[p.lhs] = c
                changed = True
    return best


def random_extension(eg: ExtendedGrammar, t: DocTree, rng: random.Random, max_nodes: int, bud_rate: float) -> DocTree:
    """Develop some buds of ``t`` while staying within ``max_nodes``."""
    out = t
    for w, lab in t.buds():
        if rng.random() < 0.3:
            continue
        room = max_nodes - out.size + 1
        if room < 1:
            break
        sub = random_tree(eg, lab.sort, rng, room, bud_rate)
        out = out.replace(w, sub)
    return out


def random_instance(seed: int, k: int = 2, max_global: int = 12) -> Instance:
    rng = random.Random(seed)
    g = random_grammar(rng)
    eg = extend_grammar(g)
    sorts = sorted(g.sorts)
    views = []
    for _ in range(k):
        others = [s for s in sorts if s != g.axiom]
        vis = {g.axiom} | {s for s in others if rng.random() < 0.5}
        views.append(make_view(eg, vis))
    full = random_tree(eg, g.axiom, rng, max_global)
    holes = [w for w, _ in full.items() if w and rng.random() < 0.35]
    base = prune_at(eg, full, holes) if holes else full
    globals_ = [random_extension(eg, base, rng, max_global, bud_rate=0.15) for _ in range(k)]
    replicas = [project(eg, t, v) for t, v in zip(globals_, views)]
    return Instance(seed, g, views, globals_, replicas, base)
