import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treeconsensus import (
    DocTree,
    RootTypeConflict,
    TreeAutomaton,
    TreeError,
    accepts,
    consensual_merge,
    consensus_automaton,
    consensus_product,
    consensus_product_k,
    enumerate_trees,
    expansion_automaton,
    extend_grammar,
    fig8_grammar,
    fold_consensus,
    from_grammar,
    have_consensus_trees,
    is_update,
    make_view,
    mutual_updates,
    parse_view_tree,
    prune_at,
    reachable_states,
    simplest_asts,
    states_in_conflict,
    tree_consensus,
    trees_in_conflict,
)
from treeconsensus.oracle import brute_consensus, brute_expansion, random_instance, random_tree

from conftest import doc, g8_trees

EG = extend_grammar(fig8_grammar())
GA = from_grammar(EG)
AB = make_view(EG, "AB")
AC = make_view(EG, "AC")

# two documents that edit the C node at 2.1 with C -> C C and C -> A C
LEFT = doc("(P1 (P7) (P3 (P6 (P7) (P7)) (P2)))")
RIGHT = doc("(P1 (P7) (P3 (P5 (P2) (P7)) (P2)))")
MERGED = doc("(P1 (P7) (P3 (? C) (P2)))")


def test_have_consensus_trees():
    assert have_consensus_trees(EG, doc("(P2)"), doc("(P1 (? C) (? B))"))
    assert not have_consensus_trees(EG, doc("(P2)"), doc("(P7)"))


def test_conflict_address():
    assert trees_in_conflict(EG, LEFT, RIGHT) == [(2, 1)]
    assert trees_in_conflict(EG, LEFT, LEFT) == []
    assert trees_in_conflict(EG, LEFT, prune_at(EG, LEFT, [(2, 1)])) == []
    with pytest.raises(RootTypeConflict):
        trees_in_conflict(EG, doc("(P2)"), doc("(P7)"))


def test_merge_prunes_at_conflict():
    out = tree_consensus(EG, LEFT, RIGHT)
    assert out == MERGED
    assert out.subtree((2, 1)).is_bud and out.subtree((2, 1)).children == ()
    assert tree_consensus(EG, DocTree.bud("A"), LEFT) == LEFT
    with pytest.raises(RootTypeConflict):
        tree_consensus(EG, doc("(P2)"), doc("(P7)"))


def test_mutual_updates():
    assert mutual_updates(EG, doc("(P1 (? C) (P3 (P7) (P2)))"), doc("(P1 (P7) (? B))"))
    assert not mutual_updates(EG, LEFT, LEFT)
    assert not mutual_updates(EG, DocTree.bud("A"), doc("(P2)"))
    with pytest.raises(TreeError):
        mutual_updates(EG, LEFT, RIGHT)


def _pair(seed):
    rng = random.Random(seed)
    return random_tree(EG, "A", rng, 12, 0.25), random_tree(EG, "A", rng, 12, 0.25)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_merge_algebra(seed):
    t1, t2 = _pair(seed)
    assert tree_consensus(EG, t1, t1) == t1
    m = tree_consensus(EG, t1, t2)
    assert m == tree_consensus(EG, t2, t1)
    # conflict-free merges are common updates
    if not trees_in_conflict(EG, t1, t2):
        assert is_update(EG, t1, m) and is_update(EG, t2, m)


def test_fold_depends_on_order():
    # a conflict bud later yields to a third tree, so the merge is not associative
    x, y = doc("(P2)"), doc("(P1 (? C) (P3 (P7) (P2)))")
    assert fold_consensus(EG, [x, x, y]) == DocTree.bud("A")
    assert fold_consensus(EG, [y, x, x]) == x


@settings(max_examples=60, deadline=None)
@given(g8_trees(bud_rate=0.3), g8_trees(bud_rate=0.3), g8_trees(bud_rate=0.3))
def test_fold_is_order_free_without_conflicts(t1, t2, t3):
    ts = [t1, t2, t3]
    if any(trees_in_conflict(EG, a, b) for a in ts for b in ts):
        return
    assert fold_consensus(EG, ts) == fold_consensus(EG, [t3, t1, t2])


def _only(a, label):
    return TreeAutomaton(lambda q: False, lambda q: [(label, ("C", "C"))], lambda q: "C")


def test_states_in_conflict():
    assert states_in_conflict(_only(None, "P6"), _only(None, "P5"), "q", "q")
    assert not states_in_conflict(GA, GA, "A", "A")
    leaf = TreeAutomaton(lambda q: False, lambda q: [("P2", ())], lambda q: "A")
    assert not states_in_conflict(GA, leaf, "A", "A")
    with pytest.raises(TypeError):
        states_in_conflict(GA, GA, "A", "C")


def test_root_conflict_gives_bud():
    pairs = [(AB, parse_view_tree("(A (B (A)))")), (AC, parse_view_tree("(A)"))]
    a, q = consensus_automaton(EG, pairs)
    assert enumerate_trees(a, q, 10) == [DocTree.bud("A")]
    sets = [brute_expansion(EG, v, r, 10, minimal=True) for v, r in pairs]
    assert brute_consensus(EG, sets) == [DocTree.bud("A")]


def test_singleton_self_product():
    a, q = expansion_automaton(EG, AB, parse_view_tree("(A (B (A)))"))
    p, q2 = consensus_product(a, q, a, q)
    assert enumerate_trees(p, q2, 12) == enumerate_trees(a, q, 12) == [doc("(P1 (? C) (P3 (? C) (P2)))")]


def test_product_arity():
    a, q = expansion_automaton(EG, AB, parse_view_tree("(A)"))
    assert consensus_product_k([(a, q)]) == (a, q)
    p, q2 = consensus_product_k([(a, q), (a, q)])
    assert q2 == (q, q)
    with pytest.raises(ValueError):
        consensus_product_k([])
    with pytest.raises(RootTypeConflict):
        consensus_product(GA, "A", GA, "B")


def test_simplest():
    loop = TreeAutomaton(lambda q: False, lambda q: [("P", (q,))], lambda q: "X")
    assert simplest_asts(loop, "q") == []
    a, q = expansion_automaton(EG, AB, parse_view_tree("(A (B (A)))"))
    assert simplest_asts(a, q) == enumerate_trees(a, q, 20)


def test_worked_example_product():
    from treeconsensus.worked_example import replicas

    a, q = consensus_automaton(EG, replicas(EG), trim_unproductive=False)
    states = reachable_states(a, q)
    assert len(states) == 23
    assert sum(1 for s in states if a.is_exit(s)) == 8
    raw = simplest_asts(a, q)
    assert len(raw) == 4
    trimmed = consensual_merge(EG, replicas(EG))
    assert len(trimmed) == 3
    for t in trimmed:
        assert [lab.sort for _, lab in t.buds()].count("C") == 1


@pytest.mark.parametrize("seed", range(6))
def test_accepted_trees_have_one_run_in_expansions(seed):
    inst = random_instance(seed)
    for v, r in inst.pairs():
        a, q = expansion_automaton(inst.eg, v, r)
        for t in enumerate_trees(a, q, 12):
            assert accepts(a, q, t) == 1


def test_merge_modes():
    pairs = [(AB, parse_view_tree("(A (B (A)))")), (AC, parse_view_tree("(A (A))"))]
    every = consensual_merge(EG, pairs, bound=12, mode="enumerate")
    assert set(consensual_merge(EG, pairs)) <= set(every)
    with pytest.raises(ValueError):
        consensual_merge(EG, pairs, mode="bogus")
