import json
import random

import pytest

from treeconsensus import (
    DocTree,
    TreeAutomaton,
    conforms,
    expansion_automaton,
    extend_grammar,
    fig8_grammar,
    make_view,
    parse_view_tree,
    project,
    to_sort_tree,
)
from treeconsensus.equivalence import check_equivalence, expansion_diff, run_battery
from treeconsensus.oracle import (
    brute_expansion,
    count_conforming,
    enumerate_conforming,
    maximal_elements,
    minimal_elements,
    random_grammar,
    random_instance,
    random_tree,
)

from conftest import doc

EG = extend_grammar(fig8_grammar())
AB = make_view(EG, "AB")


def test_enumerate_examples():
    assert enumerate_conforming(EG, "A", 5, closed_only=True) == [doc("(P2)"), doc("(P1 (P7) (P3 (P7) (P2)))")]
    assert set(enumerate_conforming(EG, "A", 1)) == {doc("(P2)"), DocTree.bud("A")}
    assert enumerate_conforming(EG, "A", 0) == []


@pytest.mark.parametrize("closed", [False, True])
def test_count_matches_enumeration(closed):
    trees = enumerate_conforming(EG, "A", 8, closed_only=closed)
    for n in range(1, 9):
        assert count_conforming(EG, "A", n, closed_only=closed) == sum(1 for t in trees if t.size == n)


def test_brute_expansion_full_view():
    t = doc("(P1 (P5 (P2) (P7)) (P3 (P7) (P2)))")
    full = make_view(EG, "ABC")
    assert brute_expansion(EG, full, to_sort_tree(EG, t), 9) == [t]


def test_minimal_flag_matches_minimal_elements():
    r = parse_view_tree("(A (A) (B (A)))")
    every = brute_expansion(EG, AB, r, 10)
    assert all(project(EG, t, AB) == r for t in every)
    assert set(brute_expansion(EG, AB, r, 10, minimal=True)) == set(minimal_elements(EG, every))


def test_maximal_elements_keeps_same_size_updates():
    # a bud developed into a leaf does not change the size
    assert maximal_elements(EG, [DocTree.bud("A"), doc("(P2)")]) == [doc("(P2)")]


class _DropOne:
    """Expansion automaton with one transition removed."""

    def __init__(self, a, victim):
        self.a = a
        self.victim = victim

    def automaton(self):
        a = self.a

        def next_fn(q):
            return [tr for tr in a.next(q) if (q, tr) != self.victim]

        return TreeAutomaton(a.is_exit, next_fn, a.type_of, asleep=a.asleep)


def test_mutation_is_detected():
    r = parse_view_tree("(A (A) (B (A)))")
    a, q = expansion_automaton(EG, AB, r)
    assert expansion_diff(EG, AB, r, 10) == (set(), set())
    victim = (q, a.next(q)[0])
    broken = _DropOne(a, victim).automaton()
    mine_only, oracle_only = expansion_diff(EG, AB, r, 10, automaton=(broken, q))
    assert not mine_only and oracle_only


def test_random_generators():
    rng = random.Random(3)
    for _ in range(20):
        g = random_grammar(rng)
        assert len(g.productions) <= 8 and len(g.sorts) <= 4
        eg = extend_grammar(g)
        t = random_tree(eg, g.axiom, rng, 12, 0.2)
        assert conforms(eg, t) and t.size <= 12


def test_random_instance_is_reproducible():
    a, b = random_instance(7), random_instance(7)
    assert a.replicas == b.replicas and a.grammar.productions == b.grammar.productions
    for t, v, r in zip(a.globals_, a.views, a.replicas):
        assert project(a.eg, t, v) == r


def test_check_equivalence_report():
    inst = random_instance(3)
    rep = check_equivalence(inst.eg, inst.views, inst.replicas, 10, seed=3)
    assert rep.oracle_bound == 12
    assert rep.expansion_ok
    d = json.loads(rep.to_json())
    assert d["seed"] == 3 and "consensus_ok" in d


def test_run_battery_writes_lines(tmp_path):
    path = tmp_path / "out.jsonl"
    with path.open("w") as fh:
        reps = run_battery([0, 3], bound=9, out=fh)
    lines = path.read_text().splitlines()
    assert len(lines) == len(reps) == 2
    assert [json.loads(x)["seed"] for x in lines] == [0, 3]
