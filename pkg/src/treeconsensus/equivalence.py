"""Cross-check of the automaton pipeline against the brute-force oracle.

Each instance yields one JSON record. Expansion languages are compared with
the minimal brute-force solutions; consensus languages with the pairwise
tree-level merges of those solutions.

Trees only the oracle finds are merges of genuine expansions and so refute
the automaton outright. Trees only the automaton finds may instead need
larger oracle inputs than ``oracle_bound`` allows; they are listed
separately.
"""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

from .automaton import enumerate_trees
from .consensus import consensus_automaton
from .expansion import expansion_automaton
from .grammar import DocTree, ExtendedGrammar
from .oracle import brute_consensus, brute_expansion, maximal_elements, random_instance

WITNESSES = 3


def _witnesses(trees) -> list:
    return [t.sexpr() for t in sorted(trees, key=DocTree.sort_key)[:WITNESSES]]


def expansion_diff(eg: ExtendedGrammar, v, r, bound: int, automaton=None) -> tuple:
    """``(automaton_only, oracle_only)`` for one replica, as sets of trees.

    ``automaton`` overrides the ``(automaton, initial_state)`` under test.
    """
    a, q = automaton if automaton is not None else expansion_automaton(eg, v, r)
    mine = set(enumerate_trees(a, q, bound))
    theirs = set(brute_expansion(eg, v, r, bound, minimal=True))
    return mine - theirs, theirs - mine


@dataclass
class Report:
    seed: int | None
    bound: int
    oracle_bound: int
    expansion_sizes: list = field(default_factory=list)
    expansion_automaton_only: list = field(default_factory=list)
    expansion_oracle_only: list = field(default_factory=list)
    consensus_size: int = 0
    oracle_size: int = 0
    consensus_automaton_only: list = field(default_factory=list)
    consensus_oracle_only: list = field(default_factory=list)
    automaton_only_count: int = 0
    oracle_only_count: int = 0
    maximal_size: int = 0
    maximal_mismatch_count: int = 0
    seconds: float = 0.0

    @property
    def expansion_ok(self) -> bool:
        return not any(self.expansion_automaton_only) and not any(self.expansion_oracle_only)

    @property
    def consensus_ok(self) -> bool:
        return self.automaton_only_count == 0 and self.oracle_only_count == 0

    @property
    def ok(self) -> bool:
        return self.expansion_ok and self.consensus_ok

    def to_json(self) -> str:
        d = asdict(self)
        d.update(ok=self.ok, expansion_ok=self.expansion_ok, consensus_ok=self.consensus_ok)
        return json.dumps(d, sort_keys=True, ensure_ascii=False)


def check_equivalence(eg: ExtendedGrammar, views, replicas, bound: int, oracle_bound: int | None = None, seed=None) -> Report:
    """Compare automaton and oracle on one instance.

    Consensus trees are compared up to ``bound`` nodes; oracle expansions
    feeding the merges go up to ``oracle_bound`` (default ``bound + 2``).
    ``maximal_*`` fields compare against the update-order-maximal oracle
    merges instead, for diagnosis only.
    """
    t0 = time.perf_counter()
    m = bound + 2 if oracle_bound is None else oracle_bound
    rep = Report(seed, bound, m)
    pairs = list(zip(views, replicas))
    sets = []
    for v, r in pairs:
        mine, theirs = expansion_diff(eg, v, r, bound)
        rep.expansion_automaton_only.append(_witnesses(mine))
        rep.expansion_oracle_only.append(_witnesses(theirs))
        full = brute_expansion(eg, v, r, m, minimal=True)
        rep.expansion_sizes.append(sum(1 for t in full if t.size <= bound))
        sets.append(full)

    a, q = consensus_automaton(eg, pairs)
    mine = set(enumerate_trees(a, q, bound))
    merged = brute_consensus(eg, sets)
    theirs = {t for t in merged if t.size <= bound}
    rep.consensus_size = len(mine)
    rep.oracle_size = len(theirs)
    rep.automaton_only_count = len(mine - theirs)
    rep.oracle_only_count = len(theirs - mine)
    rep.consensus_automaton_only = _witnesses(mine - theirs)
    rep.consensus_oracle_only = _witnesses(theirs - mine)
    top = {t for t in maximal_elements(eg, merged) if t.size <= bound}
    rep.maximal_size = len(top)
    rep.maximal_mismatch_count = len(mine ^ top)
    rep.seconds = round(time.perf_counter() - t0, 3)
    return rep


def run_battery(seeds, bound: int = 14, oracle_bound: int | None = None, out=None) -> list:
    """Check every seeded random instance; write one JSON line each to ``out``."""
    reports = []
    for seed in seeds:
        inst = random_instance(seed)
        rep = check_equivalence(inst.eg, inst.views, inst.replicas, bound, oracle_bound, seed=seed)
        reports.append(rep)
        if out is not None:
            out.write(rep.to_json() + "\n")
            out.flush()
    return reports
