"""Consensual merging of partial replicas of structured documents.

Documents are abstract syntax trees of a context-free grammar; each co-author
edits the projection of the shared document onto a view (a subset of sorts).
Replicas are expanded back into tree automata and combined by a relaxed
synchronous product whose trees are the conflict-free merges.
"""
from .automaton import (
    BudgetExceeded,
    TreeAutomaton,
    accepts,
    count_trees,
    enumerate_trees,
    from_grammar,
    nonempty,
    product_sync,
    productive_states,
    reachable_states,
    to_dot,
    trim,
)
from .consensus import (
    build_expansions,
    consensual_merge,
    consensus_automaton,
    consensus_product,
    consensus_product_k,
    simplest_asts,
    states_in_conflict,
)
from .expansion import CLOSE, OPEN, ForestState, expansion_automaton
from .grammar import (
    Bud,
    Conformance,
    DocTree,
    ExtendedGrammar,
    Grammar,
    GrammarError,
    NotABud,
    Production,
    SortTree,
    Status,
    TreeError,
    TypeMismatch,
    all_proper_prefixes,
    apply_production,
    conforms,
    convert_representation,
    expand_bud,
    extend_grammar,
    fig8_grammar,
    format_address,
    from_sort_tree,
    is_update,
    node_type,
    parse_address,
    prefixes,
    prune_at,
    to_sort_tree,
)
from .io import emit_grammar, load_doc, load_grammar, load_view_tree, parse_doc, parse_grammar, parse_view, parse_view_tree
from .merge import (
    RootTypeConflict,
    fold_consensus,
    have_consensus_trees,
    mutual_updates,
    tree_consensus,
    trees_in_conflict,
)
from .views import (
    DyckToken,
    ParseError,
    View,
    ViewError,
    dyck_decode,
    dyck_encode,
    make_view,
    parse_dyck,
    project,
    project_forest,
    render_dyck,
)

__version__ = "0.1.0"
