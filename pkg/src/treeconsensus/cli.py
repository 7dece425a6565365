"""Command-line entry point (``treeconsensus``)."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automaton import BudgetExceeded, enumerate_trees, reachable_states, to_dot, trim
from .consensus import RootTypeConflict, build_expansions, consensus_automaton, consensus_product_k, simplest_asts
from .equivalence import run_battery
from .expansion import expansion_automaton
from .grammar import DocTree, GrammarError, TreeError, conforms, extend_grammar, format_address, parse_address
from .io import load_doc, load_grammar, load_view_tree, parse_view
from .views import ParseError, ViewError, check_view_tree, default_brackets, project, render_dyck
from .workflow import UnrealizableEdit, WorkflowError, wf_checkout, wf_edit, wf_init, wf_status, wf_sync
from . import worked_example

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INVALID, EXIT_CONFLICT, EXIT_BUDGET = range(6)


class UsageError(Exception):
    pass


def _out(text: str = ""):
    sys.stdout.write(text + "\n")


def _replicas(eg, specs):
    pairs = []
    for spec in specs:
        path, sep, view = spec.rpartition(":")
        if not sep or not path:
            raise UsageError(f"--replica expects FILE:VIEW, got {spec!r}")
        v = parse_view(view, eg)
        r = load_view_tree(path)
        check_view_tree(eg, v, r)
        pairs.append((v, r))
    if not pairs:
        raise UsageError("at least one --replica FILE:VIEW is required")
    return pairs


def _emit_trees(trees):
    for t in trees:
        _out(t.sexpr())


def _write_dot(path, a, q):
    if path:
        Path(path).write_text(to_dot(a, q), encoding="utf-8")


def cmd_validate(args):
    eg = _grammar(args)
    _out(f"grammar ok: {len(eg.base.sorts)} sorts, {len(eg.base.productions)} productions, axiom {eg.axiom}")
    if not args.doc:
        return EXIT_OK
    if args.view:
        v = parse_view(args.view, eg)
        r = load_view_tree(args.doc)
        check_view_tree(eg, v, r)
        _out(f"view tree ok for {v}")
        return EXIT_OK
    t = load_doc(args.doc)
    verdict = conforms(eg, t)
    if not verdict:
        where = format_address(verdict.address) if verdict.address is not None else "?"
        _out(f"invalid at {where}: {verdict.reason}")
        return EXIT_INVALID
    _out(verdict.status.value)
    return EXIT_OK


def cmd_project(args):
    eg = _grammar(args)
    v = parse_view(_need(args.view, "--view"), eg)
    t = load_doc(_need(args.doc, "--doc"))
    verdict = conforms(eg, t)
    if not verdict:
        raise TreeError(verdict.reason)
    r = project(eg, t, v)
    _out(render_dyck(r, default_brackets(v)) if args.dyck else r.sexpr())
    return EXIT_OK


def cmd_expand(args):
    eg = _grammar(args)
    pairs = _replicas(eg, args.replica)
    if len(pairs) != 1:
        raise UsageError("expand takes exactly one --replica")
    v, r = pairs[0]
    a, q = expansion_automaton(eg, v, r)
    a = trim(a, q, args.budget)
    _write_dot(args.dot, a, q)
    trees = simplest_asts(a, q, args.budget) if args.simplest else enumerate_trees(a, q, args.max_nodes)
    _emit_trees(trees)
    return EXIT_OK


def cmd_merge(args):
    eg = _grammar(args)
    pairs = _replicas(eg, args.replica)
    roots = {r.sort for _, r in pairs}
    if len(roots) > 1:
        raise RootTypeConflict(f"replica roots have different sorts: {', '.join(sorted(roots))}")
    a, q = consensus_automaton(eg, pairs, trim_unproductive=not args.raw)
    reachable_states(a, q, args.budget)
    _write_dot(args.dot, a, q)
    trees = simplest_asts(a, q, args.budget) if args.simplest else enumerate_trees(a, q, args.max_nodes)
    _emit_trees(trees)
    return EXIT_OK


def cmd_oracle_check(args):
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        reports = run_battery(range(args.seed, args.seed + args.instances), args.max_nodes, args.oracle_bound, out)
    finally:
        if args.out:
            out.close()
    bad = [r.seed for r in reports if not r.ok]
    sys.stderr.write(f"{len(reports) - len(bad)}/{len(reports)} instances agree\n")
    return EXIT_INVALID if bad else EXIT_OK


def cmd_demo(args):
    eg = worked_example.grammar()
    pairs = worked_example.replicas(eg)
    for i, (v, r) in enumerate(pairs, 1):
        a, q = expansion_automaton(eg, v, r)
        _out(f"replica {i} over {v}: {render_dyck(r, default_brackets(v))}")
        _out(f"  expansion states: {len(reachable_states(a, q))}")
    raw = build_expansions(eg, pairs, trim_unproductive=False)
    a, q = consensus_product_k(raw)
    states = reachable_states(a, q)
    _out(f"consensus product: {len(states)} states, {sum(a.is_exit(s) for s in states)} exit")
    found = simplest_asts(a, q)
    _out(f"simplest consensus trees: {len(found)}")
    for t in found:
        _out(f"  {t.sexpr()}")
    a2, q2 = consensus_automaton(eg, pairs)
    states = reachable_states(a2, q2)
    found = simplest_asts(a2, q2)
    _out(f"after trimming: {len(states)} states, {sum(a2.is_exit(s) for s in states)} exit, {len(found)} trees")
    for t in found:
        _out(f"  {t.sexpr()}")
    _write_dot(args.dot, a, q)
    return EXIT_OK


def cmd_workflow(args):
    if args.action == "init":
        authors = []
        for spec in args.author:
            name, sep, view = spec.partition(":")
            if not sep:
                raise UsageError(f"--author expects NAME:VIEW, got {spec!r}")
            authors.append((name, view))
        grammar = _need(args.grammar, "--grammar")
        doc = load_doc(args.doc) if args.doc else DocTree.bud(load_grammar(grammar).axiom)
        ws = wf_init(args.dir, grammar, authors, doc, trim=not args.raw)
        _out(str(ws))
    elif args.action == "checkout":
        _out(wf_checkout(args.dir, args.name).read_text(encoding="utf-8").strip())
    elif args.action == "edit":
        _out(wf_edit(args.dir, args.name, parse_address(args.address), args.production).sexpr())
    elif args.action == "sync":
        _out(wf_sync(args.dir).sexpr())
    elif args.action == "status":
        _out(json.dumps(wf_status(args.dir), indent=2, sort_keys=True, ensure_ascii=False))
    return EXIT_OK


def _grammar(args):
    return extend_grammar(load_grammar(_need(args.grammar, "--grammar")))


def _need(value, flag):
    if not value:
        raise UsageError(f"{flag} is required")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grammar", metavar="FILE")
    common.add_argument("--view", metavar="LIST")
    common.add_argument("--doc", metavar="FILE")
    common.add_argument("--replica", metavar="FILE:VIEW", action="append", default=[])
    common.add_argument("--max-nodes", type=int, default=12, metavar="N")
    common.add_argument("--simplest", action="store_true")
    common.add_argument("--dyck", action="store_true")
    common.add_argument("--dot", metavar="FILE")
    common.add_argument("--budget", type=int, default=100_000, help="reachable-state budget")
    common.add_argument("--raw", action="store_true", help="keep unproductive transitions")

    p = argparse.ArgumentParser(prog="treeconsensus", description="Consensual merging of partial document replicas.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a grammar and optionally a document").set_defaults(fn=cmd_validate)
    sub.add_parser("project", parents=[common], help="project a document onto a view").set_defaults(fn=cmd_project)
    sub.add_parser("expand", parents=[common], help="documents projecting onto a replica").set_defaults(fn=cmd_expand)
    sub.add_parser("merge", parents=[common], help="consensus of several replicas").set_defaults(fn=cmd_merge)
    oc = sub.add_parser("oracle-check", parents=[common], help="compare automata with brute force")
    oc.add_argument("--instances", type=int, default=25)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--oracle-bound", type=int)
    oc.add_argument("--out", metavar="FILE")
    oc.set_defaults(fn=cmd_oracle_check, max_nodes=14)
    sub.add_parser("demo-appendix-a", parents=[common], help="run the two-author worked example").set_defaults(fn=cmd_demo)

    wf = sub.add_parser("workflow", help="file-backed editing workflow")
    wsub = wf.add_subparsers(dest="action", required=True)
    w = wsub.add_parser("init", parents=[common])
    w.add_argument("dir")
    w.add_argument("--author", metavar="NAME:VIEW", action="append", default=[], required=True)
    for name in ("checkout", "sync", "status", "edit"):
        w = wsub.add_parser(name)
        w.add_argument("dir")
        if name in ("checkout", "edit"):
            w.add_argument("name")
        if name == "edit":
            w.add_argument("address", help="Dewey address in the replica, e.g. 2.1 or ε")
            w.add_argument("production")
    wf.set_defaults(fn=cmd_workflow)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.fn(args)
    except UsageError as e:
        sys.stderr.write(f"treeconsensus: error: {e}\n")
        return EXIT_USAGE
    except ParseError as e:
        sys.stderr.write(f"parse error: {e}\n")
        return EXIT_PARSE
    except RootTypeConflict as e:
        sys.stderr.write(f"no consensus possible: {e}\n")
        return EXIT_CONFLICT
    except BudgetExceeded as e:
        sys.stderr.write(f"budget exceeded: {e}\n")
        return EXIT_BUDGET
    except (GrammarError, ViewError, TreeError, UnrealizableEdit, WorkflowError) as e:
        sys.stderr.write(f"invalid: {e}\n")
        return EXIT_INVALID
    except OSError as e:
        sys.stderr.write(f"treeconsensus: error: {e}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
