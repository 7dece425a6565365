"""File-backed replay of the project / edit / sync / redistribute cycle.

A workspace is a directory holding ``manifest.json``, a copy of the grammar,
the current global document and one replica file per author. Every command
takes an exclusive lock on the workspace for its whole duration.

History entries carry a logical step number rather than a wall-clock time so
that replaying a script reproduces the workspace byte for byte.
"""
from __future__ import annotations

import contextlib
import fcntl
import json
from pathlib import Path

from .automaton import nonempty
from .consensus import consensual_merge
from .expansion import expansion_automaton
from .grammar import (
    DocTree,
    ExtendedGrammar,
    GrammarError,
    NotABud,
    SortTree,
    TreeError,
    TypeMismatch,
    conforms,
    extend_grammar,
    format_address,
)
from .io import emit_grammar, load_doc, load_grammar, load_view_tree, parse_view
from .views import View, ViewError, project

MANIFEST = "manifest.json"
LOCK = ".lock"


class WorkflowError(RuntimeError):
    pass


class UnrealizableEdit(TreeError):
    """The edited replica is the projection of no global document."""


@contextlib.contextmanager
def locked(workspace):
    ws = Path(workspace)
    with open(ws / LOCK, "a") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            yield ws
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def _write(path: Path, text: str):
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


def _dump_manifest(ws: Path, m: dict):
    _write(ws / MANIFEST, json.dumps(m, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _load(ws: Path):
    path = ws / MANIFEST
    if not path.exists():
        raise WorkflowError(f"{ws} is not a workspace (no {MANIFEST})")
    m = json.loads(path.read_text(encoding="utf-8"))
    eg = extend_grammar(load_grammar(ws / m["grammar"]))
    return m, eg


def _author(m: dict, name: str) -> dict:
    for a in m["authors"]:
        if a["name"] == name:
            return a
    raise WorkflowError(f"unknown author {name!r}")


def _view(eg: ExtendedGrammar, a: dict) -> View:
    return parse_view(a["view"], eg)


def wf_init(workspace, grammar_file, authors, initial_doc: DocTree, trim: bool = True) -> Path:
    """Create a workspace; ``authors`` is a list of ``(name, view_text)``."""
    g = load_grammar(grammar_file)
    eg = extend_grammar(g)
    verdict = conforms(eg, initial_doc)
    if not verdict:
        raise GrammarError(f"initial document: {verdict.reason} at {format_address(verdict.address)}")
    names = [n for n, _ in authors]
    if len(set(names)) != len(names) or not names:
        raise WorkflowError("author names must be distinct and non-empty")
    views = [parse_view(v, eg) for _, v in authors]
    ws = Path(workspace)
    ws.mkdir(parents=True, exist_ok=True)
    (ws / "replicas").mkdir(exist_ok=True)
    with locked(ws):
        _write(ws / "grammar.txt", emit_grammar(g))
        _write(ws / "global.txt", initial_doc.sexpr() + "\n")
        entries = []
        for name, v in zip(names, views):
            rel = f"replicas/{name}.txt"
            _write(ws / rel, project(eg, initial_doc, v).sexpr() + "\n")
            entries.append({"name": name, "view": str(v), "replica": rel})
        m = {"grammar": "grammar.txt", "global": "global.txt", "authors": entries, "trim": trim, "history": []}
        _dump_manifest(ws, m)
    return ws


def wf_checkout(workspace, author: str) -> Path:
    """Rewrite the author's replica as the projection of the global document."""
    with locked(workspace) as ws:
        m, eg = _load(ws)
        a = _author(m, author)
        doc = load_doc(ws / m["global"])
        _write(ws / a["replica"], project(eg, doc, _view(eg, a)).sexpr() + "\n")
        return ws / a["replica"]


def _replace(t: SortTree, w: tuple, sub: SortTree) -> SortTree:
    if not w:
        return sub
    i = w[0] - 1
    kids = list(t.children)
    kids[i] = _replace(kids[i], w[1:], sub)
    return SortTree(t.sort, kids)


def _node(t: SortTree, w: tuple) -> SortTree:
    for i in w:
        if i < 1 or i > len(t.children):
            raise TreeError(f"address {format_address(w)} not in replica")
        t = t.children[i - 1]
    return t


def edit_replica(eg: ExtendedGrammar, v, r: SortTree, w: tuple, production: str) -> SortTree:
    """Develop the bud at ``w``; the new node gets a bud for each visible rhs sort."""
    node = _node(r, w)
    if not node.bud:
        raise NotABud(f"replica node at {format_address(w)} is not a bud")
    p = eg.production(production)
    if p.lhs != node.sort:
        raise TypeMismatch(f"{p.name} builds {p.lhs}, the bud at {format_address(w)} is {node.sort}")
    if p.lhs not in v:
        raise ViewError(f"{p.name} builds the invisible sort {p.lhs}")
    kids = [SortTree(x, bud=True) for x in p.rhs if x in v]
    return _replace(r, w, SortTree(p.lhs, kids))


def wf_edit(workspace, author: str, address: tuple, production: str) -> SortTree:
    with locked(workspace) as ws:
        m, eg = _load(ws)
        a = _author(m, author)
        v = _view(eg, a)
        r = load_view_tree(ws / a["replica"])
        r2 = edit_replica(eg, v, r, tuple(address), production)
        auto, q0 = expansion_automaton(eg, v, r2)
        if not nonempty(auto, q0):
            # replica file untouched: the edit is rolled back
            raise UnrealizableEdit(f"no global document projects onto {r2.sexpr()} for view {v}")
        _write(ws / a["replica"], r2.sexpr() + "\n")
        return r2


def wf_sync(workspace, mode: str = "simplest", bound: int = 12) -> DocTree:
    """Merge all replicas, keep the least consensus and redistribute its projections."""
    with locked(workspace) as ws:
        m, eg = _load(ws)
        pairs = []
        for a in m["authors"]:
            pairs.append((_view(eg, a), load_view_tree(ws / a["replica"])))
        found = consensual_merge(eg, pairs, bound=bound, mode=mode, trim_unproductive=m.get("trim", True))
        # the axiom bud is always a consensus, so an empty result is a bug
        assert found, "empty consensus set"
        found = sorted(found, key=DocTree.sort_key)
        chosen = found[0]
        verdict = conforms(eg, chosen)
        assert verdict, verdict.reason
        _write(ws / m["global"], chosen.sexpr() + "\n")
        for a in m["authors"]:
            _write(ws / a["replica"], project(eg, chosen, _view(eg, a)).sexpr() + "\n")
        m["history"].append({"step": len(m["history"]) + 1, "chosen": 0, "alternatives": len(found)})
        _dump_manifest(ws, m)
        return chosen


def wf_status(workspace) -> dict:
    with locked(workspace) as ws:
        m, eg = _load(ws)
        doc = load_doc(ws / m["global"])
        out = {"global": doc.sexpr(), "closed": not doc.buds(), "history": m["history"], "authors": {}}
        for a in m["authors"]:
            r = load_view_tree(ws / a["replica"])
            out["authors"][a["name"]] = {
                "view": a["view"],
                "replica": r.sexpr(),
                "in_sync": r == project(eg, doc, _view(eg, a)),
            }
        return out
