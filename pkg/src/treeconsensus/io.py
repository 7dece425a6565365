"""Text formats: grammar files, parenthesized documents and view lists.

Grammar file::

    # comment
    axiom A
    P1: A -> C B
    P2: A ->

Documents are s-expressions. An AST reads ``(P1 (P7) (P3 (P7) (P2)))`` and a
view tree ``(A (B (A)))``; in both, ``(? C)`` is a bud of sort C.
"""
from __future__ import annotations

import re
from pathlib import Path

from .grammar import DocTree, ExtendedGrammar, Grammar, GrammarError, Production, SortTree
from .views import ParseError, View, make_view

_PRODUCTION = re.compile(r"^(\S+)\s*:\s*(\S+)\s*->(.*)$")


def parse_grammar(text: str, source: str = "<grammar>") -> Grammar:
    axiom = None
    prods = []
    sorts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("axiom"):
            parts = line.split()
            if len(parts) != 2 or parts[0] != "axiom":
                raise ParseError(f"{source}:{lineno}: expected 'axiom SORT'", lineno, "line")
            if axiom is not None:
                raise ParseError(f"{source}:{lineno}: axiom given twice", lineno, "line")
            axiom = parts[1]
            continue
        m = _PRODUCTION.match(line)
        if not m:
            raise ParseError(f"{source}:{lineno}: expected 'NAME: LHS -> RHS...'", lineno, "line")
        name, lhs, rhs = m.group(1), m.group(2), tuple(m.group(3).split())
        prods.append(Production(name, lhs, rhs))
        for s in (lhs, *rhs):
            if s not in sorts:
                sorts.append(s)
    if axiom is None:
        raise ParseError(f"{source}: missing 'axiom' line", 0, "line")
    if axiom not in sorts:
        sorts.append(axiom)
    try:
        return Grammar(sorts, prods, axiom)
    except GrammarError as e:
        raise GrammarError(f"{source}: {e}") from None


def load_grammar(path) -> Grammar:
    return parse_grammar(Path(path).read_text(encoding="utf-8"), str(path))


def emit_grammar(g: Grammar) -> str:
    lines = [f"axiom {g.axiom}"]
    for p in g.productions:
        lines.append(f"{p.name}: {p.lhs} ->" + "".join(f" {s}" for s in p.rhs))
    return "\n".join(lines) + "\n"


def _tokens(text: str):
    for m in re.finditer(r"\(|\)|[^\s()]+", text):
        yield m.group(0), m.start()


def parse_sexpr(text: str):
    """Read one s-expression into nested lists of atoms.

    Raises :class:`ParseError` whose index is a character offset.
    """
    stack = [[]]
    starts = []
    for tok, pos in _tokens(text):
        if tok == "(":
            stack.append([])
            starts.append(pos)
        elif tok == ")":
            if not starts:
                raise ParseError("unmatched ')'", pos, "char")
            starts.pop()
            item = stack.pop()
            if not item or not isinstance(item[0], str):
                raise ParseError("a node must start with a label", pos, "char")
            stack[-1].append(item)
        else:
            if len(stack) == 1:
                raise ParseError(f"atom {tok!r} outside parentheses", pos, "char")
            stack[-1].append(tok)
    if starts:
        raise ParseError("unclosed '('", starts[-1], "char")
    if len(stack[0]) != 1:
        raise ParseError(f"expected one tree, found {len(stack[0])}", len(text), "char")
    return stack[0][0]


def _read(text: str, leaf, node, bud):
    def build(item):
        head, rest = item[0], item[1:]
        if head == "?":
            if len(rest) != 1 or not isinstance(rest[0], str):
                raise ParseError("a bud is written (? SORT)", 0)
            return bud(rest[0])
        if any(isinstance(x, str) for x in rest):
            raise ParseError(f"stray atom under {head}", 0)
        return node(head, [build(x) for x in rest]) if rest else leaf(head)

    return build(parse_sexpr(text))


def parse_doc(text: str) -> DocTree:
    """AST syntax; ``(? C)`` is a bud."""
    return _read(text, DocTree, DocTree, DocTree.bud)


def parse_view_tree(text: str) -> SortTree:
    """View-tree syntax; ``(? B)`` is a bud."""
    return _read(text, SortTree, SortTree, lambda s: SortTree(s, bud=True))


def emit_doc(t) -> str:
    """Canonical single-spaced form of a DocTree or SortTree."""
    return t.sexpr()


def load_doc(path) -> DocTree:
    return parse_doc(Path(path).read_text(encoding="utf-8"))


def load_view_tree(path) -> SortTree:
    return parse_view_tree(Path(path).read_text(encoding="utf-8"))


def parse_view(text: str, eg: ExtendedGrammar) -> View:
    names = [s.strip() for s in text.split(",")]
    if not all(names):
        raise ParseError(f"bad view list {text!r}", 0)
    return make_view(eg, names)
