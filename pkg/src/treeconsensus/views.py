"""Views, projection onto a view, and Dyck-word linearization of view forests."""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

from .grammar import Bud, DocTree, ExtendedGrammar, GrammarError, SortTree, TreeError


class ViewError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, index: int, unit: str = "token"):
        super().__init__(f"{message} ({unit} {index})")
        self.index = index


class View(frozenset):
    """The set of sorts a co-author may see."""

    def __repr__(self) -> str:
        return "View({" + ",".join(sorted(self)) + "})"

    def __str__(self) -> str:
        return ",".join(sorted(self))


def make_view(eg: ExtendedGrammar, sorts: Iterable[str]) -> View:
    v = View(sorts)
    unknown = sorted(v - eg.base.sorts)
    if unknown:
        raise ViewError(f"view mentions unknown sorts: {', '.join(unknown)}")
    if eg.axiom not in v:
        raise ViewError(f"view must contain the axiom {eg.axiom}")
    return v


def _project_forest(eg: ExtendedGrammar, t: DocTree, v) -> list:
    if isinstance(t.label, Bud):
        return [SortTree(t.label.sort, bud=True)] if t.label.sort in v else []
    sort = eg.type_of_label(t.label)
    kids = []
    for c in t.children:
        kids.extend(_project_forest(eg, c, v))
    if sort in v:
        return [SortTree(sort, kids)]
    return kids


def project_forest(eg: ExtendedGrammar, t: DocTree, v) -> tuple:
    return tuple(_project_forest(eg, t, v))


def project(eg: ExtendedGrammar, t: DocTree, v) -> SortTree:
    """Erase invisible nodes, promoting their visible descendants in place."""
    sort = eg.type_of_label(t.label)
    if sort not in v:
        raise ViewError(f"root sort {sort} is not visible in {View(v)}")
    (tree,) = _project_forest(eg, t, v)
    return tree


def check_view_tree(eg: ExtendedGrammar, v, r: SortTree) -> None:
    for w, node in r.items():
        if node.sort not in eg.base.sorts:
            raise GrammarError(f"unknown sort {node.sort!r}")
        if node.sort not in v:
            raise ViewError(f"sort {node.sort} at {w} is not visible")


class DyckToken(NamedTuple):
    kind: str  # "open" | "close" | "bud"
    sort: str

    def __str__(self) -> str:
        return {"open": "Open", "close": "Close", "bud": "Bud"}[self.kind] + f"({self.sort})"


def dyck_encode(forest) -> list:
    if isinstance(forest, SortTree):
        forest = (forest,)
    out = []

    def go(node):
        if node.bud:
            out.append(DyckToken("bud", node.sort))
            return
        out.append(DyckToken("open", node.sort))
        for c in node.children:
            go(c)
        out.append(DyckToken("close", node.sort))

    for tree in forest:
        go(tree)
    return out


def dyck_decode(tokens: Sequence) -> tuple:
    stack = [(None, [])]
    for i, tok in enumerate(tokens):
        kind, sort = tok
        if kind == "open":
            stack.append((sort, []))
        elif kind == "close":
            if len(stack) == 1:
                raise ParseError(f"unmatched close of {sort}", i)
            open_sort, kids = stack.pop()
            if open_sort != sort:
                raise ParseError(f"close of {sort} does not match open {open_sort}", i)
            stack[-1][1].append(SortTree(sort, kids))
        elif kind == "bud":
            stack[-1][1].append(SortTree(sort, bud=True))
        else:
            raise ParseError(f"unknown token kind {kind!r}", i)
    if len(stack) != 1:
        raise ParseError(f"unclosed {stack[-1][0]}", len(tokens))
    return tuple(stack[0][1])


def dyck_key(forest) -> tuple:
    """Hashable canonical key of a forest."""
    return tuple(dyck_encode(forest))


DEFAULT_BRACKETS = ("()", "[]", "{}", "⟨⟩", "«»", "‹›", "⌈⌉", "⌊⌋")


def default_brackets(v) -> dict:
    """Bracket pairs for the sorts of a view: the axiom first, then by name."""
    order = sorted(v)
    if len(order) > len(DEFAULT_BRACKETS):
        raise ViewError("too many sorts for the default bracket alphabet")
    return {s: DEFAULT_BRACKETS[i] for i, s in enumerate(order)}


def render_dyck(forest, brackets: dict) -> str:
    parts = []
    for kind, sort in dyck_encode(forest):
        if kind == "bud":
            parts.append(f"<{sort}>")
        else:
            pair = brackets[sort]
            parts.append(pair[0] if kind == "open" else pair[1])
    return "".join(parts)


def parse_dyck(text: str, brackets: dict) -> tuple:
    opens = {pair[0]: s for s, pair in brackets.items()}
    closes = {pair[1]: s for s, pair in brackets.items()}
    tokens = []
    i = 0
    text = "".join(text.split())
    while i < len(text):
        ch = text[i]
        if ch == "<":
            j = text.find(">", i)
            if j < 0:
                raise ParseError("unterminated bud", len(tokens))
            tokens.append(DyckToken("bud", text[i + 1 : j]))
            i = j + 1
            continue
        if ch in opens:
            tokens.append(DyckToken("open", opens[ch]))
        elif ch in closes:
            tokens.append(DyckToken("close", closes[ch]))
        else:
            raise ParseError(f"unexpected character {ch!r}", len(tokens))
        i += 1
    return dyck_decode(tokens)


def view_tree_le(a: SortTree, b: SortTree) -> bool:
    """Update order on view trees: ``b`` develops some buds of ``a``."""
    if a.bud:
        return a.sort == b.sort
    if b.bud or a.sort != b.sort or len(a.children) != len(b.children):
        return False
    return all(view_tree_le(x, y) for x, y in zip(a.children, b.children))


__all__ = [
    "View",
    "ViewError",
    "ParseError",
    "TreeError",
    "make_view",
    "project",
    "project_forest",
    "check_view_tree",
    "DyckToken",
    "dyck_encode",
    "dyck_decode",
    "dyck_key",
    "default_brackets",
    "render_dyck",
    "parse_dyck",
    "view_tree_le",
]
