"""Grammars, bud-extended grammars and production-labelled document trees.

A document is an AST: every node carries a production name, except buds,
which carry a :class:`Bud` label and mark a not-yet-edited region of a
given sort. Nodes are addressed Dewey style: the root is ``()`` and the
i-th child (1-based) of ``w`` is ``w + (i,)``.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

Address = tuple  # tuple[int, ...]; () is the root


class GrammarError(ValueError):
    pass


class TreeError(ValueError):
    pass


class NotABud(TreeError):
    pass


class TypeMismatch(TreeError):
    pass


def format_address(w: Address) -> str:
    return ".".join(map(str, w)) if w else "ε"


def parse_address(text: str) -> Address:
    text = text.strip()
    if text in ("", "ε", "e", "eps"):
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise TreeError(f"bad address {text!r}") from None
    if any(p < 1 for p in parts):
        raise TreeError(f"address components must be positive: {text!r}")
    return parts


class Bud(NamedTuple):
    """Label of an open node of the given sort (written X_ω)."""

    sort: str

    def __str__(self) -> str:
        return f"{self.sort}_ω"


@dataclass(frozen=True)
class Production:
    name: str
    lhs: str
    rhs: tuple = ()

    @property
    def arity(self) -> int:
        return len(self.rhs)

    def __str__(self) -> str:
        return f"{self.name}: {self.lhs} -> {' '.join(self.rhs)}".rstrip()


class Grammar:
    """Abstract context-free grammar (sorts, named productions, axiom).

    Validated eagerly; a :class:`GrammarError` lists every violated invariant.
    """

    def __init__(self, sorts: Iterable[str], productions: Iterable[Production], axiom: str):
        self.sorts = frozenset(sorts)
        self.productions = tuple(productions)
        self.axiom = axiom
        problems = []
        for s in self.sorts:
            if not isinstance(s, str) or not s.isidentifier():
                problems.append(f"sort {s!r} is not an identifier")
        if axiom not in self.sorts:
            problems.append(f"axiom {axiom!r} is not a sort")
        seen = set()
        for p in self.productions:
            if p.name in seen:
                problems.append(f"duplicate production name {p.name!r}")
            seen.add(p.name)
            for s in (p.lhs, *p.rhs):
                if s not in self.sorts:
                    problems.append(f"production {p.name!r} uses unknown sort {s!r}")
        if problems:
            raise GrammarError("; ".join(problems))
        self.by_name = {p.name: p for p in self.productions}
        self.by_lhs = {s: [] for s in sorted(self.sorts)}
        for p in self.productions:
            self.by_lhs[p.lhs].append(p)

    def __repr__(self) -> str:
        return f"Grammar(axiom={self.axiom!r}, productions={len(self.productions)})"

    def __eq__(self, other):
        return (
            isinstance(other, Grammar)
            and self.sorts == other.sorts
            and self.productions == other.productions
            and self.axiom == other.axiom
        )

    def __hash__(self):
        return hash((self.sorts, self.productions, self.axiom))


class ExtendedGrammar:
    """Grammar enriched with one bud sort X_ω and one nullary bud production
    X_Ω: X_ω -> ε per base sort."""

    def __init__(self, base: Grammar):
        self.base = base
        self.bud_sorts = {x: f"{x}_ω" for x in sorted(base.sorts)}
        self.bud_productions = {x: f"{x}_Ω" for x in sorted(base.sorts)}
        self.sort_to_bud_label = {x: Bud(x) for x in sorted(base.sorts)}
        clash = set(self.bud_sorts.values()) & base.sorts
        clash |= set(self.bud_productions.values()) & set(base.by_name)
        if clash:
            raise GrammarError(f"bud names collide with base grammar: {sorted(clash)}")

    @property
    def axiom(self) -> str:
        return self.base.axiom

    @property
    def sorts(self) -> frozenset:
        return self.base.sorts | frozenset(self.bud_sorts.values())

    @property
    def productions(self) -> tuple:
        buds = tuple(
            Production(self.bud_productions[x], self.bud_sorts[x], ())
            for x in sorted(self.base.sorts)
        )
        return self.base.productions + buds

    def production(self, name: str) -> Production:
        try:
            return self.base.by_name[name]
        except KeyError:
            raise GrammarError(f"unknown production {name!r}") from None

    def productions_of(self, sort: str) -> list:
        return self.base.by_lhs[sort]

    def type_of_label(self, label) -> str:
        if isinstance(label, Bud):
            if label.sort not in self.base.sorts:
                raise GrammarError(f"bud of unknown sort {label.sort!r}")
            return label.sort
        return self.production(label).lhs

    def __repr__(self) -> str:
        return f"ExtendedGrammar({self.base!r})"


def extend_grammar(g: Grammar) -> ExtendedGrammar:
    return ExtendedGrammar(g)


class DocTree:
    """Immutable production-labelled tree with cached hash and size.

    ``label`` is a production name or a :class:`Bud`. Trees compare by value.
    """

    __slots__ = ("label", "children", "_hash", "size")

    def __init__(self, label, children: Sequence["DocTree"] = ()):
        self.label = label
        self.children = tuple(children)
        if isinstance(label, Bud) and self.children:
            raise TreeError("a bud has no children")
        self._hash = hash((label, self.children))
        self.size = 1 + sum(c.size for c in self.children)

    @classmethod
    def bud(cls, sort: str) -> "DocTree":
        return cls(Bud(sort))

    @property
    def is_bud(self) -> bool:
        return isinstance(self.label, Bud)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DocTree) or self._hash != other._hash:
            return False
        return self.label == other.label and self.children == other.children

    def __repr__(self) -> str:
        return f"DocTree({self.sexpr()})"

    def __str__(self) -> str:
        return self.sexpr()

    def sexpr(self) -> str:
        if self.is_bud:
            return f"(? {self.label.sort})"
        if not self.children:
            return f"({self.label})"
        return f"({self.label} {' '.join(c.sexpr() for c in self.children)})"

    def sort_key(self):
        return (self.size, self.sexpr())

    # Dewey-address view

    def __getitem__(self, w: Address):
        return self.subtree(w).label

    def subtree(self, w: Address) -> "DocTree":
        node = self
        for i in w:
            if not 1 <= i <= len(node.children):
                raise TreeError(f"address {format_address(w)} not in domain")
            node = node.children[i - 1]
        return node

    def __contains__(self, w) -> bool:
        try:
            self.subtree(w)
        except TreeError:
            return False
        return True

    def items(self, prefix: Address = ()) -> Iterator:
        """Yield ``(address, label)`` in depth-first order."""
        yield prefix, self.label
        for i, c in enumerate(self.children, 1):
            yield from c.items(prefix + (i,))

    def domain(self) -> list:
        return [w for w, _ in self.items()]

    def as_map(self) -> dict:
        return dict(self.items())

    @classmethod
    def from_map(cls, mapping: dict) -> "DocTree":
        """Build a tree from an address -> label map (inverse of :meth:`as_map`)."""
        if () not in mapping:
            raise TreeError("domain lacks the root")
        kids = {}
        for w in mapping:
            if w:
                if w[:-1] not in mapping:
                    raise TreeError(f"domain not prefix closed at {format_address(w)}")
                kids.setdefault(w[:-1], []).append(w[-1])

        def build(w):
            idx = sorted(kids.get(w, []))
            if idx != list(range(1, len(idx) + 1)):
                raise TreeError(f"children of {format_address(w)} are not 1..n")
            return cls(mapping[w], [build(w + (i,)) for i in idx])

        return build(())

    def replace(self, w: Address, sub: "DocTree") -> "DocTree":
        if not w:
            return sub
        i = w[0]
        if not 1 <= i <= len(self.children):
            raise TreeError(f"address {format_address(w)} not in domain")
        kids = list(self.children)
        kids[i - 1] = kids[i - 1].replace(w[1:], sub)
        return DocTree(self.label, kids)

    def buds(self) -> list:
        return [(w, lab) for w, lab in self.items() if isinstance(lab, Bud)]


class Status(enum.Enum):
    CLOSED = "closed"
    OPEN = "open"
    INVALID = "invalid"


@dataclass(frozen=True)
class Conformance:
    status: Status
    address: Address | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.status is not Status.INVALID


def conforms(eg: ExtendedGrammar, t: DocTree, root_sort: str | None = None) -> Conformance:
    """Check ``t`` against the extended grammar from ``root_sort`` (axiom by default)."""
    root_sort = eg.axiom if root_sort is None else root_sort
    has_bud = False
    stack = [((), t, root_sort)]
    while stack:
        w, node, expected = stack.pop()
        if isinstance(node.label, Bud):
            if node.label.sort != expected:
                return Conformance(Status.INVALID, w, f"bud of sort {node.label.sort}, expected {expected}")
            has_bud = True
            continue
        p = eg.base.by_name.get(node.label)
        if p is None:
            return Conformance(Status.INVALID, w, f"unknown production {node.label!r}")
        if p.lhs != expected:
            return Conformance(Status.INVALID, w, f"{p.name} has type {p.lhs}, expected {expected}")
        if len(node.children) != p.arity:
            return Conformance(
                Status.INVALID, w, f"{p.name} needs {p.arity} children, got {len(node.children)}"
            )
        for i in range(len(node.children), 0, -1):
            stack.append((w + (i,), node.children[i - 1], p.rhs[i - 1]))
    return Conformance(Status.OPEN if has_bud else Status.CLOSED)


def node_type(eg: ExtendedGrammar, t: DocTree, w: Address = ()) -> str:
    return eg.type_of_label(t.subtree(w).label)


def expand_bud(eg: ExtendedGrammar, p: Production) -> DocTree:
    return DocTree(p.name, [DocTree.bud(x) for x in p.rhs])


def apply_production(eg: ExtendedGrammar, t: DocTree, w: Address, p) -> DocTree:
    """Edit the bud at ``w`` with production ``p`` (a name or a Production)."""
    if not isinstance(p, Production):
        p = eg.production(p)
    elif eg.base.by_name.get(p.name) != p:
        raise GrammarError(f"production {p.name!r} is not in the grammar")
    node = t.subtree(w)
    if not node.is_bud:
        raise NotABud(f"node {format_address(w)} is labelled {node.label}, not a bud")
    if node.label.sort != p.lhs:
        raise TypeMismatch(f"bud at {format_address(w)} has sort {node.label.sort}, {p.name} builds {p.lhs}")
    return t.replace(w, expand_bud(eg, p))


def is_update(eg: ExtendedGrammar, t: DocTree, t2: DocTree) -> bool:
    """``t <= t2``: t2 is obtained from t by developing some of its buds."""
    if t.is_bud:
        return eg.type_of_label(t2.label) == t.label.sort
    if t.label != t2.label or len(t.children) != len(t2.children):
        return False
    return all(is_update(eg, a, b) for a, b in zip(t.children, t2.children))


def prune_at(eg: ExtendedGrammar, t: DocTree, addrs: Iterable[Address]) -> DocTree:
    addrs = set(map(tuple, addrs))
    for w in addrs:
        if w not in t:
            raise TreeError(f"address {format_address(w)} not in domain")

    def go(node, w):
        if w in addrs:
            return DocTree.bud(eg.type_of_label(node.label))
        if not node.children:
            return node
        return DocTree(node.label, [go(c, w + (i,)) for i, c in enumerate(node.children, 1)])

    return go(t, ())


def prefixes(eg: ExtendedGrammar, t: DocTree) -> set:
    """Every ``t' <= t`` (including ``t`` itself)."""
    bud = DocTree.bud(eg.type_of_label(t.label))
    if t.is_bud:
        return {t}
    out = {bud}
    for kids in itertools.product(*(prefixes(eg, c) for c in t.children)):
        out.add(DocTree(t.label, kids))
    return out


def all_proper_prefixes(eg: ExtendedGrammar, t: DocTree) -> set:
    out = prefixes(eg, t)
    out.discard(t)
    return out


class SortTree:
    """Sort-labelled tree; leaves may be buds. Also used for view trees.

    ``production`` optionally records the AST label so that conversion back
    to a :class:`DocTree` is unambiguous.
    """

    __slots__ = ("sort", "children", "bud", "production", "_hash")

    def __init__(self, sort: str, children: Sequence["SortTree"] = (), bud: bool = False, production=None):
        self.sort = sort
        self.children = tuple(children)
        self.bud = bud
        self.production = production
        if bud and self.children:
            raise TreeError("a bud has no children")
        self._hash = hash((sort, self.children, bud))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        # production annotations are not part of the value
        if self is other:
            return True
        return (
            isinstance(other, SortTree)
            and self._hash == other._hash
            and self.sort == other.sort
            and self.bud == other.bud
            and self.children == other.children
        )

    @property
    def size(self) -> int:
        return 1 + sum(c.size for c in self.children)

    def sexpr(self) -> str:
        if self.bud:
            return f"(? {self.sort})"
        if not self.children:
            return f"({self.sort})"
        return f"({self.sort} {' '.join(c.sexpr() for c in self.children)})"

    __str__ = sexpr

    def __repr__(self) -> str:
        return f"SortTree({self.sexpr()})"

    def items(self, prefix: Address = ()) -> Iterator:
        yield prefix, self
        for i, c in enumerate(self.children, 1):
            yield from c.items(prefix + (i,))


def to_sort_tree(eg: ExtendedGrammar, t: DocTree) -> SortTree:
    if t.is_bud:
        return SortTree(t.label.sort, bud=True)
    return SortTree(
        eg.type_of_label(t.label), [to_sort_tree(eg, c) for c in t.children], production=t.label
    )


def from_sort_tree(eg: ExtendedGrammar, st: SortTree) -> DocTree:
    """Inverse of :func:`to_sort_tree`.

    Uses the production annotation when present; otherwise the (lhs, child
    sorts) signature must select exactly one production.
    """
    if st.bud:
        if st.sort not in eg.base.sorts:
            raise GrammarError(f"unknown sort {st.sort!r}")
        return DocTree.bud(st.sort)
    kid_sorts = tuple(c.sort for c in st.children)
    if st.production is not None:
        p = eg.production(st.production)
        if p.lhs != st.sort or p.rhs != kid_sorts:
            raise TreeError(f"production {p.name} does not match {st.sort} -> {' '.join(kid_sorts)}")
    else:
        matches = [p for p in eg.productions_of(st.sort) if p.rhs == kid_sorts] if st.sort in eg.base.sorts else []
        if not matches:
            raise TreeError(f"no production {st.sort} -> {' '.join(kid_sorts)}")
        if len(matches) > 1:
            names = ", ".join(p.name for p in matches)
            raise TreeError(f"ambiguous signature {st.sort} -> {' '.join(kid_sorts)} ({names})")
        p = matches[0]
    return DocTree(p.name, [from_sort_tree(eg, c) for c in st.children])


def convert_representation(eg: ExtendedGrammar, t):
    """AST -> sort tree, or sort tree -> AST, depending on the input type."""
    if isinstance(t, DocTree):
        return to_sort_tree(eg, t)
    if isinstance(t, SortTree):
        return from_sort_tree(eg, t)
    raise TypeError(f"expected DocTree or SortTree, got {type(t).__name__}")


def fig8_grammar() -> Grammar:
    """The seven-production grammar used throughout the worked example."""
    prods = [
        Production("P1", "A", ("C", "B")),
        Production("P2", "A", ()),
        Production("P3", "B", ("C", "A")),
        Production("P4", "B", ("B", "B")),
        Production("P5", "C", ("A", "C")),
        Production("P6", "C", ("C", "C")),
        Production("P7", "C", ()),
    ]
    return Grammar({"A", "B", "C"}, prods, "A")
