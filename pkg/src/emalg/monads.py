"""The three concrete label-container monads: finite words, ultimately periodic
omega-words (two-sorted), and finite ranked trees with linearly used variables.

Each instance provides ``sing``, ``map``, ``flat`` and the standard-ordering
comparison ``leq`` on its free elements.  Free elements are plain immutable
values; the monad objects are stateless.

Omega-words deliberately materialise only the ultimately periodic fragment:
evaluation in a finite two-sorted algebra is determined by it, so nothing is
lost at desk scale.  The general downward-closed-sets container is *not* an
instance of this interface (it does not use the standard ordering); it is
mentioned here only as a non-example.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Iterator

from .core import Sort, SortedFunction, SortedOrderedSet

# Sort conventions.
SORT_WORD: Sort = 0  # the single sort of the word monad
SORT_FIN: Sort = 1  # finite part of the omega-word monad
SORT_INF: Sort = 2  # infinite part of the omega-word monad

#: Node-count cap for tree flattening.
MAX_TREE_SIZE = 10_000


class SortMismatch(ValueError):
    """An element or label appears at an impossible sort."""


class _HoleType:
    """The context hole; a unique label-like marker."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "_"


HOLE = _HoleType()


# -- free elements -----------------------------------------------------------


@dataclass(frozen=True)
class Word:
    """A nonempty finite word; also the finite sort of the omega instance."""

    labels: tuple

    def __post_init__(self):
        if not isinstance(self.labels, tuple):
            object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ValueError("words are nonempty")

    def __len__(self):
        return len(self.labels)


def _primitive_root(v: tuple) -> tuple:
    n = len(v)
    for d in range(1, n + 1):
        if n % d == 0 and v[:d] * (n // d) == v:
            return v[:d]
    return v


def normalize_up(prefix: tuple, period: tuple) -> tuple[tuple, tuple]:
    """Canonical form of u.v^w: shortest period, maximal absorption.

    The period is first reduced to its primitive root; then trailing prefix
    letters equal to the period's last letter are absorbed by rotating the
    period.  The result is the unique representation with primitive period
    and shortest prefix, so structural equality decides equality of the
    denoted omega-words.
    """
    prefix, period = tuple(prefix), tuple(period)
    if not period:
        raise ValueError("period must be nonempty")
    period = _primitive_root(period)
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = (period[-1],) + period[:-1]
    return prefix, period


@dataclass(frozen=True)
class UPWord:
    """u . v^w, stored in normal form (sort-infinity element)."""

    prefix: tuple
    period: tuple

    def __post_init__(self):
        p, q = normalize_up(tuple(self.prefix), tuple(self.period))
        object.__setattr__(self, "prefix", p)
        object.__setattr__(self, "period", q)


@dataclass(frozen=True)
class MixedWord:
    """A finite (possibly empty) run of finite labels followed by one
    infinite label (sort-infinity element of the omega instance)."""

    prefix: tuple
    tail: Any

    def __post_init__(self):
        if not isinstance(self.prefix, tuple):
            object.__setattr__(self, "prefix", tuple(self.prefix))


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Node:
    label: Any
    children: tuple = ()

    def __post_init__(self):
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Tree:
    """A finite ranked tree of a given sort.

    Variables x0..x{sort-1} may each occur at most once, at leaves; the root
    carries a symbol.  A node's label must have arity equal to its child
    count (checked against a carrier on evaluation or flattening, since bare
    labels do not carry arities).
    """

    root: Node
    sort: int = 0

    def __post_init__(self):
        if isinstance(self.root, Var):
            raise ValueError("tree root must be a symbol, not a variable")
        seen: set[int] = set()
        for v in _tree_vars(self.root):
            if v in seen:
                raise ValueError(f"variable x{v} used twice (trees are linear)")
            seen.add(v)
            if v >= self.sort:
                raise ValueError(f"variable x{v} exceeds tree sort {self.sort}")


def _tree_vars(node) -> Iterator[int]:
    if isinstance(node, Var):
        yield node.index
    else:
        for c in node.children:
            yield from _tree_vars(c)


def tree_size(t: Tree) -> int:
    def count(n):
        if isinstance(n, Var):
            return 1
        return 1 + sum(count(c) for c in n.children)

    return count(t.root)


def tree_labels(node) -> Iterator[tuple[Any, int]]:
    """All (label, arity) pairs of a tree node, depth first."""
    if isinstance(node, Var):
        return
    yield node.label, len(node.children)
    for c in node.children:
        yield from tree_labels(c)


FreeElement = Any  # Word | UPWord | MixedWord | Tree, depending on instance


# -- the monad instances ------------------------------------------------------


def _as_label_fn(f) -> Callable[[Any, Sort], Any]:
    if isinstance(f, SortedFunction):
        return lambda a, s: f(a)
    if isinstance(f, dict):
        return lambda a, s: f[a]
    return f


class Monad:
    kind: str = ""

    @property
    def sorts(self) -> tuple[Sort, ...]:
        raise NotImplementedError

    def element_sort(self, t: FreeElement) -> Sort:
        raise NotImplementedError

    def sing(self, a: Any, sort: Sort) -> FreeElement:
        raise NotImplementedError

    def map(self, f, t: FreeElement) -> FreeElement:
        """Relabel; f is called as f(label, label_sort)."""
        raise NotImplementedError

    def flat(self, t: FreeElement) -> FreeElement:
        """Flatten an element whose labels are themselves free elements."""
        raise NotImplementedError

    def leq(self, s: FreeElement, t: FreeElement, order: SortedOrderedSet) -> bool:
        """Standard ordering: identical shape, labels pointwise <=."""
        raise NotImplementedError

    def labels(self, t: FreeElement) -> Iterator[tuple[Any, Sort]]:
        raise NotImplementedError

    def __repr__(self):
        return f"<monad {self.kind}>"


class WordMonad(Monad):
    kind = "word"

    @property
    def sorts(self):
        return (SORT_WORD,)

    def element_sort(self, t):
        if not isinstance(t, Word):
            raise SortMismatch(f"not a word: {t!r}")
        return SORT_WORD

    def sing(self, a, sort=SORT_WORD):
        if sort != SORT_WORD:
            raise SortMismatch(f"word labels live at sort {SORT_WORD}")
        return Word((a,))

    def map(self, f, t):
        f = _as_label_fn(f)
        return Word(tuple(f(a, SORT_WORD) for a in t.labels))

    def flat(self, t):
        out: list = []
        for w in t.labels:
            if not isinstance(w, Word):
                raise SortMismatch(f"label {w!r} is not a word")
            out.extend(w.labels)
        return Word(tuple(out))

    def leq(self, s, t, order):
        return len(s.labels) == len(t.labels) and all(
            order.leq(a, b) for a, b in zip(s.labels, t.labels)
        )

    def labels(self, t):
        for a in t.labels:
            yield a, SORT_WORD


class OmegaMonad(Monad):
    """Ultimately periodic omega-words over a two-sorted label set.

    Sort-1 elements are nonempty finite words over sort-1 labels.  Sort-inf
    elements are either u.v^w pairs of sort-1 labels, or a finite (possibly
    empty) run of sort-1 labels closed off by a single sort-inf label.
    """

    kind = "omega"

    @property
    def sorts(self):
        return (SORT_FIN, SORT_INF)

    def element_sort(self, t):
        if isinstance(t, Word):
            return SORT_FIN
        if isinstance(t, (UPWord, MixedWord)):
            return SORT_INF
        raise SortMismatch(f"not an omega-word element: {t!r}")

    def sing(self, a, sort):
        if sort == SORT_FIN:
            return Word((a,))
        if sort == SORT_INF:
            return MixedWord((), a)
        raise SortMismatch(f"no sort {sort} in the omega instance")

    def map(self, f, t):
        f = _as_label_fn(f)
        if isinstance(t, Word):
            return Word(tuple(f(a, SORT_FIN) for a in t.labels))
        if isinstance(t, UPWord):
            # relabelling can shorten the period, so renormalise
            return UPWord(
                tuple(f(a, SORT_FIN) for a in t.prefix),
                tuple(f(a, SORT_FIN) for a in t.period),
            )
        return MixedWord(
            tuple(f(a, SORT_FIN) for a in t.prefix), f(t.tail, SORT_INF)
        )

    def flat(self, t):
        def cat(words) -> tuple:
            out: list = []
            for w in words:
                if not isinstance(w, Word):
                    raise SortMismatch(f"finite position holds {w!r}")
                out.extend(w.labels)
            return tuple(out)

        if isinstance(t, Word):
            return Word(cat(t.labels))
        if isinstance(t, UPWord):
            return UPWord(cat(t.prefix), cat(t.period))
        prefix = cat(t.prefix)
        tail = t.tail
        if isinstance(tail, UPWord):
            return UPWord(prefix + tail.prefix, tail.period)
        if isinstance(tail, MixedWord):
            return MixedWord(prefix + tail.prefix, tail.tail)
        raise SortMismatch(f"infinite position holds {tail!r}")

    def leq(self, s, t, order):
        if isinstance(s, Word) and isinstance(t, Word):
            return len(s.labels) == len(t.labels) and all(
                order.leq(a, b) for a, b in zip(s.labels, t.labels)
            )
        if isinstance(s, UPWord) and isinstance(t, UPWord):
            return (
                len(s.prefix) == len(t.prefix)
                and len(s.period) == len(t.period)
                and all(order.leq(a, b) for a, b in zip(s.prefix, t.prefix))
                and all(order.leq(a, b) for a, b in zip(s.period, t.period))
            )
        if isinstance(s, MixedWord) and isinstance(t, MixedWord):
            return (
                len(s.prefix) == len(t.prefix)
                and all(order.leq(a, b) for a, b in zip(s.prefix, t.prefix))
                and order.leq(s.tail, t.tail)
            )
        return False

    def labels(self, t):
        if isinstance(t, Word):
            for a in t.labels:
                yield a, SORT_FIN
        elif isinstance(t, UPWord):
            for a in t.prefix + t.period:
                yield a, SORT_FIN
        else:
            for a in t.prefix:
                yield a, SORT_FIN
            yield t.tail, SORT_INF


class TreeMonad(Monad):
    kind = "tree"

    def __init__(self, max_arity: int = 3):
        if max_arity < 0:
            raise ValueError("max_arity must be >= 0")
        self.max_arity = max_arity

    @property
    def sorts(self):
        return tuple(range(self.max_arity + 1))

    def element_sort(self, t):
        if not isinstance(t, Tree):
            raise SortMismatch(f"not a tree: {t!r}")
        if t.sort > self.max_arity:
            raise SortMismatch(f"tree sort {t.sort} exceeds arity cap {self.max_arity}")
        return t.sort

    def sing(self, a, sort):
        if not 0 <= sort <= self.max_arity:
            raise SortMismatch(f"arity {sort} out of range 0..{self.max_arity}")
        return Tree(Node(a, tuple(Var(i) for i in range(sort))), sort)

    def map(self, f, t):
        f = _as_label_fn(f)

        def go(n):
            if isinstance(n, Var):
                return n
            return Node(f(n.label, len(n.children)), tuple(go(c) for c in n.children))

        return Tree(go(t.root), t.sort)

    def flat(self, t):
        budget = [MAX_TREE_SIZE]

        def substitute(n, subs):
            if isinstance(n, Var):
                return subs.get(n.index, n)
            budget[0] -= 1
            if budget[0] < 0:
                raise ValueError(f"flattened tree exceeds {MAX_TREE_SIZE} nodes")
            return Node(n.label, tuple(substitute(c, subs) for c in n.children))

        def go(n):
            if isinstance(n, Var):
                return n
            inner = n.label
            if not isinstance(inner, Tree):
                raise SortMismatch(f"label {inner!r} is not a tree")
            if inner.sort != len(n.children):
                raise SortMismatch(
                    f"inner tree of sort {inner.sort} at a node with "
                    f"{len(n.children)} children"
                )
            subs = {i: go(c) for i, c in enumerate(n.children)}
            return substitute(inner.root, subs)

        return Tree(go(t.root), t.sort)

    def leq(self, s, t, order):
        if s.sort != t.sort:
            return False

        def go(m, n):
            if isinstance(m, Var) or isinstance(n, Var):
                return m == n
            if len(m.children) != len(n.children):
                return False
            if not order.leq(m.label, n.label):
                return False
            return all(go(c, d) for c, d in zip(m.children, n.children))

        return go(s.root, t.root)

    def labels(self, t):
        yield from tree_labels(t.root)


WORD = WordMonad()
OMEGA_UP = OmegaMonad()


def tree_monad(max_arity: int = 3) -> TreeMonad:
    return TreeMonad(max_arity)


# -- text grammar -------------------------------------------------------------
#
#   word    := '[' labels ']'                     e.g.  [a,b,a]
#   upword  := '[' labels? ']' '(' word ')^w'     e.g.  [a]([b,a])^w
#   tree    := sym | sym '(' tree {',' tree} ')' | 'x' digits
#
# Labels are identifiers; whitespace is ignored.  The token '_' denotes the
# context hole when holes are allowed.

_TOKEN = re.compile(r"\s*([A-Za-z][A-Za-z0-9_]*|\^w|[_()\[\],])")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"bad literal at position {pos}: {text[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


def _parse_bracket_labels(toks: list[str], allow_hole: bool, allow_empty: bool):
    if not toks or toks[0] != "[":
        raise ValueError("expected '['")
    toks.pop(0)
    labels: list = []
    while toks and toks[0] != "]":
        t = toks.pop(0)
        if t == ",":
            continue
        if t == "_":
            if not allow_hole:
                raise ValueError("hole not allowed here")
            labels.append(HOLE)
        else:
            labels.append(t)
    if not toks:
        raise ValueError("unterminated '['")
    toks.pop(0)
    if not labels and not allow_empty:
        raise ValueError("empty word literal")
    return labels


def parse_word(text: str, *, allow_hole: bool = False) -> Word:
    toks = _tokenize(text)
    labels = _parse_bracket_labels(toks, allow_hole, allow_empty=False)
    if toks:
        raise ValueError(f"trailing input {toks!r}")
    return Word(tuple(labels))


def parse_up_raw(text: str, *, allow_hole: bool = False) -> tuple[tuple, tuple]:
    """Parse '[u]([v])^w' into raw (prefix, period) tuples, unnormalised.

    Context literals with holes must stay unnormalised (normalisation would
    move the hole), so the raw form is exposed separately from ``UPWord``.
    """
    toks = _tokenize(text)
    prefix = _parse_bracket_labels(toks, allow_hole, allow_empty=True)
    if not toks or toks.pop(0) != "(":
        raise ValueError("expected '(' before the period")
    period = _parse_bracket_labels(toks, allow_hole, allow_empty=False)
    if len(toks) < 2 or toks.pop(0) != ")" or toks.pop(0) != "^w":
        raise ValueError("expected ')^w' after the period")
    if toks:
        raise ValueError(f"trailing input {toks!r}")
    return tuple(prefix), tuple(period)


def parse_upword(text: str) -> UPWord:
    prefix, period = parse_up_raw(text)
    return UPWord(prefix, period)


def parse_tree(text: str, *, allow_hole: bool = False, sort: int | None = None) -> Tree:
    toks = _tokenize(text)

    def node():
        if not toks:
            raise ValueError("unexpected end of tree literal")
        t = toks.pop(0)
        if t == "_":
            if not allow_hole:
                raise ValueError("hole not allowed here")
            label: Any = HOLE
        elif re.fullmatch(r"x\d+", t):
            return Var(int(t[1:]))
        else:
            label = t
        children: list = []
        if toks and toks[0] == "(":
            toks.pop(0)
            while True:
                children.append(node())
                if not toks:
                    raise ValueError("unterminated '('")
                nxt = toks.pop(0)
                if nxt == ")":
                    break
                if nxt != ",":
                    raise ValueError(f"expected ',' or ')', got {nxt!r}")
        return Node(label, tuple(children))

    root = node()
    if toks:
        raise ValueError(f"trailing input {toks!r}")
    if isinstance(root, Var):
        raise ValueError("tree root must be a symbol")
    inferred = max((v + 1 for v in _tree_vars(root)), default=0)
    return Tree(root, inferred if sort is None else sort)


def parse_element(text: str, monad: Monad) -> FreeElement:
    """Parse a free-element literal appropriate for the given instance."""
    if monad.kind == "word":
        return parse_word(text)
    if monad.kind == "omega":
        return parse_upword(text) if ")^w" in text.replace(" ", "") else parse_word(text)
    return parse_tree(text)


def serialize(t: FreeElement, name=str) -> str:
    """Render a free element in the literal grammar; labels through ``name``."""
    if isinstance(t, Word):
        return "[" + ",".join(name(a) for a in t.labels) + "]"
    if isinstance(t, UPWord):
        pre = ",".join(name(a) for a in t.prefix)
        per = ",".join(name(a) for a in t.period)
        return f"[{pre}]([{per}])^w"
    if isinstance(t, MixedWord):
        pre = ",".join(name(a) for a in t.prefix)
        return f"[{pre}]{name(t.tail)}"
    if isinstance(t, Tree):
        def go(n):
            if isinstance(n, Var):
                return f"x{n.index}"
            lab = "_" if n.label is HOLE else name(n.label)
            if not n.children:
                return lab
            return lab + "(" + ",".join(go(c) for c in n.children) + ")"

        return go(t.root)
    raise TypeError(f"not a free element: {t!r}")
