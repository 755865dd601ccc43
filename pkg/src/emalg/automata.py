"""Regexes, DFAs and transition semigroups.

The pipeline is the classical one: Thompson construction, epsilon-closure
subset construction, Hopcroft minimisation.  Languages live over nonempty
words; a regex that also matches the empty word is silently intersected with
the nonempty fragment (callers can inspect ``matches_epsilon``).  After
minimisation, a start state whose outgoing row duplicates another state's is
merged away: acceptance at the start only concerns the empty word, which is
outside the language space here, and the merge is what makes transition
semigroups come out minimal (e.g. the even-length unary language needs two
states, not three).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .algebra import Recognizer, word_algebra
from .core import SortedOrderedSet
from .monads import SORT_WORD, Word


@dataclass(frozen=True)
class Dfa:
    """A total deterministic automaton; the language is taken over nonempty
    words (acceptance of the empty word is deliberately ignored)."""

    alphabet: tuple
    n_states: int
    start: int
    accepting: frozenset
    trans: dict
    matches_epsilon: bool = field(default=False, compare=False)

    def __post_init__(self):
        for q in range(self.n_states):
            for c in self.alphabet:
                if (q, c) not in self.trans:
                    raise ValueError(f"missing transition ({q},{c!r})")
                if not 0 <= self.trans[(q, c)] < self.n_states:
                    raise ValueError(f"transition out of range at ({q},{c!r})")
        if not 0 <= self.start < self.n_states:
            raise ValueError("start state out of range")

    def step(self, q: int, c) -> int:
        return self.trans[(q, c)]

    def accepts(self, w: Iterable) -> bool:
        q = self.start
        n = 0
        for c in w:
            q = self.trans[(q, c)]
            n += 1
        return n > 0 and q in self.accepting


def words_up_to(alphabet: Iterable, n: int) -> Iterator[tuple]:
    """All nonempty words of length at most n, shortest first."""
    letters = tuple(alphabet)
    for k in range(1, n + 1):
        yield from itertools.product(letters, repeat=k)


# -- regex parsing ----------------------------------------------------------------

_META = set("()|*+?")


class RegexSyntaxError(ValueError):
    def __init__(self, pos: int, message: str):
        self.pos = pos
        super().__init__(f"regex error at position {pos}: {message}")


class _Frag:
    """NFA fragment: states are integers allocated by the builder."""

    __slots__ = ("start", "out")

    def __init__(self, start: int, out: int):
        self.start = start
        self.out = out


class _Builder:
    def __init__(self):
        self.eps: dict[int, list[int]] = {}
        self.sym: dict[tuple[int, str], list[int]] = {}
        self.n = 0

    def state(self) -> int:
        self.n += 1
        return self.n - 1

    def add_eps(self, a: int, b: int):
        self.eps.setdefault(a, []).append(b)

    def add_sym(self, a: int, c: str, b: int):
        self.sym.setdefault((a, c), []).append(b)


def _parse_regex_ast(text: str):
    pos = [0]

    def peek():
        return text[pos[0]] if pos[0] < len(text) else None

    def eat(c):
        if peek() != c:
            raise RegexSyntaxError(pos[0], f"expected {c!r}")
        pos[0] += 1

    def alt():
        parts = [concat()]
        while peek() == "|":
            eat("|")
            parts.append(concat())
        return ("alt", parts) if len(parts) > 1 else parts[0]

    def concat():
        parts = []
        while peek() is not None and peek() not in ")|":
            parts.append(repeat())
        if not parts:
            return ("eps",)
        return ("cat", parts) if len(parts) > 1 else parts[0]

    def repeat():
        node = atom()
        while peek() in ("*", "+", "?"):
            op = peek()
            eat(op)
            node = ({"*": "star", "+": "plus", "?": "opt"}[op], node)
        return node

    def atom():
        c = peek()
        if c is None:
            raise RegexSyntaxError(pos[0], "unexpected end of pattern")
        if c == "(":
            eat("(")
            node = alt()
            eat(")")
            return node
        if c in _META:
            raise RegexSyntaxError(pos[0], f"unexpected {c!r}")
        eat(c)
        return ("lit", c)

    node = alt()
    if pos[0] != len(text):
        raise RegexSyntaxError(pos[0], "unbalanced ')'")
    return node


def _thompson(node, b: _Builder) -> _Frag:
    kind = node[0]
    if kind == "lit":
        s, t = b.state(), b.state()
        b.add_sym(s, node[1], t)
        return _Frag(s, t)
    if kind == "eps":
        s = b.state()
        return _Frag(s, s)
    if kind == "cat":
        frags = [_thompson(x, b) for x in node[1]]
        for f1, f2 in zip(frags, frags[1:]):
            b.add_eps(f1.out, f2.start)
        return _Frag(frags[0].start, frags[-1].out)
    if kind == "alt":
        s, t = b.state(), b.state()
        for x in node[1]:
            f = _thompson(x, b)
            b.add_eps(s, f.start)
            b.add_eps(f.out, t)
        return _Frag(s, t)
    if kind in ("star", "opt", "plus"):
        f = _thompson(node[1], b)
        s, t = b.state(), b.state()
        b.add_eps(s, f.start)
        b.add_eps(f.out, t)
        if kind != "plus":
            b.add_eps(s, t)
        if kind != "opt":
            b.add_eps(f.out, f.start)
        return _Frag(s, t)
    raise AssertionError(kind)


def _collect_literals(node, acc: set):
    if node[0] == "lit":
        acc.add(node[1])
    elif node[0] in ("cat", "alt"):
        for x in node[1]:
            _collect_literals(x, acc)
    elif node[0] in ("star", "plus", "opt"):
        _collect_literals(node[1], acc)


def _subset_construction(b: _Builder, frag: _Frag, alphabet: tuple) -> Dfa:
    def closure(states: frozenset) -> frozenset:
        stack, seen = list(states), set(states)
        while stack:
            q = stack.pop()
            for r in b.eps.get(q, ()):
                if r not in seen:
                    seen.add(r)
                    stack.append(r)
        return frozenset(seen)

    start = closure(frozenset([frag.start]))
    index = {start: 0}
    order = [start]
    trans = {}
    i = 0
    while i < len(order):
        S = order[i]
        for c in alphabet:
            nxt = closure(
                frozenset(r for q in S for r in b.sym.get((q, c), ()))
            )
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            trans[(i, c)] = index[nxt]
        i += 1
    accepting = frozenset(i for S, i in index.items() if frag.out in S)
    eps = frag.out in start
    return Dfa(alphabet, len(order), 0, accepting, trans, matches_epsilon=eps)


def _hopcroft(dfa: Dfa) -> Dfa:
    states = range(dfa.n_states)
    acc = set(dfa.accepting)
    rej = set(states) - acc
    partition = [s for s in (acc, rej) if s]
    work = [s for s in (acc, rej) if s]
    preimage: dict[tuple, set] = {}
    for (q, c), r in dfa.trans.items():
        preimage.setdefault((r, c), set()).add(q)
    while work:
        A = work.pop()
        for c in dfa.alphabet:
            X = set()
            for r in A:
                X |= preimage.get((r, c), set())
            new_partition = []
            for Y in partition:
                inter, diff = Y & X, Y - X
                if inter and diff:
                    new_partition.extend([inter, diff])
                    if Y in work:
                        work.remove(Y)
                        work.extend([inter, diff])
                    else:
                        work.append(min(inter, diff, key=len))
                else:
                    new_partition.append(Y)
            partition = new_partition
    block_of = {}
    for i, block in enumerate(partition):
        for q in block:
            block_of[q] = i
    return _renumber(
        Dfa(
            dfa.alphabet,
            len(partition),
            block_of[dfa.start],
            frozenset(block_of[q] for q in dfa.accepting),
            {
                (block_of[q], c): block_of[r]
                for (q, c), r in dfa.trans.items()
            },
            matches_epsilon=dfa.matches_epsilon,
        )
    )


def _renumber(dfa: Dfa) -> Dfa:
    """BFS renumbering from the start state; drops unreachable states."""
    order = [dfa.start]
    index = {dfa.start: 0}
    i = 0
    while i < len(order):
        q = order[i]
        for c in dfa.alphabet:
            r = dfa.trans[(q, c)]
            if r not in index:
                index[r] = len(order)
                order.append(r)
        i += 1
    return Dfa(
        dfa.alphabet,
        len(order),
        0,
        frozenset(index[q] for q in dfa.accepting if q in index),
        {
            (index[q], c): index[r]
            for (q, c), r in dfa.trans.items()
            if q in index
        },
        matches_epsilon=dfa.matches_epsilon,
    )


def _merge_start(dfa: Dfa) -> Dfa:
    """Retarget the start onto a state with an identical outgoing row when
    that makes the automaton smaller; sound because only nonempty words
    count."""
    row = tuple(dfa.trans[(dfa.start, c)] for c in dfa.alphabet)
    for s in range(dfa.n_states):
        if s == dfa.start:
            continue
        if tuple(dfa.trans[(s, c)] for c in dfa.alphabet) == row:
            candidate = _renumber(
                Dfa(
                    dfa.alphabet,
                    dfa.n_states,
                    s,
                    dfa.accepting,
                    dfa.trans,
                    matches_epsilon=dfa.matches_epsilon,
                )
            )
            if candidate.n_states < dfa.n_states:
                return candidate
    return dfa


def parse_regex(text: str, alphabet: Iterable | None = None) -> Dfa:
    """Compile a regex to a minimal total DFA over nonempty words."""
    ast = _parse_regex_ast(text)
    if alphabet is None:
        letters: set = set()
        _collect_literals(ast, letters)
        alphabet = tuple(sorted(letters))
    else:
        alphabet = tuple(alphabet)
    if not alphabet:
        raise RegexSyntaxError(0, "regex has no letters and no alphabet was given")
    b = _Builder()
    frag = _thompson(ast, b)
    return _merge_start(_hopcroft(_subset_construction(b, frag, alphabet)))


# -- transition semigroups ----------------------------------------------------------


def dfa_to_recognizer(dfa: Dfa) -> Recognizer:
    """The transition semigroup generated by the letter transformations,
    with the acceptance set of transformations sending start into accepting."""
    letter_maps = {
        c: tuple(dfa.trans[(q, c)] for q in range(dfa.n_states))
        for c in dfa.alphabet
    }

    def compose(s: tuple, t: tuple) -> tuple:
        return tuple(t[q] for q in s)

    elems = list(dict.fromkeys(letter_maps.values()))
    frontier = list(elems)
    while frontier:
        new = []
        for t in frontier:
            for g in letter_maps.values():
                for c_ in (compose(t, g), compose(g, t)):
                    if c_ not in elems:
                        elems.append(c_)
                        new.append(c_)
        frontier = new
    carrier = SortedOrderedSet({SORT_WORD: elems}, max_size=max(64, len(elems)))
    mult = {(s, t): compose(s, t) for s in elems for t in elems}
    alg = word_algebra(carrier, mult)
    alphabet = SortedOrderedSet({SORT_WORD: list(dfa.alphabet)})
    accepting = frozenset(t for t in elems if t[dfa.start] in dfa.accepting)
    return Recognizer(alphabet, alg, dict(letter_maps), accepting)


def recognizer_accepts_word(rec: Recognizer, letters: Iterable) -> bool:
    return rec.accepts(Word(tuple(letters)))
