"""The omega-term fragment of profinite terms: syntax, evaluation in finitary
algebras, and inequality satisfaction.

Only a fragment of the full space of profinite terms has finite syntax here:
variables, composition, and the idempotent power x^w (the limit of the
sequence of factorial powers, which in a finite algebra is the unique
idempotent among the powers of x).  That fragment is what the classical
axiomatisations (aperiodicity etc.) are written in; consequences of richer
limit points are out of scope and documented as such.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Iterator, Optional

from .algebra import FinAlgebra
from .core import Elem
from .monads import SORT_FIN, SORT_INF, SORT_WORD, SortMismatch


@dataclass(frozen=True)
class TermVar:
    name: str


@dataclass(frozen=True)
class TermSeq:
    """Composition by juxtaposition (left to right)."""

    items: tuple

    def __post_init__(self):
        if len(self.items) < 2:
            raise ValueError("sequences need at least two factors")


@dataclass(frozen=True)
class OmegaPow:
    """Idempotent power on a self-composable sort."""

    body: Any


@dataclass(frozen=True)
class InfPow:
    """Omega algebras only: the infinite power, landing in the infinite sort."""

    body: Any


@dataclass(frozen=True)
class TreeTerm:
    """A tree-shaped composition node: head applied to children."""

    head: Any
    children: tuple


Term = Any


@dataclass(frozen=True)
class Inequality:
    lhs: Term
    rhs: Term

    def variables(self) -> tuple[str, ...]:
        return tuple(sorted(set(_vars(self.lhs)) | set(_vars(self.rhs))))

    def __str__(self):
        return f"{term_to_str(self.lhs)} <= {term_to_str(self.rhs)}"


def _vars(t: Term) -> Iterator[str]:
    if isinstance(t, TermVar):
        yield t.name
    elif isinstance(t, TermSeq):
        for x in t.items:
            yield from _vars(x)
    elif isinstance(t, (OmegaPow, InfPow)):
        yield from _vars(t.body)
    elif isinstance(t, TreeTerm):
        yield from _vars(t.head)
        for c in t.children:
            yield from _vars(c)


# -- grammar -------------------------------------------------------------------
#
#   term   := factor+                 (juxtaposition = composition)
#   factor := ident | '(' term ')' | factor '^w'
#   ineq   := term '<=' term
#   identity sugar: term '=' term expands to the two inequalities


def _tokenize(text: str) -> list[str]:
    toks, i = [], 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif text.startswith("<=", i):
            toks.append("<=")
            i += 2
        elif text.startswith("^w", i):
            toks.append("^w")
            i += 2
        elif c in "()=":
            toks.append(c)
            i += 1
        elif c.isalpha():
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(text[i:j])
            i = j
        else:
            raise ValueError(f"bad character {c!r} in term at position {i}")
    return toks


def _parse_seq(toks: list[str]) -> Term:
    factors = []
    while toks and toks[0] not in (")", "<=", "="):
        factors.append(_parse_factor(toks))
    if not factors:
        raise ValueError("empty term")
    return factors[0] if len(factors) == 1 else TermSeq(tuple(factors))


def _parse_factor(toks: list[str]) -> Term:
    t = toks.pop(0)
    if t == "(":
        inner = _parse_seq(toks)
        if not toks or toks.pop(0) != ")":
            raise ValueError("unbalanced parenthesis")
        node = inner
    elif t in (")", "<=", "=", "^w"):
        raise ValueError(f"unexpected token {t!r}")
    else:
        node = TermVar(t)
    while toks and toks[0] == "^w":
        toks.pop(0)
        node = OmegaPow(node)
    return node


def parse_term(text: str) -> Term:
    toks = _tokenize(text)
    t = _parse_seq(toks)
    if toks:
        raise ValueError(f"trailing input {toks!r}")
    return t


def parse_inequalities(text: str) -> list[Inequality]:
    """Parse 's <= t' into one inequality or 's = t' into the two halves."""
    toks = _tokenize(text)
    lhs = _parse_seq(toks)
    if not toks or toks[0] not in ("<=", "="):
        raise ValueError("expected '<=' or '='")
    op = toks.pop(0)
    rhs = _parse_seq(toks)
    if toks:
        raise ValueError(f"trailing input {toks!r}")
    if op == "<=":
        return [Inequality(lhs, rhs)]
    return [Inequality(lhs, rhs), Inequality(rhs, lhs)]


def term_to_str(t: Term) -> str:
    if isinstance(t, TermVar):
        return t.name
    if isinstance(t, TermSeq):
        return " ".join(
            f"({term_to_str(x)})" if isinstance(x, TermSeq) else term_to_str(x)
            for x in t.items
        )
    if isinstance(t, OmegaPow):
        body = term_to_str(t.body)
        if isinstance(t.body, (TermSeq, OmegaPow, InfPow)):
            body = f"({body})"
        return f"{body}^w"
    if isinstance(t, InfPow):
        body = term_to_str(t.body)
        if isinstance(t.body, (TermSeq, OmegaPow, InfPow)):
            body = f"({body})"
        return f"{body}^W"
    if isinstance(t, TreeTerm):
        inner = ",".join(term_to_str(c) for c in t.children)
        return f"{term_to_str(t.head)}({inner})"
    raise TypeError(f"not a term: {t!r}")


# -- evaluation -----------------------------------------------------------------


def _self_compose(alg: FinAlgebra):
    if alg.kind == "word":
        return lambda a, b: alg.mult[(a, b)]
    if alg.kind == "omega":
        return lambda a, b: alg.dot[(a, b)]
    return lambda a, b: alg.comp_value(a, (b,))


def _composable_sort(alg: FinAlgebra) -> int:
    if alg.kind == "word":
        return SORT_WORD
    return SORT_FIN  # sort 1 both for omega (dot) and tree (unary composition)


def idempotent_power(alg: FinAlgebra, v: Elem) -> Elem:
    """The unique idempotent among the powers of v.

    Found by walking v, v^2, v^3, ... until the cycle closes and picking the
    idempotent inside it; this matches the factorial-power limit and needs at
    most carrier-size many steps.
    """
    A = alg.carrier
    if A.sort_of(v) != _composable_sort(alg):
        raise SortMismatch(f"{v!r} does not live at a self-composable sort")
    op = _self_compose(alg)
    powers = [v]
    seen = {v}
    cur = v
    while True:
        cur = op(cur, v)
        if cur in seen:
            break
        seen.add(cur)
        powers.append(cur)
    for p in powers:
        if op(p, p) == p:
            return p
    raise AssertionError("finite cyclic subsemigroup without idempotent")


def default_var_sort(alg: FinAlgebra) -> int:
    return _composable_sort(alg)


def eval_term(alg: FinAlgebra, beta: dict, t: Term) -> Elem:
    """Value of an omega-term under a variable assignment."""
    A = alg.carrier
    if isinstance(t, TermVar):
        return beta[t.name]
    if isinstance(t, TermSeq):
        vals = [eval_term(alg, beta, x) for x in t.items]
        acc = vals[0]
        for v in vals[1:]:
            if alg.kind == "word":
                acc = alg.mult[(acc, v)]
            elif alg.kind == "omega":
                if A.sort_of(acc) == SORT_INF:
                    raise SortMismatch("an infinite value may only end a sequence")
                acc = (
                    alg.mix[(acc, v)]
                    if A.sort_of(v) == SORT_INF
                    else alg.dot[(acc, v)]
                )
            else:
                acc = alg.comp_value(acc, (v,))
        return acc
    if isinstance(t, OmegaPow):
        return idempotent_power(alg, eval_term(alg, beta, t.body))
    if isinstance(t, InfPow):
        if alg.kind != "omega":
            raise SortMismatch("the infinite power needs a two-sorted algebra")
        return alg.omega[idempotent_power(alg, eval_term(alg, beta, t.body))]
    if isinstance(t, TreeTerm):
        head = eval_term(alg, beta, t.head)
        slots = tuple(eval_term(alg, beta, c) for c in t.children)
        return alg.comp_value(head, slots)
    raise TypeError(f"not a term: {t!r}")


# -- satisfaction ------------------------------------------------------------------


def satisfies(
    alg: FinAlgebra, ineq: Inequality, *, max_vars: int = 4
) -> tuple[bool, Optional[dict]]:
    """Whether every assignment makes lhs <= rhs; on failure also returns the
    first counterexample assignment in enumeration order."""
    names = ineq.variables()
    if len(names) > max_vars:
        raise ValueError(
            f"{len(names)} variables exceed the assignment bound {max_vars}"
        )
    pool = alg.carrier.elements(default_var_sort(alg))
    if not pool:
        return True, None
    for combo in itertools.product(pool, repeat=len(names)):
        beta = dict(zip(names, combo))
        lv = eval_term(alg, beta, ineq.lhs)
        rv = eval_term(alg, beta, ineq.rhs)
        if alg.carrier.sort_of(lv) != alg.carrier.sort_of(rv):
            raise SortMismatch("inequality sides have different sorts")
        if not alg.carrier.leq(lv, rv):
            return False, beta
    return True, None


def satisfies_all(
    alg: FinAlgebra, ineqs, *, max_vars: int = 4
) -> tuple[bool, Optional[tuple[Inequality, dict]]]:
    for ineq in ineqs:
        ok, beta = satisfies(alg, ineq, max_vars=max_vars)
        if not ok:
            return False, (ineq, beta)
    return True, None


def mod_filter(algs: list[FinAlgebra], phi) -> list[FinAlgebra]:
    """The algebras in the list satisfying every inequality of phi."""
    return [a for a in algs if satisfies_all(a, phi)[0]]


def identity_library() -> dict[str, list[Inequality]]:
    """Named inequality sets for the classical properties."""
    lib = {
        "APERIODIC": ["x^w x <= x^w", "x^w <= x^w x"],
        "COMMUTATIVE": ["x y <= y x", "y x <= x y"],
        "IDEMPOTENT": ["x x <= x", "x <= x x"],
    }
    return {
        name: [iq for line in lines for iq in parse_inequalities(line)]
        for name, lines in lib.items()
    }
