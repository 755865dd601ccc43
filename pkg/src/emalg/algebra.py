"""Finitary algebras for the three container instances.

An algebra is a sorted ordered carrier together with the shallow product data
appropriate for its instance:

* word: a binary multiplication table (an ordered semigroup);
* omega: dot (1,1)->1, mix (1,inf)->inf and omega 1->inf (Wilke-style data,
  which determines evaluation of every ultimately periodic word);
* tree: shallow composition tables comp(a; b1..bn) giving the value of the
  depth-two tree a(b1(...),...,bn(...)); deep trees evaluate by recursion.
  A slot may also be the marker ``VAR`` (stored as None) for a bare variable
  child passed through in order.  Entries with VAR slots are optional data;
  evaluation raises ``MissingTableEntry`` when one is needed but absent.

Tables are validated for totality, sort-correctness and monotonicity at
construction.  Associativity is *not* assumed at construction; it is checked
by ``check_algebra_laws`` so that defective tables can be reported rather
than silently trusted.  The Wilke coherence axioms are enforced by the
``wilke_algebra`` factory (they are exactly what makes ultimately periodic
evaluation representation independent).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .core import (
    Elem,
    Preorder,
    Sort,
    SortedFunction,
    SortedOrderedSet,
    is_upward_closed,
    quotient_set,
)
from .monads import (
    SORT_FIN,
    SORT_INF,
    SORT_WORD,
    MixedWord,
    Monad,
    Node,
    OmegaMonad,
    SortMismatch,
    Tree,
    TreeMonad,
    UPWord,
    Var,
    Word,
    WordMonad,
)

#: Marker for a bare-variable slot in tree composition tables.
VAR = None


class NotCongruence(Exception):
    """The preorder is not compatible with the shallow products."""

    def __init__(self, witness, message: str = ""):
        self.witness = witness
        super().__init__(message or f"congruence violated at {witness!r}")


class MissingTableEntry(KeyError):
    """A tree evaluation needed an optional slot entry that is absent."""


def _slot_sort(carrier: SortedOrderedSet, slot) -> Sort:
    return 1 if slot is VAR else carrier.sort_of(slot)


class FinAlgebra:
    """A finitary algebra over one of the three instances."""

    def __init__(
        self,
        monad: Monad,
        carrier: SortedOrderedSet,
        *,
        mult: Optional[dict] = None,
        dot: Optional[dict] = None,
        mix: Optional[dict] = None,
        omega: Optional[dict] = None,
        comp: Optional[dict] = None,
    ):
        self.monad = monad
        self.carrier = carrier
        self.kind = monad.kind
        self.mult = dict(mult) if mult else {}
        self.dot = dict(dot) if dot else {}
        self.mix = dict(mix) if mix else {}
        self.omega = dict(omega) if omega else {}
        self.comp = {}
        if comp:
            for (a, slots), r in comp.items():
                self.comp[(a, tuple(slots))] = r
        self._validate()

    # -- validation ----------------------------------------------------------

    def _validate(self):
        A = self.carrier
        if self.kind == "word":
            es = A.elements(SORT_WORD)
            for a, b in itertools.product(es, es):
                if (a, b) not in self.mult:
                    raise ValueError(f"multiplication not total at ({a!r},{b!r})")
            for (a, b), c in self.mult.items():
                if c not in A or A.sort_of(c) != SORT_WORD:
                    raise ValueError(f"bad product value {c!r}")
            self._check_monotone_binary(self.mult, es, es)
        elif self.kind == "omega":
            fin, inf = A.elements(SORT_FIN), A.elements(SORT_INF)
            for a, b in itertools.product(fin, fin):
                if (a, b) not in self.dot:
                    raise ValueError(f"dot not total at ({a!r},{b!r})")
            for a, e in itertools.product(fin, inf):
                if (a, e) not in self.mix:
                    raise ValueError(f"mix not total at ({a!r},{e!r})")
            # an empty infinite sort arises from sort restriction; the object
            # is then a bare ordered semigroup and omega has nowhere to land
            if inf:
                for a in fin:
                    if a not in self.omega:
                        raise ValueError(f"omega not total at {a!r}")
            for (a, b), c in self.dot.items():
                if A.sort_of(c) != SORT_FIN:
                    raise ValueError(f"dot lands at wrong sort: {c!r}")
            for (a, e), c in self.mix.items():
                if A.sort_of(c) != SORT_INF:
                    raise ValueError(f"mix lands at wrong sort: {c!r}")
            for a, c in self.omega.items():
                if A.sort_of(c) != SORT_INF:
                    raise ValueError(f"omega lands at wrong sort: {c!r}")
            self._check_monotone_binary(self.dot, fin, fin)
            self._check_monotone_binary(self.mix, fin, inf)
            if inf:
                for a, b in itertools.product(fin, fin):
                    if A.leq(a, b) and not A.leq(self.omega[a], self.omega[b]):
                        raise ValueError(f"omega not monotone at ({a!r},{b!r})")
        elif self.kind == "tree":
            self._validate_tree_tables()
        else:
            raise ValueError(f"unknown algebra kind {self.kind!r}")

    def _check_monotone_binary(self, table, left, right):
        A = self.carrier
        for a, a2 in itertools.product(left, left):
            if not A.leq(a, a2):
                continue
            for b, b2 in itertools.product(right, right):
                if A.leq(b, b2) and not A.leq(table[(a, b)], table[(a2, b2)]):
                    raise ValueError(
                        f"product not monotone at ({a!r},{b!r}) vs ({a2!r},{b2!r})"
                    )

    def _iter_required_tree_keys(self):
        A = self.carrier
        max_arity = self.monad.max_arity
        for n in A.sorts:
            for a in A.elements(n):
                pools = [
                    [e for s in A.sorts for e in A.elements(s)] for _ in range(n)
                ]
                for slots in itertools.product(*pools):
                    if sum(A.sort_of(e) for e in slots) <= max_arity:
                        yield a, slots

    def _validate_tree_tables(self):
        A = self.carrier
        if not isinstance(self.monad, TreeMonad):
            raise ValueError("tree tables need a tree monad")
        max_arity = self.monad.max_arity
        for a, slots in self._iter_required_tree_keys():
            if len(slots) > 0 and (a, slots) not in self.comp:
                raise ValueError(f"comp not total at ({a!r},{slots!r})")
        for (a, slots), r in self.comp.items():
            if a not in A or A.sort_of(a) != len(slots):
                raise ValueError(f"comp head {a!r} has wrong arity for {slots!r}")
            rsort = sum(_slot_sort(A, s) for s in slots)
            if rsort > max_arity:
                raise ValueError(f"comp entry ({a!r},{slots!r}) exceeds the arity cap")
            if r not in A or A.sort_of(r) != rsort:
                raise ValueError(f"comp value {r!r} has sort != {rsort}")
        # monotonicity across comparable keys
        for (a, slots), r in self.comp.items():
            for (a2, slots2), r2 in self.comp.items():
                if len(slots) != len(slots2):
                    continue
                if not A.leq(a, a2):
                    continue
                ok = True
                for s, s2 in zip(slots, slots2):
                    if (s is VAR) != (s2 is VAR):
                        ok = False
                        break
                    if s is not VAR and not A.leq(s, s2):
                        ok = False
                        break
                if ok and not A.leq(r, r2):
                    raise ValueError(
                        f"comp not monotone: ({a!r},{slots!r}) vs ({a2!r},{slots2!r})"
                    )

    # -- shallow application ---------------------------------------------------

    def mul(self, a, b):
        return self.mult[(a, b)]

    def comp_value(self, a, slots: tuple):
        """Value of the shallow tree a(slot_1,...,slot_n); VAR slots pass a
        variable through.  The all-variable pattern is the unit law."""
        slots = tuple(slots)
        if all(s is VAR for s in slots):
            return a
        try:
            return self.comp[(a, slots)]
        except KeyError:
            raise MissingTableEntry(
                f"no composition entry for head {a!r} with slots {slots!r}"
            ) from None

    def elements(self, sort: Sort):
        return self.carrier.elements(sort)

    def __repr__(self):
        return f"FinAlgebra({self.kind}, {len(self.carrier)} elements)"


# -- factories ----------------------------------------------------------------


def word_algebra(carrier: SortedOrderedSet, mult: dict) -> FinAlgebra:
    return FinAlgebra(WordMonad(), carrier, mult=mult)


def wilke_algebra(
    carrier: SortedOrderedSet,
    dot: dict,
    mix: dict,
    omega: dict,
    *,
    check_coherence: bool = True,
) -> FinAlgebra:
    """A two-sorted algebra from Wilke data.

    Coherence axioms checked (and violations rejected) by default:
    associativity of dot, mix as an action, omega(s^k) = omega(s), and
    mix(s, omega(dot(t,s))) = omega(dot(s,t)).
    """
    alg = FinAlgebra(OmegaMonad(), carrier, dot=dot, mix=mix, omega=omega)
    if check_coherence:
        bad = wilke_coherence_violations(alg)
        if bad:
            raise ValueError(f"Wilke coherence violated: {bad[0]}")
    return alg


def wilke_coherence_violations(alg: FinAlgebra) -> list:
    A = alg.carrier
    fin, inf = A.elements(SORT_FIN), A.elements(SORT_INF)
    out = []
    for a, b, c in itertools.product(fin, fin, fin):
        if alg.dot[(alg.dot[(a, b)], c)] != alg.dot[(a, alg.dot[(b, c)])]:
            out.append(("dot-assoc", (a, b, c)))
    for a, b in itertools.product(fin, fin):
        for e in inf:
            if alg.mix[(alg.dot[(a, b)], e)] != alg.mix[(a, alg.mix[(b, e)])]:
                out.append(("mix-action", (a, b, e)))
    for s, t in itertools.product(fin, fin):
        if alg.mix[(s, alg.omega[alg.dot[(t, s)]])] != alg.omega[alg.dot[(s, t)]]:
            out.append(("omega-shift", (s, t)))
    for s in fin:
        p = s
        for _ in range(2 * max(1, len(fin)) + 1):
            p = alg.dot[(p, s)]
            if alg.omega[p] != alg.omega[s]:
                out.append(("omega-power", (s, p)))
                break
    return out


def tree_algebra(monad: TreeMonad, carrier: SortedOrderedSet, comp: dict) -> FinAlgebra:
    return FinAlgebra(monad, carrier, comp=comp)


def one_element_algebra(monad: Monad) -> FinAlgebra:
    """The terminal algebra: exactly one element per sort."""
    units = {s: [("unit", s)] for s in monad.sorts}
    A = SortedOrderedSet(units)
    u = {s: ("unit", s) for s in monad.sorts}
    if monad.kind == "word":
        return FinAlgebra(monad, A, mult={(u[0], u[0]): u[0]})
    if monad.kind == "omega":
        return FinAlgebra(
            monad,
            A,
            dot={(u[SORT_FIN], u[SORT_FIN]): u[SORT_FIN]},
            mix={(u[SORT_FIN], u[SORT_INF]): u[SORT_INF]},
            omega={u[SORT_FIN]: u[SORT_INF]},
        )
    comp = {}
    for n in monad.sorts:
        a = u[n]
        pools = [[u[s] for s in monad.sorts] for _ in range(n)]
        for slots in itertools.product(*pools):
            rsort = sum(s[1] for s in slots)
            if rsort <= monad.max_arity:
                comp[(a, slots)] = u[rsort]
    return FinAlgebra(monad, A, comp=comp)


# -- evaluation ----------------------------------------------------------------


def _check_tree_evaluable(t: Tree):
    """Evaluation needs the variables x0..x{sort-1} to occur exactly once
    each, in increasing order across the leaves.  Shallow tables do not
    determine the value of permuted or partial variable patterns (those are
    independent data in the full container), so such trees are rejected."""
    seq = []

    def walk(n):
        if isinstance(n, Var):
            seq.append(n.index)
        else:
            for c in n.children:
                walk(c)

    walk(t.root)
    if seq != list(range(t.sort)):
        raise SortMismatch(
            f"tree variables {seq} are not x0..x{t.sort - 1} in order; "
            "the value of such a tree is not determined by shallow tables"
        )


def eval_element(alg: FinAlgebra, beta, t) -> Elem:
    """The unique extension of the label assignment ``beta`` applied to ``t``.

    ``beta`` maps labels of ``t`` to carrier elements (dict or callable).
    """
    get = beta.__getitem__ if isinstance(beta, dict) else beta
    A = alg.carrier

    if alg.kind == "word":
        if not isinstance(t, Word):
            raise SortMismatch(f"expected a word, got {t!r}")
        vals = [get(a) for a in t.labels]
        acc = vals[0]
        for v in vals[1:]:
            acc = alg.mult[(acc, v)]
        return acc

    if alg.kind == "omega":
        def dot_fold(labels):
            vals = [get(a) for a in labels]
            for v in vals:
                if A.sort_of(v) != SORT_FIN:
                    raise SortMismatch(f"finite position holds sort-inf value {v!r}")
            acc = vals[0]
            for v in vals[1:]:
                acc = alg.dot[(acc, v)]
            return acc

        if isinstance(t, Word):
            return dot_fold(t.labels)
        if isinstance(t, UPWord):
            tail = alg.omega[dot_fold(t.period)]
            return alg.mix[(dot_fold(t.prefix), tail)] if t.prefix else tail
        if isinstance(t, MixedWord):
            tail = get(t.tail)
            if A.sort_of(tail) != SORT_INF:
                raise SortMismatch(f"tail {t.tail!r} maps to a finite value")
            return alg.mix[(dot_fold(t.prefix), tail)] if t.prefix else tail
        raise SortMismatch(f"not an omega-word element: {t!r}")

    # tree
    if not isinstance(t, Tree):
        raise SortMismatch(f"expected a tree, got {t!r}")
    _check_tree_evaluable(t)

    def ev(n):
        if isinstance(n, Var):
            return VAR
        v = get(n.label)
        if A.sort_of(v) != len(n.children):
            raise SortMismatch(
                f"label {n.label!r} maps to sort {A.sort_of(v)} but has "
                f"{len(n.children)} children"
            )
        return alg.comp_value(v, tuple(ev(c) for c in n.children))

    return ev(t.root)


def eval_upword(alg: FinAlgebra, u: Iterable, v: Iterable, beta) -> Elem:
    """Value of u.v^w in a Wilke-style algebra (u may be empty).

    Evaluates the raw pair as given; coherent algebras give the same value
    for every representation of the same omega-word.
    """
    u, v = tuple(u), tuple(v)
    if not v:
        raise ValueError("period must be nonempty")
    return eval_element(alg, beta, _raw_up(u, v))


def _raw_up(u: tuple, v: tuple):
    """An unnormalised u.v^w wrapper: evaluation must not depend on the
    representation, so tests feed raw pairs through here."""
    w = UPWord.__new__(UPWord)
    object.__setattr__(w, "prefix", tuple(u))
    object.__setattr__(w, "period", tuple(v))
    return w


# -- morphisms ------------------------------------------------------------------


@dataclass
class Morphism:
    source: FinAlgebra
    target: FinAlgebra
    fn: SortedFunction

    def __call__(self, x):
        return self.fn(x)

    def is_surjective(self) -> bool:
        return self.fn.is_surjective()


def is_morphism(phi, A: FinAlgebra, B: FinAlgebra) -> bool:
    """Whether phi (a mapping or SortedFunction) is monotone and commutes
    with every shallow product entry."""
    if isinstance(phi, Morphism):
        phi = phi.fn
    if isinstance(phi, SortedFunction):
        f = phi.mapping
    else:
        f = dict(phi)
    for x in A.carrier:
        if x not in f or f[x] not in B.carrier:
            return False
        if B.carrier.sort_of(f[x]) != A.carrier.sort_of(x):
            return False
    for a, b in A.carrier.leq_pairs():
        if not B.carrier.leq(f[a], f[b]):
            return False
    if A.kind != B.kind:
        return False
    if A.kind == "word":
        return all(f[c] == B.mult[(f[a], f[b])] for (a, b), c in A.mult.items())
    if A.kind == "omega":
        return (
            all(f[c] == B.dot[(f[a], f[b])] for (a, b), c in A.dot.items())
            and all(f[c] == B.mix[(f[a], f[e])] for (a, e), c in A.mix.items())
            and all(f[c] == B.omega[f[a]] for a, c in A.omega.items())
        )
    for (a, slots), r in A.comp.items():
        key = (f[a], tuple(VAR if s is VAR else f[s] for s in slots))
        if all(s is VAR for s in key[1]):
            target = f[a]
        elif key in B.comp:
            target = B.comp[key]
        else:
            continue  # optional slot entry absent in the target; cannot refute
        if f[r] != target:
            return False
    return True


def morphism(A: FinAlgebra, B: FinAlgebra, mapping: dict) -> Morphism:
    fn = SortedFunction(A.carrier, B.carrier, mapping)
    if not is_morphism(fn, A, B):
        raise ValueError("mapping does not commute with the products")
    return Morphism(A, B, fn)


# -- products and subalgebras ----------------------------------------------------


def product(algs: list[FinAlgebra], monad: Optional[Monad] = None) -> FinAlgebra:
    """Componentwise product; the empty product is the one-element algebra."""
    if not algs:
        if monad is None:
            raise ValueError("empty product needs an explicit monad")
        return one_element_algebra(monad)
    monad = algs[0].monad
    kind = algs[0].kind
    if any(a.kind != kind for a in algs):
        raise ValueError("product components must share the instance")
    sorts = sorted(set(s for a in algs for s in a.carrier.sorts))
    elems = {
        s: [tuple(c) for c in itertools.product(*(a.elements(s) for a in algs))]
        for s in sorts
    }
    pairs = []
    for s in sorts:
        for x in elems[s]:
            for y in elems[s]:
                if all(a.carrier.leq(xi, yi) for a, xi, yi in zip(algs, x, y)):
                    pairs.append((x, y))
    size = max((len(es) for es in elems.values()), default=1)
    carrier = SortedOrderedSet(elems, pairs, max_size=max(64, size))
    if kind == "word":
        mult = {
            (x, y): tuple(a.mult[(xi, yi)] for a, xi, yi in zip(algs, x, y))
            for x in elems[SORT_WORD]
            for y in elems[SORT_WORD]
        }
        return FinAlgebra(monad, carrier, mult=mult)
    if kind == "omega":
        fin, inf = elems.get(SORT_FIN, []), elems.get(SORT_INF, [])
        dot = {
            (x, y): tuple(a.dot[(xi, yi)] for a, xi, yi in zip(algs, x, y))
            for x in fin
            for y in fin
        }
        mix = {
            (x, e): tuple(a.mix[(xi, ei)] for a, xi, ei in zip(algs, x, e))
            for x in fin
            for e in inf
        }
        omg = {x: tuple(a.omega[xi] for a, xi in zip(algs, x)) for x in fin}
        return FinAlgebra(monad, carrier, dot=dot, mix=mix, omega=omg)
    comp = {}
    for a_tuple in (e for s in sorts for e in elems[s]):
        n = carrier.sort_of(a_tuple)
        if n == 0:
            continue
        common = None
        for i, a in enumerate(algs):
            shapes = set(
                tuple((VAR if s is VAR else a.carrier.sort_of(s)) for s in k)
                for (h, k) in a.comp
                if h == a_tuple[i] and len(k) == n
            )
            common = shapes if common is None else (common & shapes)
        for shape in sorted(common or set(), key=repr):
            slot_pools = []
            for pos, ssort in enumerate(shape):
                if ssort is VAR:
                    slot_pools.append([VAR])
                else:
                    slot_pools.append(
                        [
                            tuple(c)
                            for c in itertools.product(
                                *(a.elements(ssort) for a in algs)
                            )
                        ]
                    )
            for slots in itertools.product(*slot_pools):
                key_ok = True
                vals = []
                for i, a in enumerate(algs):
                    k = tuple(VAR if s is VAR else s[i] for s in slots)
                    if (a_tuple[i], k) in a.comp:
                        vals.append(a.comp[(a_tuple[i], k)])
                    elif all(s is VAR for s in k):
                        vals.append(a_tuple[i])
                    else:
                        key_ok = False
                        break
                if key_ok:
                    comp[(a_tuple, slots)] = tuple(vals)
    return FinAlgebra(monad, carrier, comp=comp)


def projections(prod: FinAlgebra, algs: list[FinAlgebra]) -> list[Morphism]:
    out = []
    for i, a in enumerate(algs):
        fn = SortedFunction(
            prod.carrier, a.carrier, {x: x[i] for x in prod.carrier}
        )
        out.append(Morphism(prod, a, fn))
    return out


@dataclass
class GeneratedSubalgebra:
    algebra: FinAlgebra
    inclusion: Morphism
    witnesses: dict  # element -> free element over the generator labels


def _closure(alg: FinAlgebra, start: dict) -> dict:
    """Close a set of (element -> witness free element) under all shallow
    products, recording a witness for every new element."""
    wit = dict(start)
    if alg.kind == "tree":
        changed = True
        while changed:
            changed = False
            for (a, slots), r in alg.comp.items():
                if r in wit or a not in wit:
                    continue
                if any(s is not VAR and s not in wit for s in slots):
                    continue
                sub: dict = {}
                off = 0
                for i, s in enumerate(slots):
                    if s is VAR:
                        sub[i] = Var(off)
                        off += 1
                    else:
                        w = wit[s]
                        sub[i] = _shift_tree_vars(w.root, off)
                        off += w.sort
                wit[r] = Tree(_substitute_tree(wit[a].root, sub), off)
                changed = True
        return wit
    frontier = list(start)
    while frontier:
        new_frontier: list = []
        current = list(wit)

        def found(c, witness):
            if c not in wit:
                wit[c] = witness
                new_frontier.append(c)

        if alg.kind == "word":
            for a in frontier:
                for b in current:
                    found(alg.mult[(a, b)], Word(wit[a].labels + wit[b].labels))
                    found(alg.mult[(b, a)], Word(wit[b].labels + wit[a].labels))
        else:
            A = alg.carrier
            fins = [e for e in current if A.sort_of(e) == SORT_FIN]
            infs = [e for e in current if A.sort_of(e) == SORT_INF]
            for a in frontier:
                if A.sort_of(a) == SORT_FIN:
                    for b in fins:
                        found(alg.dot[(a, b)], Word(wit[a].labels + wit[b].labels))
                        found(alg.dot[(b, a)], Word(wit[b].labels + wit[a].labels))
                    found(alg.omega[a], UPWord((), wit[a].labels))
                    for e in infs:
                        found(alg.mix[(a, e)], _prepend(wit[a].labels, wit[e]))
                else:
                    for x in fins:
                        found(alg.mix[(x, a)], _prepend(wit[x].labels, wit[a]))
        frontier = new_frontier
    return wit


def _prepend(labels: tuple, tail):
    if isinstance(tail, UPWord):
        return UPWord(labels + tail.prefix, tail.period)
    return MixedWord(labels + tail.prefix, tail.tail)


def _shift_tree_vars(node, off: int):
    if isinstance(node, Var):
        return Var(node.index + off)
    return Node(node.label, tuple(_shift_tree_vars(c, off) for c in node.children))


def _substitute_tree(node, sub: dict):
    if isinstance(node, Var):
        return sub[node.index]
    return Node(node.label, tuple(_substitute_tree(c, sub) for c in node.children))


def subalgebra_generated(alg: FinAlgebra, gens: Iterable[Elem]) -> GeneratedSubalgebra:
    """Least product-closed subset containing ``gens``, with the inherited
    order and restricted tables; witnesses are free elements over the
    generators themselves (used to reconstruct contexts over an alphabet)."""
    monad = alg.monad
    start = {}
    for g in gens:
        if g not in alg.carrier:
            raise ValueError(f"generator {g!r} not in carrier")
        sort = alg.carrier.sort_of(g)
        if g not in start:
            start[g] = monad.sing(g, sort)
    wit = _closure(alg, start)
    keep = set(wit)
    elems = {
        s: [e for e in alg.elements(s) if e in keep] for s in alg.carrier.sorts
    }
    pairs = [(a, b) for a, b in alg.carrier.leq_pairs() if a in keep and b in keep]
    carrier = SortedOrderedSet(elems, pairs)
    sub = _restrict_tables(alg, carrier)
    incl = Morphism(
        sub, alg, SortedFunction(carrier, alg.carrier, {e: e for e in carrier})
    )
    return GeneratedSubalgebra(sub, incl, wit)


def _restrict_tables(alg: FinAlgebra, carrier: SortedOrderedSet) -> FinAlgebra:
    keep = set(carrier)
    if alg.kind == "word":
        mult = {k: v for k, v in alg.mult.items() if set(k) <= keep and v in keep}
        return FinAlgebra(alg.monad, carrier, mult=mult)
    if alg.kind == "omega":
        dot = {k: v for k, v in alg.dot.items() if set(k) <= keep and v in keep}
        mix = {k: v for k, v in alg.mix.items() if set(k) <= keep and v in keep}
        om = {k: v for k, v in alg.omega.items() if k in keep and v in keep}
        return FinAlgebra(alg.monad, carrier, dot=dot, mix=mix, omega=om)
    comp = {
        (a, slots): r
        for (a, slots), r in alg.comp.items()
        if a in keep and r in keep and all(s is VAR or s in keep for s in slots)
    }
    return FinAlgebra(alg.monad, carrier, comp=comp)


def generated_tuples(algs: list[FinAlgebra], seeds: Iterable[tuple]) -> set:
    """Carrier of the subalgebra of the product generated by the seed tuples,
    computed by componentwise closure without materialising the product."""
    kind = algs[0].kind
    tuples = set()
    for t in seeds:
        if len(t) != len(algs):
            raise ValueError("seed arity does not match the component count")
        tuples.add(tuple(t))
    changed = True
    while changed:
        changed = False
        current = list(tuples)
        if kind == "word":
            for x in current:
                for y in current:
                    p = tuple(a.mult[(xi, yi)] for a, xi, yi in zip(algs, x, y))
                    if p not in tuples:
                        tuples.add(p)
                        changed = True
        elif kind == "omega":
            A0 = algs[0].carrier
            fins = [x for x in current if A0.sort_of(x[0]) == SORT_FIN]
            infs = [x for x in current if A0.sort_of(x[0]) == SORT_INF]
            for x in fins:
                for y in fins:
                    p = tuple(a.dot[(xi, yi)] for a, xi, yi in zip(algs, x, y))
                    if p not in tuples:
                        tuples.add(p)
                        changed = True
                p = tuple(a.omega[xi] for a, xi in zip(algs, x))
                if p not in tuples:
                    tuples.add(p)
                    changed = True
                for e in infs:
                    p = tuple(a.mix[(xi, ei)] for a, xi, ei in zip(algs, x, e))
                    if p not in tuples:
                        tuples.add(p)
                        changed = True
        else:
            A0 = algs[0].carrier
            by_sort: dict[Sort, list] = {}
            for x in current:
                by_sort.setdefault(A0.sort_of(x[0]), []).append(x)
            for (h, slots), r in algs[0].comp.items():
                if any(s is VAR for s in slots):
                    continue
                heads = [x for x in current if x[0] == h]
                pools = [
                    [x for x in by_sort.get(A0.sort_of(s), []) if x[0] == s]
                    for s in slots
                ]
                if not heads or any(not p for p in pools):
                    continue
                for hx in heads:
                    for combo in itertools.product(*pools):
                        vals = [r]
                        ok = True
                        for i, a in enumerate(algs[1:], start=1):
                            key = (hx[i], tuple(c[i] for c in combo))
                            if key not in a.comp:
                                ok = False
                                break
                            vals.append(a.comp[key])
                        if ok:
                            p = tuple(vals)
                            if p not in tuples:
                                tuples.add(p)
                                changed = True
    return tuples


def tuple_algebra(algs: list[FinAlgebra], tuples: Iterable[tuple]) -> FinAlgebra:
    """The subalgebra of the product of ``algs`` on an already product-closed
    set of tuples, with componentwise order and tables."""
    kind = algs[0].kind
    ts = list(dict.fromkeys(tuple(t) for t in tuples))
    A0 = algs[0].carrier
    elems: dict[Sort, list] = {}
    for t in ts:
        elems.setdefault(A0.sort_of(t[0]), []).append(t)
    pairs = []
    for s, es in elems.items():
        for x in es:
            for y in es:
                if all(a.carrier.leq(xi, yi) for a, xi, yi in zip(algs, x, y)):
                    pairs.append((x, y))
    size = max((len(es) for es in elems.values()), default=1)
    sorts = sorted(set(s for a in algs for s in a.carrier.sorts) | set(elems))
    carrier = SortedOrderedSet(
        {s: elems.get(s, []) for s in sorts}, pairs, max_size=max(64, size)
    )
    if kind == "word":
        mult = {
            (x, y): tuple(a.mult[(xi, yi)] for a, xi, yi in zip(algs, x, y))
            for x in ts
            for y in ts
        }
        return FinAlgebra(algs[0].monad, carrier, mult=mult)
    if kind == "omega":
        fins = [x for x in ts if A0.sort_of(x[0]) == SORT_FIN]
        infs = [x for x in ts if A0.sort_of(x[0]) == SORT_INF]
        dot = {
            (x, y): tuple(a.dot[(xi, yi)] for a, xi, yi in zip(algs, x, y))
            for x in fins
            for y in fins
        }
        mix = {
            (x, e): tuple(a.mix[(xi, ei)] for a, xi, ei in zip(algs, x, e))
            for x in fins
            for e in infs
        }
        om = {x: tuple(a.omega[xi] for a, xi in zip(algs, x)) for x in fins}
        return FinAlgebra(algs[0].monad, carrier, dot=dot, mix=mix, omega=om)
    comp = {}
    tset = set(ts)
    for hx in ts:
        n = A0.sort_of(hx[0])
        if n == 0:
            continue
        for combo in itertools.product(ts, repeat=n):
            key0 = (hx[0], tuple(c[0] for c in combo))
            if key0 not in algs[0].comp:
                continue
            vals = [algs[0].comp[key0]]
            ok = True
            for i, a in enumerate(algs[1:], start=1):
                key = (hx[i], tuple(c[i] for c in combo))
                if key not in a.comp:
                    ok = False
                    break
                vals.append(a.comp[key])
            if ok and tuple(vals) in tset:
                comp[(hx, combo)] = tuple(vals)
    return FinAlgebra(algs[0].monad, carrier, comp=comp)


def restrict_sorts(alg: FinAlgebra, delta: Iterable[Sort]) -> FinAlgebra:
    """Keep only the elements whose sort lies in ``delta``; products that
    mention a dropped sort disappear with them."""
    ds = set(delta)
    elems = {s: (alg.elements(s) if s in ds else ()) for s in alg.carrier.sorts}
    pairs = [
        (a, b)
        for a, b in alg.carrier.leq_pairs()
        if alg.carrier.sort_of(a) in ds
    ]
    carrier = SortedOrderedSet(elems, pairs)
    return _restrict_tables(alg, carrier)


# -- congruence orderings ---------------------------------------------------------


def is_congruence_ordering(alg: FinAlgebra, q: Preorder) -> bool:
    """Shallow compatibility of an order-extending preorder with every
    product entry.  By associativity a deep violation decomposes into a
    chain of one-step replacements, so the shallow check is complete; that
    reduction is exercised by tests rather than taken on faith."""
    if not q.is_order_extending():
        return False
    holds = q.holds
    if alg.kind == "word":
        rel = [(a, b) for (a, b) in q.pairs()]
        for a, a2 in rel:
            for b, b2 in rel:
                if not holds(alg.mult[(a, b)], alg.mult[(a2, b2)]):
                    return False
        return True
    if alg.kind == "omega":
        A = alg.carrier
        relf = [(a, b) for (a, b) in q.pairs() if A.sort_of(a) == SORT_FIN]
        reli = [(a, b) for (a, b) in q.pairs() if A.sort_of(a) == SORT_INF]
        for a, a2 in relf:
            for b, b2 in relf:
                if not holds(alg.dot[(a, b)], alg.dot[(a2, b2)]):
                    return False
            for e, e2 in reli:
                if not holds(alg.mix[(a, e)], alg.mix[(a2, e2)]):
                    return False
            if not holds(alg.omega[a], alg.omega[a2]):
                return False
        return True
    for (a, slots), r in alg.comp.items():
        for (a2, slots2), r2 in alg.comp.items():
            if len(slots) != len(slots2) or not holds(a, a2):
                continue
            ok = True
            for s, s2 in zip(slots, slots2):
                if (s is VAR) != (s2 is VAR):
                    ok = False
                    break
                if s is not VAR and not holds(s, s2):
                    ok = False
                    break
            if ok and not holds(r, r2):
                return False
    return True


def quotient_algebra(alg: FinAlgebra, q: Preorder) -> tuple[FinAlgebra, Morphism]:
    """Quotient by a congruence ordering; the returned map is a surjective
    morphism whose kernel is exactly ``q``."""
    if not is_congruence_ordering(alg, q):
        raise NotCongruence(None, "preorder fails shallow compatibility")
    Q, qfn = quotient_set(alg.carrier, q)
    cls = qfn.mapping
    if alg.kind == "word":
        mult = {
            (cls[a], cls[b]): cls[alg.mult[(a, b)]] for (a, b) in alg.mult
        }
        quot = FinAlgebra(alg.monad, Q, mult=mult)
    elif alg.kind == "omega":
        dot = {(cls[a], cls[b]): cls[v] for (a, b), v in alg.dot.items()}
        mix = {(cls[a], cls[e]): cls[v] for (a, e), v in alg.mix.items()}
        om = {cls[a]: cls[v] for a, v in alg.omega.items()}
        quot = FinAlgebra(alg.monad, Q, dot=dot, mix=mix, omega=om)
    else:
        comp = {}
        for (a, slots), r in alg.comp.items():
            key = (cls[a], tuple(VAR if s is VAR else cls[s] for s in slots))
            comp[key] = cls[r]
        quot = FinAlgebra(alg.monad, Q, comp=comp)
    qm = Morphism(alg, quot, SortedFunction(alg.carrier, Q, cls))
    return quot, qm


# -- recognizers -------------------------------------------------------------------


@dataclass
class Recognizer:
    """A finite recognition device: an assignment of alphabet letters into an
    algebra plus an upward-closed accepting set in one sort."""

    alphabet: SortedOrderedSet
    algebra: FinAlgebra
    assignment: dict
    accepting: frozenset
    accepting_sort: Sort = field(init=False)

    def __post_init__(self):
        if not self.alphabet.is_trivially_ordered():
            raise ValueError("alphabets are unordered")
        for c in self.alphabet:
            if c not in self.assignment:
                raise ValueError(f"letter {c!r} unassigned")
            v = self.assignment[c]
            if self.alphabet.sort_of(c) != self.algebra.carrier.sort_of(v):
                raise ValueError(f"assignment of {c!r} does not preserve sorts")
        self.accepting = frozenset(self.accepting)
        sorts = {self.algebra.carrier.sort_of(p) for p in self.accepting}
        if len(sorts) > 1:
            raise ValueError("accepting set must sit inside one sort")
        self.accepting_sort = next(iter(sorts)) if sorts else SORT_WORD
        if not is_upward_closed(self.algebra.carrier, self.accepting):
            raise ValueError("accepting set is not upward closed")

    def value(self, t) -> Elem:
        return eval_element(self.algebra, self.assignment, t)

    def accepts(self, t) -> bool:
        return self.value(t) in self.accepting


# -- law checking -------------------------------------------------------------------


@dataclass
class LawReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, witness):
        self.violations.append((law, witness))


def check_algebra_laws(alg: FinAlgebra, *, seed: int = 0, samples: int = 100) -> LawReport:
    """Verify the unit law on every element and the associative law on
    depth-two free elements over the carrier (exhaustively for small widths,
    then on seeded random nestings).  Violations are report entries."""
    report = LawReport()
    rng = random.Random(seed)
    A = alg.carrier
    ident = {e: e for e in A}
    monad = alg.monad

    for e in A:
        s = A.sort_of(e)
        try:
            v = eval_element(alg, ident, monad.sing(e, s))
        except (MissingTableEntry, SortMismatch):
            continue
        if v != e:
            report.add("unit", e)

    def check_pair(outer):
        """outer: free element whose labels are free elements over A."""
        try:
            lhs = eval_element(alg, ident, monad.flat(outer))
            inner_vals = monad.map(lambda w, s: eval_element(alg, ident, w), outer)
            rhs = eval_element(alg, ident, inner_vals)
        except (MissingTableEntry, SortMismatch):
            return
        if lhs != rhs:
            report.add("assoc", outer)

    if alg.kind == "word":
        es = A.elements(SORT_WORD)
        inners = [Word((a,)) for a in es] + [Word((a, b)) for a in es for b in es]
        for w1 in inners:
            for w2 in inners:
                check_pair(Word((w1, w2)))
        for _ in range(samples):
            ws = [
                Word(tuple(rng.choices(es, k=rng.randint(1, 3))))
                for _ in range(rng.randint(1, 3))
            ]
            check_pair(Word(tuple(ws)))
    elif alg.kind == "omega":
        fin, inf = A.elements(SORT_FIN), A.elements(SORT_INF)
        finners = [Word((a,)) for a in fin] + [Word((a, b)) for a in fin for b in fin]
        for w1 in finners:
            for w2 in finners:
                check_pair(Word((w1, w2)))
            # u.(v)^w over inner word labels
            for w2 in finners[: len(fin) * 2]:
                check_pair(UPWord((w1,), (w2,)))
                check_pair(UPWord((), (w1, w2)))
        iinners = [MixedWord((), e) for e in inf] + [
            UPWord((), (a,)) for a in fin
        ]
        for w1 in finners:
            for t in iinners:
                check_pair(MixedWord((w1,), t))
        for _ in range(samples):
            k = rng.randint(1, 3)
            ws = tuple(
                Word(tuple(rng.choices(fin, k=rng.randint(1, 2)))) for _ in range(k)
            )
            per = tuple(
                Word(tuple(rng.choices(fin, k=rng.randint(1, 2))))
                for _ in range(rng.randint(1, 2))
            )
            check_pair(UPWord(ws, per))
    else:
        # canonical depth-two shapes: outer root sing(a), children sing(b_i)
        max_arity = alg.monad.max_arity
        for n in A.sorts:
            for a in A.elements(n):
                pools = [
                    [e for s in A.sorts for e in A.elements(s)] for _ in range(n)
                ]
                for bs in itertools.product(*pools):
                    if sum(A.sort_of(b) for b in bs) > max_arity:
                        continue
                    children = []
                    off = 0
                    for b in bs:
                        k = A.sort_of(b)
                        children.append(
                            Node(
                                alg.monad.sing(b, k),
                                tuple(Var(off + i) for i in range(k)),
                            )
                        )
                        off += k
                    outer = Tree(Node(alg.monad.sing(a, n), tuple(children)), off)
                    check_pair(outer)
        _check_var_slot_coherence(alg, report)
    return report


def _check_var_slot_coherence(alg: FinAlgebra, report: LawReport):
    """Optional bare-variable entries must agree with filling the variable
    later: the value of a(.., x, ..) applied to a full tuple of arguments
    equals the value of a with the variable slot filled directly."""
    A = alg.carrier
    elems = [e for s in A.sorts for e in A.elements(s)]
    for (a, slots), m in list(alg.comp.items()):
        if all(s is not VAR for s in slots):
            continue
        n_m = A.sort_of(m)
        # argument tuples for every variable of m, one segment per slot
        seg_sorts = [1 if s is VAR else A.sort_of(s) for s in slots]
        for args in itertools.product(elems, repeat=n_m):
            filled = []
            pos = 0
            ok = True
            for s, width in zip(slots, seg_sorts):
                segment = args[pos : pos + width]
                pos += width
                if s is VAR:
                    filled.append(segment[0])
                else:
                    try:
                        filled.append(alg.comp_value(s, segment))
                    except MissingTableEntry:
                        ok = False
                        break
            if not ok:
                continue
            if sum(A.sort_of(x) for x in args) > alg.monad.max_arity:
                continue
            if sum(A.sort_of(x) for x in filled) > alg.monad.max_arity:
                continue
            try:
                via_m = alg.comp_value(m, args)
                direct = alg.comp_value(a, tuple(filled))
            except MissingTableEntry:
                continue
            if via_m != direct:
                report.add("assoc", (a, slots, args))
