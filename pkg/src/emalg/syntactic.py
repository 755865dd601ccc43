"""Contexts, context-function saturation, syntactic preorders and algebras.

A context is a free element over the carrier plus one hole; applying it gives
a unary polynomial map.  The defining preorder of a language quantifies over
infinitely many contexts, but the *functions* they induce form a finite set:
saturation computes that set as the closure of the identities under
post-composition with one-step context functions, keeping for every function
the first (shortest) context that produced it.  Determinism matters: the
fixed BFS order makes witnesses reproducible.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .core import (
    Elem,
    NoFactorisation,
    Preorder,
    Sort,
    SortedFunction,
    SortedOrderedSet,
    is_upward_closed,
)
from .algebra import (
    VAR,
    FinAlgebra,
    GeneratedSubalgebra,
    Morphism,
    NotCongruence,
    Recognizer,
    eval_upword,  # noqa: F401  (re-exported: ultimately periodic evaluation)
    is_congruence_ordering,
    quotient_algebra,
    subalgebra_generated,
)
from .monads import (
    HOLE,
    SORT_FIN,
    SORT_INF,
    SORT_WORD,
    Node,
    SortMismatch,
    Tree,
    Var,
    Word,
    serialize,
)

# -- context shapes ------------------------------------------------------------


@dataclass(frozen=True)
class WordContext:
    """left . hole . right over single-sort labels."""

    left: tuple = ()
    right: tuple = ()

    def to_str(self, name=str) -> str:
        parts = [name(a) for a in self.left] + ["_"] + [name(a) for a in self.right]
        return "[" + ",".join(parts) + "]"


@dataclass(frozen=True)
class OmegaContext:
    """An omega-word with one hole.

    ``items`` is the finite prefix (labels and possibly the hole);
    ``period`` is None or the loop content (labels and possibly the hole);
    ``tail`` is None, a sort-infinity element, or the hole itself.
    Exactly one hole must occur overall.  A context with no period and no
    tail has a finite result; the others are infinite.
    """

    items: tuple = ()
    period: Optional[tuple] = None
    tail: Any = None

    def __post_init__(self):
        holes = list(self.items).count(HOLE)
        holes += list(self.period or ()).count(HOLE)
        holes += 1 if self.tail is HOLE else 0
        if holes != 1:
            raise ValueError("omega context needs exactly one hole")

    @property
    def hole_sort(self) -> Sort:
        return SORT_INF if self.tail is HOLE else SORT_FIN

    @property
    def result_sort(self) -> Sort:
        return SORT_FIN if self.period is None and self.tail is None else SORT_INF

    def to_str(self, name=str) -> str:
        def render(a):
            return "_" if a is HOLE else name(a)

        pre = "[" + ",".join(render(a) for a in self.items) + "]"
        if self.period is not None:
            return pre + "([" + ",".join(render(a) for a in self.period) + "])^w"
        if self.tail is not None:
            return pre + render(self.tail)
        return pre


@dataclass(frozen=True)
class TreeContext:
    """A tree over carrier labels with exactly one hole-labelled node; the
    hole's sort is its child count."""

    tree: Tree

    def __post_init__(self):
        if self._count_holes(self.tree.root) != 1:
            raise ValueError("tree context needs exactly one hole")

    @staticmethod
    def _count_holes(n) -> int:
        if isinstance(n, Var):
            return 0
        own = 1 if n.label is HOLE else 0
        return own + sum(TreeContext._count_holes(c) for c in n.children)

    @property
    def hole_sort(self) -> Sort:
        def find(n):
            if isinstance(n, Var):
                return None
            if n.label is HOLE:
                return len(n.children)
            for c in n.children:
                got = find(c)
                if got is not None:
                    return got
            return None

        return find(self.tree.root)

    @property
    def result_sort(self) -> Sort:
        return self.tree.sort

    def to_str(self, name=str) -> str:
        return serialize(self.tree, lambda a: "_" if a is HOLE else name(a))


Context = Any  # WordContext | OmegaContext | TreeContext


def context_to_str(ctx: Context, name=str) -> str:
    return ctx.to_str(name)


# -- applying and composing contexts ---------------------------------------------


def context_apply(alg: FinAlgebra, ctx: Context, a: Elem) -> Elem:
    """Evaluate the context with the hole replaced by ``a``."""
    A = alg.carrier
    if isinstance(ctx, WordContext):
        if A.sort_of(a) != SORT_WORD:
            raise SortMismatch(f"{a!r} is not a word-sort element")
        acc = None
        for x in ctx.left + (a,) + ctx.right:
            acc = x if acc is None else alg.mult[(acc, x)]
        return acc
    if isinstance(ctx, OmegaContext):
        if A.sort_of(a) != ctx.hole_sort:
            raise SortMismatch(f"{a!r} has sort {A.sort_of(a)}, hole wants {ctx.hole_sort}")

        def fold(labels) -> Optional[Elem]:
            acc = None
            for x in labels:
                v = a if x is HOLE else x
                acc = v if acc is None else alg.dot[(acc, v)]
            return acc

        head = fold(ctx.items)
        if ctx.period is None and ctx.tail is None:
            return head
        if ctx.period is not None:
            tail = alg.omega[fold(ctx.period)]
        else:
            tail = a if ctx.tail is HOLE else ctx.tail
        return tail if head is None else alg.mix[(head, tail)]
    if isinstance(ctx, TreeContext):
        if A.sort_of(a) != ctx.hole_sort:
            raise SortMismatch(f"{a!r} has sort {A.sort_of(a)}, hole wants {ctx.hole_sort}")

        def ev(n):
            if isinstance(n, Var):
                return VAR
            slots = tuple(ev(c) for c in n.children)
            head = a if n.label is HOLE else n.label
            return alg.comp_value(head, slots)

        return ev(ctx.tree.root)
    raise TypeError(f"not a context: {ctx!r}")


def _splice(items: tuple, inner: tuple) -> tuple:
    i = items.index(HOLE)
    return items[:i] + inner + items[i + 1 :]


def _substitute_ctx_tree(node, sub: dict):
    if isinstance(node, Var):
        return sub.get(node.index, node)
    return Node(node.label, tuple(_substitute_ctx_tree(c, sub) for c in node.children))


def context_compose(outer: Context, inner: Context) -> Context:
    """The context outer[inner]: apply inner first, then outer."""
    if isinstance(outer, WordContext) and isinstance(inner, WordContext):
        return WordContext(outer.left + inner.left, inner.right + outer.right)
    if isinstance(outer, OmegaContext):
        if inner_result_sort(inner) != outer.hole_sort:
            raise SortMismatch("inner context result does not fit the outer hole")
        if outer.tail is HOLE:
            # outer = items . hole(inf): splice the whole inner shape after items
            if isinstance(inner, OmegaContext) and inner.result_sort == SORT_INF:
                return OmegaContext(outer.items + inner.items, inner.period, inner.tail)
            raise SortMismatch("outer hole has infinite sort")
        body = inner.left + (HOLE,) + inner.right if isinstance(inner, WordContext) else None
        if body is None:
            if not (isinstance(inner, OmegaContext) and inner.result_sort == SORT_FIN):
                raise SortMismatch("outer hole has finite sort")
            body = inner.items
        if HOLE in outer.items:
            return OmegaContext(_splice(outer.items, body), outer.period, outer.tail)
        return OmegaContext(outer.items, _splice(outer.period, body), outer.tail)
    if isinstance(outer, TreeContext) and isinstance(inner, TreeContext):
        def go(n):
            if isinstance(n, Var):
                return n
            if n.label is HOLE:
                # inner's variables refer to the outer hole's children
                sub = {j: c for j, c in enumerate(n.children)}
                return _substitute_ctx_tree(inner.tree.root, sub)
            return Node(n.label, tuple(go(c) for c in n.children))

        return TreeContext(Tree(go(outer.tree.root), outer.tree.sort))
    raise TypeError(f"cannot compose {outer!r} with {inner!r}")


def inner_result_sort(ctx: Context) -> Sort:
    if isinstance(ctx, WordContext):
        return SORT_WORD
    return ctx.result_sort


def identity_context(kind: str, sort: Sort) -> Context:
    if kind == "word":
        return WordContext((), ())
    if kind == "omega":
        if sort == SORT_FIN:
            return OmegaContext((HOLE,), None, None)
        return OmegaContext((), None, HOLE)
    return TreeContext(Tree(Node(HOLE, tuple(Var(i) for i in range(sort))), sort))


# -- saturation -------------------------------------------------------------------


@dataclass
class ContextFunction:
    """A tabulated unary map induced by some context, with the shortest
    witness context found for it."""

    source_sort: Sort
    target_sort: Sort
    table: dict
    witness: Context

    def __call__(self, a: Elem) -> Elem:
        return self.table[a]

    def key(self, carrier: SortedOrderedSet):
        return (
            self.source_sort,
            self.target_sort,
            tuple(self.table[e] for e in carrier.elements(self.source_sort)),
        )


def _one_step_functions(alg: FinAlgebra) -> list[ContextFunction]:
    A = alg.carrier
    out: list[ContextFunction] = []
    if alg.kind == "word":
        es = A.elements(SORT_WORD)
        for u in es:
            out.append(
                ContextFunction(
                    SORT_WORD,
                    SORT_WORD,
                    {e: alg.mult[(u, e)] for e in es},
                    WordContext((u,), ()),
                )
            )
            out.append(
                ContextFunction(
                    SORT_WORD,
                    SORT_WORD,
                    {e: alg.mult[(e, u)] for e in es},
                    WordContext((), (u,)),
                )
            )
    elif alg.kind == "omega":
        fin, inf = A.elements(SORT_FIN), A.elements(SORT_INF)
        for u in fin:
            out.append(
                ContextFunction(
                    SORT_FIN,
                    SORT_FIN,
                    {e: alg.dot[(u, e)] for e in fin},
                    OmegaContext((u, HOLE)),
                )
            )
            out.append(
                ContextFunction(
                    SORT_FIN,
                    SORT_FIN,
                    {e: alg.dot[(e, u)] for e in fin},
                    OmegaContext((HOLE, u)),
                )
            )
            out.append(
                ContextFunction(
                    SORT_INF,
                    SORT_INF,
                    {e: alg.mix[(u, e)] for e in inf},
                    OmegaContext((u,), None, HOLE),
                )
            )
        if fin:
            out.append(
                ContextFunction(
                    SORT_FIN,
                    SORT_INF,
                    {e: alg.omega[e] for e in fin},
                    OmegaContext((), (HOLE,), None),
                )
            )
        for t in inf:
            out.append(
                ContextFunction(
                    SORT_FIN,
                    SORT_INF,
                    {e: alg.mix[(e, t)] for e in fin},
                    OmegaContext((HOLE,), None, t),
                )
            )
    else:
        def sing_node(b, off):
            k = A.sort_of(b)
            return Node(b, tuple(Var(off + i) for i in range(k))), off + k

        # wrap steps: e -> comp(b; c.., e, c..), one per table row position
        seen_rows = set()
        for (b, slots) in alg.comp:
            if any(s is VAR for s in slots):
                continue
            for i in range(len(slots)):
                row = (b, slots[:i], slots[i + 1 :], A.sort_of(slots[i]))
                if row in seen_rows:
                    continue
                seen_rows.add(row)
                zeta = A.sort_of(slots[i])
                table = {}
                total = True
                for e in A.elements(zeta):
                    key = (b, slots[:i] + (e,) + slots[i + 1 :])
                    if key not in alg.comp:
                        total = False
                        break
                    table[e] = alg.comp[key]
                if not total or not table:
                    continue
                children = []
                off = 0
                for j, s in enumerate(slots):
                    if j == i:
                        children.append(
                            Node(HOLE, tuple(Var(off + k) for k in range(zeta)))
                        )
                        off += zeta
                    else:
                        node, off = sing_node(s, off)
                        children.append(node)
                out.append(
                    ContextFunction(
                        zeta,
                        sum(_slot_sort_of(A, s) for s in slots),
                        table,
                        TreeContext(Tree(Node(b, tuple(children)), off)),
                    )
                )
        # fill steps: e -> comp(e; v..), one per slot tuple
        seen_fill = set()
        for (b, slots) in alg.comp:
            if any(s is VAR for s in slots) or not slots:
                continue
            n = len(slots)
            if slots in seen_fill:
                continue
            seen_fill.add(slots)
            table = {}
            total = True
            for e in A.elements(n):
                if (e, slots) not in alg.comp:
                    total = False
                    break
                table[e] = alg.comp[(e, slots)]
            if not total or not table:
                continue
            children = []
            off = 0
            for s in slots:
                node, off = sing_node(s, off)
                children.append(node)
            out.append(
                ContextFunction(
                    n,
                    sum(A.sort_of(s) for s in slots),
                    table,
                    TreeContext(Tree(Node(HOLE, tuple(children)), off)),
                )
            )
    out.sort(key=lambda f: (f.source_sort, f.target_sort, context_to_str(f.witness, repr)))
    return out


def _slot_sort_of(carrier, s) -> Sort:
    return 1 if s is VAR else carrier.sort_of(s)


_saturation_cache: "weakref.WeakKeyDictionary[FinAlgebra, dict]" = (
    weakref.WeakKeyDictionary()
)


def saturate_all(alg: FinAlgebra) -> dict[tuple[Sort, Sort], list[ContextFunction]]:
    """All context functions of the algebra, grouped by (source, target) sort
    pair, in deterministic BFS discovery order."""
    cached = _saturation_cache.get(alg)
    if cached is not None:
        return cached
    A = alg.carrier
    steps = _one_step_functions(alg)
    by_source: dict[Sort, list[ContextFunction]] = {}
    for g in steps:
        by_source.setdefault(g.source_sort, []).append(g)
    found: dict = {}
    queue: list[ContextFunction] = []
    for s in A.sorts:
        ident = ContextFunction(
            s, s, {e: e for e in A.elements(s)}, identity_context(alg.kind, s)
        )
        found[ident.key(A)] = ident
        queue.append(ident)
    while queue:
        nxt: list[ContextFunction] = []
        for f in queue:
            for g in by_source.get(f.target_sort, ()):
                table = {e: g.table[f.table[e]] for e in f.table}
                h = ContextFunction(
                    f.source_sort,
                    g.target_sort,
                    table,
                    context_compose(g.witness, f.witness),
                )
                k = h.key(A)
                if k not in found:
                    found[k] = h
                    nxt.append(h)
        queue = nxt
    grouped: dict[tuple[Sort, Sort], list[ContextFunction]] = {}
    for fn in found.values():
        grouped.setdefault((fn.source_sort, fn.target_sort), []).append(fn)
    _saturation_cache[alg] = grouped
    return grouped


def saturate_contexts(alg: FinAlgebra, source: Sort, target: Sort) -> list[ContextFunction]:
    return list(saturate_all(alg).get((source, target), []))


# -- syntactic preorder and algebra ------------------------------------------------


def syntactic_preorder(alg: FinAlgebra, accepting: Iterable[Elem], sort: Sort) -> Preorder:
    """a <= b iff every saturated context function sends a into the accepting
    set only if it also sends b there."""
    P = frozenset(accepting)
    if not is_upward_closed(alg.carrier, P):
        raise ValueError("accepting set is not upward closed")
    grouped = saturate_all(alg)
    pairs = []
    for zeta in alg.carrier.sorts:
        fns = grouped.get((zeta, sort), [])
        for a in alg.elements(zeta):
            for b in alg.elements(zeta):
                if all((f.table[a] not in P) or (f.table[b] in P) for f in fns):
                    pairs.append((a, b))
    return Preorder(alg.carrier, pairs)


@dataclass
class SyntacticResult:
    """The syntactic algebra of a recognized language, with the morphism from
    the recognizer's image algebra and everything needed to rebuild contexts
    over the original alphabet."""

    recognizer: Recognizer
    image: GeneratedSubalgebra
    preorder: Preorder
    syn_algebra: FinAlgebra
    syn_morphism: Morphism
    accepting: frozenset
    accepting_sort: Sort
    letter_map: dict = field(default_factory=dict)

    def syn_value(self, t) -> Elem:
        return self.syn_morphism(self.recognizer.value(t))

    def accepts(self, t) -> bool:
        return self.syn_value(t) in self.accepting

    def size(self) -> int:
        return len(self.syn_algebra.carrier)


def syntactic_algebra(rec: Recognizer) -> SyntacticResult:
    """Restrict to the image subalgebra, saturate, quotient.

    The shallow-compatibility reduction is re-verified on every run; a
    failure would indicate an implementation bug and is surfaced loudly.
    """
    sub = subalgebra_generated(rec.algebra, set(rec.assignment.values()))
    B = sub.algebra
    P = frozenset(p for p in rec.accepting if p in B.carrier)
    pre = syntactic_preorder(B, P, rec.accepting_sort)
    if not is_congruence_ordering(B, pre):
        raise NotCongruence(
            None,
            "syntactic preorder failed shallow compatibility; this breaks the "
            "finitary reduction and indicates a bug",
        )
    syn, qm = quotient_algebra(B, pre)
    accepting = frozenset(qm(x) for x in P)
    if not is_upward_closed(syn.carrier, accepting):
        raise NotCongruence(None, "image of the accepting set is not upward closed")
    letters = {c: qm(rec.assignment[c]) for c in rec.alphabet}
    return SyntacticResult(
        recognizer=rec,
        image=sub,
        preorder=pre,
        syn_algebra=syn,
        syn_morphism=qm,
        accepting=accepting,
        accepting_sort=rec.accepting_sort,
        letter_map=letters,
    )


def generated_pairs(A: FinAlgebra, B: FinAlgebra, seeds: Iterable[tuple]) -> set:
    """Closure of seed pairs under componentwise shallow products: the carrier
    of the subalgebra of A x B generated by the seeds, without materialising
    the product."""
    pairs = set(seeds)
    changed = True
    while changed:
        changed = False
        current = list(pairs)
        if A.kind == "word":
            for a1, b1 in current:
                for a2, b2 in current:
                    p = (A.mult[(a1, a2)], B.mult[(b1, b2)])
                    if p not in pairs:
                        pairs.add(p)
                        changed = True
        elif A.kind == "omega":
            fins = [(a, b) for a, b in current if A.carrier.sort_of(a) == SORT_FIN]
            infs = [(a, b) for a, b in current if A.carrier.sort_of(a) == SORT_INF]
            for a1, b1 in fins:
                for a2, b2 in fins:
                    p = (A.dot[(a1, a2)], B.dot[(b1, b2)])
                    if p not in pairs:
                        pairs.add(p)
                        changed = True
                p = (A.omega[a1], B.omega[b1])
                if p not in pairs:
                    pairs.add(p)
                    changed = True
                for e1, e2 in infs:
                    p = (A.mix[(a1, e1)], B.mix[(b1, e2)])
                    if p not in pairs:
                        pairs.add(p)
                        changed = True
        else:
            import itertools as _it

            current_by_sort: dict[Sort, list] = {}
            for a, b in current:
                current_by_sort.setdefault(A.carrier.sort_of(a), []).append((a, b))
            for (h, slots), r in A.comp.items():
                if any(s is VAR for s in slots):
                    continue
                heads = [p for p in current if p[0] == h]
                if not heads:
                    continue
                pools = [current_by_sort.get(A.carrier.sort_of(s), []) for s in slots]
                pools = [[p for p in pool if p[0] == s] for pool, s in zip(pools, slots)]
                if any(not pool for pool in pools):
                    continue
                for hp in heads:
                    for combo in _it.product(*pools):
                        key_b = (hp[1], tuple(p[1] for p in combo))
                        if key_b in B.comp:
                            p = (r, B.comp[key_b])
                            if p not in pairs:
                                pairs.add(p)
                                changed = True
    return pairs


def factor_to_syntactic(rec: Recognizer, syn: SyntacticResult) -> Morphism:
    """The unique morphism from the recognizer's algebra onto the syntactic
    algebra commuting with the two evaluation maps.

    Requires the recognizer's evaluation to be surjective onto its algebra.
    Failure of the kernel inclusion raises NoFactorisation, which cannot
    happen for a recognizer of the same language.
    """
    seeds = [
        (rec.assignment[c], syn.letter_map[c])
        for c in rec.alphabet
        if c in syn.letter_map
    ]
    if len(seeds) < len(list(rec.alphabet)):
        raise ValueError("recognizers use different alphabets")
    pairs = generated_pairs(rec.algebra, syn.syn_algebra, seeds)
    firsts = {a for a, _ in pairs}
    if any(e not in firsts for e in rec.algebra.carrier):
        raise ValueError("recognizer evaluation is not surjective onto its algebra")
    for a1, s1 in pairs:
        for a2, s2 in pairs:
            if rec.algebra.carrier.leq(a1, a2) and not syn.syn_algebra.carrier.leq(s1, s2):
                raise NoFactorisation((a1, a2))
    mapping = {}
    for a, s in sorted(pairs, key=repr):
        mapping.setdefault(a, s)
    fn = SortedFunction(rec.algebra.carrier, syn.syn_algebra.carrier, mapping)
    return Morphism(rec.algebra, syn.syn_algebra, fn)


# -- derivative decomposition --------------------------------------------------------


@dataclass
class DerivativeDecomposition:
    """A union-of-intersections of inverse context images: the language with
    image classes Q equals the union over a in Q of the words sent into the
    base language by every context paired with a non-member class."""

    syn: SyntacticResult
    target: frozenset
    clauses: list  # list of (class elem, list[Context over the alphabet])

    def matches(self, t) -> bool:
        rec = self.syn.recognizer
        if rec.algebra.kind != "word":
            raise NotImplementedError("membership replay only for word languages")
        if not isinstance(t, Word):
            raise SortMismatch(f"expected a word, got {t!r}")
        for _, ctxs in self.clauses:
            if all(
                rec.accepts(Word(c.left + t.labels + c.right)) for c in ctxs
            ):
                return True
        return False


def decompose_as_derivatives(syn: SyntacticResult, target: Iterable[Elem]) -> DerivativeDecomposition:
    """Express the language with syntactic image ``target`` as a finite
    union of intersections of context derivatives of the base language."""
    if syn.recognizer.algebra.kind != "word":
        raise NotImplementedError(
            "alphabet-level derivative decompositions are implemented for "
            "word languages"
        )
    Q = frozenset(target)
    Syn = syn.syn_algebra
    sorts = {Syn.carrier.sort_of(x) for x in Q}
    if len(sorts) > 1:
        raise ValueError("target must sit inside one sort")
    zeta = next(iter(sorts)) if sorts else syn.accepting_sort
    if not is_upward_closed(Syn.carrier, Q):
        raise ValueError("target is not upward closed; not recognized by this quotient")
    complement = [x for x in Syn.elements(zeta) if x not in Q]

    B = syn.image.algebra
    qm = syn.syn_morphism
    reps = {}
    for x in B.carrier:
        reps.setdefault(qm(x), x)
    P = frozenset(p for p in syn.recognizer.accepting if p in B.carrier)
    fns = saturate_contexts(B, zeta, syn.accepting_sort)

    letter_of = {}
    for c in syn.recognizer.alphabet:
        letter_of.setdefault(syn.recognizer.assignment[c], c)

    def to_alphabet(ctx) -> Context:
        wit = syn.image.witnesses

        def expand_word(labels) -> tuple:
            out: list = []
            for x in labels:
                if x is HOLE:
                    out.append(HOLE)
                else:
                    out.extend(letter_of[l] for l in wit[x].labels)
            return tuple(out)

        if isinstance(ctx, WordContext):
            both = expand_word(ctx.left + (HOLE,) + ctx.right)
            i = both.index(HOLE)
            return WordContext(both[:i], both[i + 1 :])
        raise NotImplementedError("alphabet-level contexts only for word languages")

    clauses = []
    for a in sorted(Q, key=repr):
        ctxs = []
        seen = set()
        for b in sorted(complement, key=repr):
            pick = None
            for f in fns:
                if f.table[reps[a]] in P and f.table[reps[b]] not in P:
                    pick = f
                    break
            if pick is None:
                raise NotCongruence((a, b), "no separating context; quotient broken")
            ctx = to_alphabet(pick.witness)
            key = context_to_str(ctx, repr)
            if key not in seen:
                seen.add(key)
                ctxs.append(ctx)
        clauses.append((a, ctxs))
    return DerivativeDecomposition(syn, Q, clauses)
