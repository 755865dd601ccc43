import random

import pytest
from hypothesis import given, strategies as st

from emalg.core import SortedOrderedSet
from emalg.lawsuite import rand_element, _label_pools
from emalg.monads import (
    HOLE,
    OMEGA_UP,
    SORT_FIN,
    SORT_INF,
    SORT_WORD,
    WORD,
    MixedWord,
    Node,
    Tree,
    UPWord,
    Var,
    Word,
    parse_element,
    parse_tree,
    parse_upword,
    parse_word,
    serialize,
    tree_monad,
)

TREE2 = tree_monad(2)


def test_sing():
    assert WORD.sing("a", SORT_WORD) == Word(("a",))
    assert TREE2.sing("b", 2) == Tree(Node("b", (Var(0), Var(1))), 2)
    assert OMEGA_UP.sing("a", SORT_FIN) == Word(("a",))
    assert OMEGA_UP.sing("e", SORT_INF) == MixedWord((), "e")


def test_sing_arity_out_of_range():
    with pytest.raises(Exception):
        TREE2.sing("b", 3)


def test_map_identity_and_relabel():
    t = Word(("a", "a"))
    assert WORD.map(lambda a, s: a, t) == t
    assert WORD.map(lambda a, s: "b", t) == Word(("b", "b"))
    tree = parse_tree("b(c,x0)")
    mapped = TREE2.map(lambda a, s: a.upper(), tree)
    assert mapped == Tree(Node("B", (Node("C"), Var(0))), 1)


def test_flat_word_concatenation():
    t = Word((Word(("a", "b")), Word(("c",))))
    assert WORD.flat(t) == Word(("a", "b", "c"))


def test_flat_sing_unit():
    for monad, elem in [
        (WORD, Word(("a", "b"))),
        (OMEGA_UP, UPWord(("a",), ("b",))),
        (TREE2, parse_tree("b(c,d)")),
    ]:
        s = monad.sing(elem, monad.element_sort(elem))
        assert monad.flat(s) == elem


def test_flat_tree_substitution():
    # outer node labelled b(x0,x1) with children labelled c and d
    inner = TREE2.sing("b", 2)
    outer = Tree(
        Node(inner, (Node(TREE2.sing("c", 0)), Node(TREE2.sing("d", 0)))), 0
    )
    assert TREE2.flat(outer) == parse_tree("b(c,d)")


def test_flat_omega_absorption():
    # a finite run of words followed by an already-infinite element
    outer = MixedWord((Word(("a",)),), UPWord((), ("b", "a")))
    flat = OMEGA_UP.flat(outer)
    assert flat == UPWord(("a",), ("b", "a")) == UPWord((), ("a", "b"))
    outer2 = MixedWord((Word(("a", "b")),), MixedWord(("a",), "e"))
    assert OMEGA_UP.flat(outer2) == MixedWord(("a", "b", "a"), "e")


def test_leq_free():
    order = SortedOrderedSet.chain(["a", "b"])  # a < b
    assert WORD.leq(Word(("a", "b")), Word(("b", "b")), order)
    assert not WORD.leq(Word(("a",)), Word(("a", "a")), order)
    assert WORD.leq(Word(("a",)), Word(("a",)), order)
    t = parse_tree("b(c,x0)")
    torder = SortedOrderedSet({0: ["c"], 1: [], 2: ["b"]})
    assert TREE2.leq(t, t, torder)


def test_upword_normal_form():
    assert UPWord((), ("a", "b", "a", "b")) == UPWord((), ("a", "b"))
    assert UPWord(("a",), ("b", "a")) == UPWord((), ("a", "b"))
    assert UPWord(("a", "b"), ("a", "b")) == UPWord((), ("a", "b"))


@given(
    st.lists(st.sampled_from("ab"), max_size=4),
    st.lists(st.sampled_from("ab"), min_size=1, max_size=4),
)
def test_upword_invariance(u, v):
    u, v = tuple(u), tuple(v)
    base = UPWord(u, v)
    assert UPWord(u + v, v) == base
    assert UPWord(u, v + v) == base
    assert UPWord(u + v[:1], v[1:] + v[:1]) == base


def test_tree_linearity_enforced():
    with pytest.raises(ValueError):
        Tree(Node("b", (Var(0), Var(0))), 1)
    with pytest.raises(ValueError):
        Tree(Node("b", (Var(2), Var(0))), 2)  # x2 exceeds sort
    with pytest.raises(ValueError):
        Tree(Var(0), 1)  # root must be a symbol


def test_parsing_round_trips():
    for text in ["[a,b,a]", "[a]([b,a])^w", "[]([b])^w", "b(c,x0)", "c"]:
        for monad in (WORD, OMEGA_UP, TREE2):
            try:
                elem = parse_element(text, monad)
            except ValueError:
                continue
            assert parse_element(serialize(elem), monad) == elem


def test_parse_word_whitespace():
    assert parse_word(" [ a , b ] ") == Word(("a", "b"))
    with pytest.raises(ValueError):
        parse_word("[]")
    with pytest.raises(ValueError):
        parse_word("[a,b")


def test_parse_upword_normalises():
    assert parse_upword("[a]([b,a])^w") == UPWord((), ("a", "b"))


def test_parse_tree_sort_inference():
    assert parse_tree("b(x1,x0)").sort == 2
    assert parse_tree("b(c,d)").sort == 0
    with pytest.raises(ValueError):
        parse_tree("x0")


def test_hole_token():
    t = parse_tree("b(_,c)", allow_hole=True)
    assert t.root.children[0].label is HOLE
    with pytest.raises(ValueError):
        parse_tree("b(_,c)")


def test_monad_laws_randomized():
    rng = random.Random(7)
    cases = [
        (WORD, {SORT_WORD: list("ab")}),
        (OMEGA_UP, {SORT_FIN: list("ab"), SORT_INF: ["e"]}),
        (TREE2, {0: ["c"], 1: ["u"], 2: ["b"]}),
    ]
    for monad, base in cases:
        for _ in range(300):
            sort = rng.choice([s for s in monad.sorts if base.get(s)])
            t = rand_element(monad, rng, base, sort)
            assert monad.flat(monad.sing(t, monad.element_sort(t))) == t
            assert monad.flat(monad.map(lambda a, s: monad.sing(a, s), t)) == t
            level1 = _label_pools(monad, base, rng)
            level2 = _label_pools(monad, level1, rng)
            big = rand_element(monad, rng, level2, sort)
            assert monad.flat(monad.flat(big)) == monad.flat(
                monad.map(lambda w, s: monad.flat(w), big)
            )


def test_map_preserves_leq():
    order = SortedOrderedSet.chain(["a", "b"])
    f = {"a": "a", "b": "b"}
    rng = random.Random(3)
    for _ in range(100):
        w1 = Word(tuple(rng.choices("ab", k=3)))
        w2 = Word(tuple("b" if rng.random() < 0.5 else c for c in w1.labels))
        if WORD.leq(w1, w2, order):
            assert WORD.leq(WORD.map(f, w1), WORD.map(f, w2), order)


def test_tree_flat_preserves_linearity_and_sort():
    rng = random.Random(11)
    base = {0: ["c"], 1: ["u"], 2: ["b"]}
    for _ in range(200):
        level1 = _label_pools(TREE2, base, rng)
        sort = rng.choice([0, 1, 2])
        big = rand_element(TREE2, rng, level1, sort)
        flat = TREE2.flat(big)
        assert flat.sort == sort  # Tree constructor re-validates linearity
