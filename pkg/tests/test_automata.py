import re as pyre

import pytest

from emalg.algio import ParseError, parse_dfa_file
from emalg.automata import (
    Dfa,
    RegexSyntaxError,
    dfa_to_recognizer,
    parse_regex,
    words_up_to,
)
from emalg.monads import Word


CASES = [
    ("(a|b)*aa(a|b)*", r"(a|b)*aa(a|b)*"),
    ("(aa)+", r"(aa)+"),
    ("a", r"a"),
    ("(a|b)*ab", r"(a|b)*ab"),
    ("b*a*", r"b*a*"),
    ("a?b+", r"a?b+"),
    ("(ab|ba)*", r"(ab|ba)*"),
]


def test_regex_membership_matches_reference():
    for ours, ref in CASES:
        dfa = parse_regex(ours)
        for w in words_up_to(dfa.alphabet, 8):
            s = "".join(w)
            expected = bool(pyre.fullmatch(ref, s))
            assert dfa.accepts(w) == expected, (ours, s)


def test_epsilon_excluded_with_warning():
    dfa = parse_regex("a*")
    assert dfa.matches_epsilon
    assert not dfa.accepts(())
    assert dfa.accepts(("a",))


def test_minimal_state_counts():
    assert parse_regex("(a|b)*aa(a|b)*").n_states == 3
    assert parse_regex("(aa)+").n_states == 2
    assert parse_regex("(a|b)+").n_states == 1


def test_regex_syntax_errors():
    for bad in ["(a", "a)", "*a", "a+*?("]:
        with pytest.raises(RegexSyntaxError):
            parse_regex(bad)
    # an empty alternative is legal and denotes the empty word
    assert parse_regex("|a").matches_epsilon


def test_transition_semigroup_sizes():
    assert len(dfa_to_recognizer(parse_regex("(a|b)+")).algebra.carrier) == 1
    assert len(dfa_to_recognizer(parse_regex("(a|b)*aa(a|b)*")).algebra.carrier) == 5
    assert len(dfa_to_recognizer(parse_regex("(aa)+")).algebra.carrier) == 2


def test_recognizer_language_agreement():
    for ours, _ in CASES:
        dfa = parse_regex(ours)
        rec = dfa_to_recognizer(dfa)
        for w in words_up_to(dfa.alphabet, 8):
            assert rec.accepts(Word(w)) == dfa.accepts(w), (ours, w)


DFA_FILE = """
# the even-length unary language
alphabet a
states 2
start 0
accept 0
trans 0 a 1
trans 1 a 0
"""


def test_dfa_file_parsing():
    dfa = parse_dfa_file(DFA_FILE)
    assert dfa.accepts(("a", "a"))
    assert not dfa.accepts(("a",))
    assert not dfa.accepts(())  # nonempty-word semantics
    with pytest.raises(ParseError):
        parse_dfa_file("alphabet a\nstates 2\nstart 0\ntrans 0 a 1\n")


def test_dfa_totality_validated():
    with pytest.raises(ValueError):
        Dfa(("a",), 2, 0, frozenset({1}), {(0, "a"): 1})


def test_dfa_serialization_round_trip():
    from emalg.algio import dfa_to_text

    for rx, _ in CASES:
        dfa = parse_regex(rx)
        back = parse_dfa_file(dfa_to_text(dfa))
        for w in words_up_to(dfa.alphabet, 8):
            assert back.accepts(w) == dfa.accepts(w), (rx, w)
