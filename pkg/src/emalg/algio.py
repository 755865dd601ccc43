"""Line-based file formats: algebras and DFAs.

Algebra files ('#' comments, blank lines ignored):

    kind word|omega|tree
    elems <sort> e1 e2 ...
    leq <sort> ei ej
    dot ei ej ek          (word kind also uses dot lines for its product)
    mix ei ej ek
    omega ei ej
    comp a s1 .. sn r     (tree; a slot may be '_' for a bare variable)

Word algebras live at sort 0; omega algebras use sorts '1' and 'inf'
(the literal '2' is accepted for 'inf'); tree algebras use arities as
sorts.  The reflexive-transitive closure of the leq lines is taken.
Tables must be total or the file is rejected; errors carry line numbers.
"""

from __future__ import annotations

from .algebra import VAR, FinAlgebra, wilke_algebra
from .core import SortedOrderedSet
from .monads import SORT_FIN, SORT_INF, SORT_WORD, TreeMonad, WordMonad


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}")


def _lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line.split()


def _parse_sort(tok: str, kind: str, line_no: int) -> int:
    if kind == "omega" and tok in ("inf", "w"):
        return SORT_INF
    try:
        s = int(tok)
    except ValueError:
        raise ParseError(line_no, f"bad sort {tok!r}") from None
    if kind == "word" and s != SORT_WORD:
        raise ParseError(line_no, "word algebras live at sort 0")
    if kind == "omega" and s not in (SORT_FIN, SORT_INF):
        raise ParseError(line_no, "omega algebras use sorts 1 and inf")
    if s < 0:
        raise ParseError(line_no, "sorts are non-negative")
    return s


def parse_algebra(text: str) -> FinAlgebra:
    kind = None
    elems: dict[int, list[str]] = {}
    leq_pairs: list[tuple[str, str]] = []
    dot: dict = {}
    mix: dict = {}
    omega: dict = {}
    comp: dict = {}
    known: set[str] = set()

    def need(name: str, args: list[str], line_no: int):
        for a in args:
            if a not in known:
                raise ParseError(line_no, f"{name} mentions unknown element {a!r}")

    for line_no, toks in _lines(text):
        head, args = toks[0], toks[1:]
        if head == "kind":
            if kind is not None:
                raise ParseError(line_no, "duplicate kind line")
            if len(args) != 1 or args[0] not in ("word", "omega", "tree"):
                raise ParseError(line_no, "kind must be word, omega or tree")
            kind = args[0]
        elif kind is None:
            raise ParseError(line_no, "kind line must come first")
        elif head == "elems":
            if not args:
                raise ParseError(line_no, "elems needs a sort")
            s = _parse_sort(args[0], kind, line_no)
            for e in args[1:]:
                if e in known:
                    raise ParseError(line_no, f"element {e!r} declared twice")
                known.add(e)
            elems.setdefault(s, []).extend(args[1:])
        elif head == "leq":
            if len(args) != 3:
                raise ParseError(line_no, "leq takes: sort a b")
            _parse_sort(args[0], kind, line_no)
            need("leq", args[1:], line_no)
            leq_pairs.append((args[1], args[2]))
        elif head == "dot":
            if len(args) != 3:
                raise ParseError(line_no, "dot takes three elements")
            need("dot", args, line_no)
            dot[(args[0], args[1])] = args[2]
        elif head == "mix":
            if len(args) != 3:
                raise ParseError(line_no, "mix takes three elements")
            need("mix", args, line_no)
            mix[(args[0], args[1])] = args[2]
        elif head == "omega":
            if len(args) != 2:
                raise ParseError(line_no, "omega takes two elements")
            need("omega", args, line_no)
            omega[args[0]] = args[1]
        elif head == "comp":
            if len(args) < 2:
                raise ParseError(line_no, "comp takes: head slots... result")
            need("comp", [a for a in args if a != "_"], line_no)
            slots = tuple(VAR if a == "_" else a for a in args[1:-1])
            comp[(args[0], slots)] = args[-1]
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")

    if kind is None:
        raise ParseError(0, "missing kind line")
    try:
        carrier = SortedOrderedSet(elems, leq_pairs)
        if kind == "word":
            return FinAlgebra(WordMonad(), carrier, mult=dot)
        if kind == "omega":
            return wilke_algebra(carrier, dot, mix, omega)
        max_arity = max(elems, default=0)
        return FinAlgebra(TreeMonad(max_arity), carrier, comp=comp)
    except ValueError as exc:
        raise ParseError(0, str(exc)) from exc


def load_algebra(path: str) -> FinAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


# -- DFA files ------------------------------------------------------------------
#
#   alphabet a b
#   states 3
#   start 0
#   accept 2
#   trans <state> <letter> <state>
#
# Totality over states x alphabet is validated.


def dfa_to_text(dfa) -> str:
    lines = ["alphabet " + " ".join(str(c) for c in dfa.alphabet)]
    lines.append(f"states {dfa.n_states}")
    lines.append(f"start {dfa.start}")
    lines.append("accept " + " ".join(str(q) for q in sorted(dfa.accepting)))
    for q in range(dfa.n_states):
        for c in dfa.alphabet:
            lines.append(f"trans {q} {c} {dfa.trans[(q, c)]}")
    return "\n".join(lines) + "\n"


def parse_dfa_file(text: str):
    from .automata import Dfa

    alphabet: list[str] = []
    n_states = None
    start = None
    accept: set[int] = set()
    trans: dict = {}
    for line_no, toks in _lines(text):
        head, args = toks[0], toks[1:]
        if head == "alphabet":
            alphabet = list(args)
        elif head == "states":
            n_states = int(args[0])
        elif head == "start":
            start = int(args[0])
        elif head == "accept":
            accept = {int(a) for a in args}
        elif head == "trans":
            if len(args) != 3:
                raise ParseError(line_no, "trans takes: state letter state")
            trans[(int(args[0]), args[1])] = int(args[2])
        else:
            raise ParseError(line_no, f"unknown directive {head!r}")
    if n_states is None or start is None or not alphabet:
        raise ParseError(0, "alphabet, states and start are required")
    for q in range(n_states):
        for c in alphabet:
            if (q, c) not in trans:
                raise ParseError(0, f"missing transition for state {q}, letter {c!r}")
    return Dfa(tuple(alphabet), n_states, start, frozenset(accept), trans)
