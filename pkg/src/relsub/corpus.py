"""Reference grammars used by the harness, the tests and the README."""
from .grammar import Cfg, parse_grammar

# {a^n b^n : n >= 1}
ANBN = """\
start: S
alphabet: 'a' 'b'
S -> A X | A B
X -> S B
A -> 'a'
B -> 'b'
"""

# the a S S | b language; not ~-substitutable for any recognizable ~
CLAIM5 = """\
start: S
alphabet: 'a' 'b'
S -> 'a' S S | 'b'
"""

# b+ together with b* a b*, i.e. the nonempty strings with at most one a
L2 = """\
start: S
alphabet: 'a' 'b'
S -> Bs 'a' Bs | Bp
Bp -> 'b' Bs
Bs -> 'b' Bs | ()
"""

# {a^n c b^n : n >= 0}, substitutable in the plain sense
ANCBN = """\
start: S
alphabet: 'a' 'b' 'c'
S -> 'a' S 'b' | 'c'
"""


def anbn() -> Cfg:
    return parse_grammar(ANBN)


def claim5() -> Cfg:
    return parse_grammar(CLAIM5)


def l2() -> Cfg:
    return parse_grammar(L2)


def ancbn() -> Cfg:
    return parse_grammar(ANCBN)


GRAMMARS = {"anbn": anbn, "claim5": claim5, "l2": l2, "ancbn": ancbn}
