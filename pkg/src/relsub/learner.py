"""Hypothesis grammars built from a positive sample, and the incremental learner.

The hypothesis has one nonterminal ``[x]`` per nonempty substring ``x`` of the
sample and a start symbol, with four rule families:

* branching ``[xy] -> [x] [y]``
* unary ``[x] -> [x']`` when ``x ~ x'`` and the two share a context in the sample
* lexical ``[a] -> a``
* start ``Ŝ -> [w]`` for every sample string ``w``
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator

from .charset import Context
from .errors import PremiseViolation
from .grammar import Cfg, Production, empty_grammar, lenlex_key, member
from .relation import RecognizableRelation

START = "Ŝ"


def nt(x: str) -> str:
    return f"[{x}]"


@dataclass(frozen=True)
class Sample:
    strings: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "strings", frozenset(self.strings))
        if "" in self.strings:
            raise PremiseViolation("the empty string cannot be part of the sample")

    @property
    def desk(self) -> int:
        return sum(len(w) for w in self.strings)

    @property
    def max_len(self) -> int:
        return max((len(w) for w in self.strings), default=0)

    def __len__(self):
        return len(self.strings)

    def __iter__(self):
        return iter(sorted(self.strings, key=lambda w: (len(w), w)))

    def __contains__(self, w):
        return w in self.strings

    def add(self, w: str) -> "Sample":
        if not w:
            raise PremiseViolation("the empty string cannot be part of the sample")
        return Sample(self.strings | {w})


def contexts(k: Sample | Iterable[str], x: str) -> set[Context]:
    """``D_K(x)``: every ``(l, r)`` with ``l x r`` in the sample."""
    if not x:
        raise ValueError("contexts are only taken for nonempty strings")
    out = set()
    for w in k:
        i = w.find(x)
        while i != -1:
            out.add(Context(w[:i], w[i + len(x):]))
            i = w.find(x, i + 1)
    return out


def substrings(k: Sample | Iterable[str]) -> set[str]:
    return {w[i:j] for w in k for i in range(len(w)) for j in range(i + 1, len(w) + 1)}


def hypothesis_families(k: Sample, r: RecognizableRelation) -> dict[str, list[Production]]:
    """Rules of the hypothesis grammar grouped by family."""
    key = lenlex_key(r.alphabet)
    subs = sorted(substrings(k), key=key)
    M = r.monoid
    image: dict[str, int] = {}
    for x in subs:
        last = r.morphism.image_of(x[-1])
        image[x] = last if len(x) == 1 else M.op(image[x[:-1]], last)

    sharing: dict[Context, set[str]] = {}
    for w in k:
        n = len(w)
        for i in range(n):
            for j in range(i + 1, n + 1):
                sharing.setdefault(Context(w[:i], w[j:]), set()).add(w[i:j])
    pairs = set()
    for group in sharing.values():
        if len(group) < 2:
            continue
        for x in group:
            for y in group:
                if x != y and r.related_images(image[x], image[y]):
                    pairs.add((x, y))

    return {
        "start": [Production(START, (nt(w),)) for w in sorted(k, key=key)],
        "branching": [
            Production(nt(z), (nt(z[:i]), nt(z[i:]))) for z in subs for i in range(1, len(z))
        ],
        "unary": [
            Production(nt(x), (nt(y),))
            for x, y in sorted(pairs, key=lambda p: (key(p[0]), key(p[1])))
        ],
        "lexical": [Production(nt(a), (a,)) for a in subs if len(a) == 1],
    }


def build_hypothesis(k: Sample | Iterable[str], r: RecognizableRelation) -> Cfg:
    if not isinstance(k, Sample):
        k = Sample(frozenset(k))
    families = hypothesis_families(k, r)
    key = lenlex_key(r.alphabet)
    nts = (START,) + tuple(nt(x) for x in sorted(substrings(k), key=key))
    prods = tuple(p for fam in ("start", "branching", "unary", "lexical") for p in families[fam])
    return Cfg(nts, r.alphabet, prods, START)


@dataclass(frozen=True)
class LearnerState:
    sample: Sample
    hypothesis: Cfg
    relation: RecognizableRelation
    rebuild_count: int = 0


def initial_state(r: RecognizableRelation) -> LearnerState:
    return LearnerState(Sample(), empty_grammar(r.alphabet, START), r, 0)


def learn_step(s: LearnerState, w: str) -> LearnerState:
    """Add ``w``; rebuild from the whole sample only if the hypothesis misses ``w``."""
    if not w:
        raise PremiseViolation("the empty string cannot be presented")
    sample = s.sample.add(w)
    if member(s.hypothesis, w):
        return replace(s, sample=sample)
    return LearnerState(sample, build_hypothesis(sample, s.relation), s.relation, s.rebuild_count + 1)


def iter_learn(ws: Iterable[str], r: RecognizableRelation) -> Iterator[LearnerState]:
    state = initial_state(r)
    for w in ws:
        state = learn_step(state, w)
        yield state


def learn_all(ws: Iterable[str], r: RecognizableRelation) -> list[Cfg]:
    return [state.hypothesis for state in iter_learn(ws, r)]
