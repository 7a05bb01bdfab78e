"""Experiments: presentations, convergence runs, soundness/completeness checks,
bounded substitutability checking, the pigeonhole witness and build metrics."""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import corpus
from .charset import Context, char_set, context_key, type_transform
from .errors import InvalidSample, PremiseViolation
from .grammar import Cfg, enumerate_language, lenlex_key, member, to_cnf
from .learner import Sample, build_hypothesis, contexts, hypothesis_families, initial_state, learn_step, substrings
from .relation import RecognizableRelation


def presentation_lenlex(g: Cfg, max_len: int) -> list[str]:
    """The members of ``L(g)`` up to ``max_len``, length-lex ordered."""
    if member(g, ""):
        raise PremiseViolation("target language contains the empty string")
    return sorted(enumerate_language(g, max_len), key=lenlex_key(g.alphabet))


def _first(strings: Iterable[str], alphabet) -> str | None:
    return min(strings, key=lenlex_key(alphabet), default=None)


@dataclass(frozen=True)
class ConvergenceReport:
    converged: bool
    convergence_index: int | None
    final_equivalent: bool
    rebuilds: int
    desk: int
    rules_total: int
    presented: int
    overgenerated: str | None = None
    undergenerated: str | None = None
    timings: tuple[float, ...] = field(default=(), compare=False)
    sizes: tuple[tuple[int, int, int], ...] = ()

    def key_values(self) -> str:
        idx = "none" if self.convergence_index is None else self.convergence_index
        return (
            f"converged={str(self.converged).lower()}\n"
            f"convergence_index={idx}\n"
            f"final_equivalent={str(self.final_equivalent).lower()}\n"
            f"rebuilds={self.rebuilds}\n"
            f"desk={self.desk}\n"
            f"rules_total={self.rules_total}\n"
        )


def run_convergence(target: Cfg, r: RecognizableRelation, max_len: int, check_len: int) -> ConvergenceReport:
    """Feed the length-lex presentation of ``target`` to the learner.

    ``convergence_index`` is the (1-based) step of the last hypothesis change;
    the run counts as converged when at least one later string left the
    hypothesis untouched.
    """
    words = presentation_lenlex(target, max_len)
    state = initial_state(r)
    last_change = None
    timings, sizes = [], []
    for n, w in enumerate(words, 1):
        t0 = time.perf_counter()
        nxt = learn_step(state, w)
        timings.append(time.perf_counter() - t0)
        if nxt.rebuild_count != state.rebuild_count:
            last_change = n
        state = nxt
        g = state.hypothesis
        sizes.append((state.sample.desk, len(g.nonterminals), len(g.productions)))
    want = enumerate_language(target, check_len)
    got = enumerate_language(state.hypothesis, check_len)
    return ConvergenceReport(
        converged=last_change is not None and last_change < len(words),
        convergence_index=last_change,
        final_equivalent=want == got,
        rebuilds=state.rebuild_count,
        desk=state.sample.desk,
        rules_total=len(state.hypothesis.productions),
        presented=len(words),
        overgenerated=_first(got - want, target.alphabet),
        undergenerated=_first(want - got, target.alphabet),
        timings=tuple(timings),
        sizes=tuple(sizes),
    )


@dataclass(frozen=True)
class CompletenessReport:
    sample: tuple[str, ...]
    desk: int
    holds: bool
    missing: str | None
    overgenerated: str | None


def characteristic_sample(target: Cfg, r: RecognizableRelation) -> Sample:
    """CS of the target after CNF conversion and typing by the relation's monoid."""
    cnf = to_cnf(target)
    if member(cnf, ""):
        raise PremiseViolation("target language contains the empty string")
    return Sample(frozenset(char_set(type_transform(cnf, r.morphism))))


def completeness_check(target: Cfg, r: RecognizableRelation, check_len: int) -> CompletenessReport:
    k = characteristic_sample(target, r)
    hyp = build_hypothesis(k, r)
    want = enumerate_language(target, check_len)
    got = enumerate_language(hyp, check_len)
    return CompletenessReport(
        sample=tuple(sorted(k.strings, key=lenlex_key(r.alphabet))),
        desk=k.desk,
        holds=want <= got,
        missing=_first(want - got, r.alphabet),
        overgenerated=_first(got - want, r.alphabet),
    )


@dataclass(frozen=True)
class SoundnessReport:
    holds: bool
    offending: str | None
    overgenerated_count: int


def soundness_check(target: Cfg, r: RecognizableRelation, k: Sample | Iterable[str], check_len: int) -> SoundnessReport:
    if not isinstance(k, Sample):
        k = Sample(frozenset(k))
    outside = [w for w in k if not member(target, w)]
    if outside:
        raise InvalidSample(f"sample string {outside[0]!r} is not in the target language")
    extra = enumerate_language(build_hypothesis(k, r), check_len) - enumerate_language(target, check_len)
    return SoundnessReport(not extra, _first(extra, r.alphabet), len(extra))


@dataclass(frozen=True)
class Violation:
    x: str
    y: str
    shared: Context
    distinguishing: Context
    conclusive: bool

    def describe(self) -> str:
        def show(c):
            return f"({c.left or 'λ'}, {c.right or 'λ'})"

        tag = "conclusive" if self.conclusive else "inconclusive (context crosses the bound)"
        return (
            f"x={self.x}\ny={self.y}\nshared={show(self.shared)}\n"
            f"distinguishing={show(self.distinguishing)}\n{tag}\n"
        )


def violations(l_sample: Iterable[str], r: RecognizableRelation, bound: int | None = None) -> Iterator[Violation]:
    """Every related pair of nonempty substrings sharing a context but not a distribution.

    ``l_sample`` must be the target restricted to length ``<= bound``. A
    distinguishing context ``c`` of ``x`` against ``y`` is conclusive when
    ``c`` wrapped around ``y`` stays within the bound, so its absence from the
    sample means absence from the language.
    """
    lang = frozenset(l_sample)
    if bound is None:
        bound = max((len(w) for w in lang), default=0)
    key = lenlex_key(r.alphabet)
    ckey = context_key(r.alphabet)
    subs = sorted(substrings(lang), key=key)
    dist = {x: contexts(lang, x) for x in subs}
    sharing: dict[Context, set[str]] = {}
    for x in subs:
        for c in dist[x]:
            sharing.setdefault(c, set()).add(x)
    pairs = set()
    for group in sharing.values():
        for x in group:
            for y in group:
                if x != y:
                    pairs.add((x, y))
    for x, y in sorted(pairs, key=lambda p: (len(p[0]) + len(p[1]), key(p[0]), key(p[1]))):
        if not r(x, y):
            continue
        diff = dist[x] - dist[y]
        if not diff:
            continue
        shared = min(dist[x] & dist[y], key=ckey)
        good = [c for c in diff if len(c.left) + len(c.right) + len(y) <= bound]
        if good:
            yield Violation(x, y, shared, min(good, key=ckey), True)
        else:
            yield Violation(x, y, shared, min(diff, key=ckey), False)


@dataclass(frozen=True)
class SubstitutabilityVerdict:
    bound: int
    violation: Violation | None
    inconclusive: int

    @property
    def substitutable(self) -> bool:
        return self.violation is None

    def describe(self) -> str:
        if self.violation is None:
            note = f" ({self.inconclusive} boundary-dependent differences ignored)" if self.inconclusive else ""
            return f"no violation up to bound {self.bound}{note}\n"
        return "violation\n" + self.violation.describe()


def check_substitutable(l_sample: Iterable[str], r: RecognizableRelation, bound: int | None = None) -> SubstitutabilityVerdict:
    lang = frozenset(l_sample)
    if bound is None:
        bound = max((len(w) for w in lang), default=0)
    inconclusive = 0
    for v in violations(lang, r, bound):
        if v.conclusive:
            return SubstitutabilityVerdict(bound, v, inconclusive)
        inconclusive += 1
    return SubstitutabilityVerdict(bound, None, inconclusive)


@dataclass(frozen=True)
class Claim5Witness:
    n: int
    k: int
    x: str
    y: str
    strings: tuple[str, str, str, str]
    members: tuple[bool, bool, bool, bool]

    @property
    def valid(self) -> bool:
        return self.members == (True, True, True, False)

    def describe(self) -> str:
        lines = [f"witness_n={self.n}", f"witness_k={self.k}", f"x={self.x}", f"y={self.y}"]
        for i, (s, m) in enumerate(zip(self.strings, self.members), 1):
            lines.append(f"s{i}={s}")
            lines.append(f"s{i} member: {str(m).lower()}")
        return "\n".join(lines) + "\n"


def find_claim5_witness(r: RecognizableRelation, n_max: int) -> Claim5Witness | None:
    """Pigeonhole two related factors ``b^N a^N ~ b^(N+k) a^(N+k)`` and build the four strings.

    ``N`` ranges over ``1..n_max`` and ``N + k`` over ``N+1..n_max+1``. Membership of all four strings in the ``a S S | b`` language is decided by
    the parser, never assumed.
    """
    g = corpus.claim5()
    for n in range(1, n_max + 1):
        for m in range(n + 1, n_max + 2):
            x, y = "b" * n + "a" * n, "b" * m + "a" * m
            if not r(x, y):
                continue
            k = m - n
            s = (
                "a" * m + x + "b" * (m + 1),
                "a" * m + y + "b" * (m + 1),
                "a" * n + x + "b" * (n + 1),
                "a" * n + y + "b" * (n + 1),
            )
            return Claim5Witness(n, k, x, y, s, tuple(member(g, w) for w in s))
    return None


# cost-shape constant applied to every per-family bound
BOUND_CONSTANT = 4


@dataclass(frozen=True)
class BuildMetrics:
    seconds: float
    desk: int
    max_len: int
    sample_size: int
    nonterminals: int
    counts: dict[str, int]
    bounds: dict[str, int]

    @property
    def rules_total(self) -> int:
        return sum(self.counts.values())

    @property
    def within_bounds(self) -> bool:
        return all(self.counts[f] <= self.bounds[f] for f in self.counts)


def family_bounds(k: Sample, alphabet_size: int) -> dict[str, int]:
    """Upper-bound shapes for each rule family in terms of #K, MaxLen and Desk."""
    n, ml = len(k), k.max_len
    pairs = max(1, ml * (ml - 1))
    return {
        "unary": BOUND_CONSTANT * n * n * pairs * pairs,
        "start": k.desk,
        "branching": BOUND_CONSTANT * n * pairs * max(1, ml - 1),
        "lexical": alphabet_size,
    }


def measure_build(k: Sample | Iterable[str], r: RecognizableRelation) -> BuildMetrics:
    if not isinstance(k, Sample):
        k = Sample(frozenset(k))
    t0 = time.perf_counter()
    hyp = build_hypothesis(k, r)
    seconds = time.perf_counter() - t0
    counts = {name: len(rules) for name, rules in hypothesis_families(k, r).items()}
    return BuildMetrics(
        seconds=seconds,
        desk=k.desk,
        max_len=k.max_len,
        sample_size=len(k),
        nonterminals=len(hyp.nonterminals),
        counts=counts,
        bounds=family_bounds(k, len(r.alphabet)),
    )


def random_sample(desk: int, string_len: int, alphabet="ab", seed: int = 0) -> Sample:
    """Distinct random strings of one length whose lengths add up to ``desk``."""
    if desk % string_len:
        raise ValueError("desk must be a multiple of string_len")
    rng = random.Random(seed)
    want = desk // string_len
    if len(alphabet) ** string_len < want:
        raise ValueError("not enough distinct strings of that length")
    out: set[str] = set()
    while len(out) < want:
        out.add("".join(rng.choice(alphabet) for _ in range(string_len)))
    return Sample(frozenset(out))
