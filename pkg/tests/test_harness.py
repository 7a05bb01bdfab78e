import random
import re

import pytest

from relsub import corpus
from relsub.charset import Context
from relsub.errors import InvalidSample, PremiseViolation
from relsub.grammar import empty_grammar, enumerate_language, member, parse_grammar
from relsub.harness import (
    BOUND_CONSTANT,
    Violation,
    check_substitutable,
    completeness_check,
    family_bounds,
    find_claim5_witness,
    measure_build,
    presentation_lenlex,
    random_sample,
    run_convergence,
    soundness_check,
    violations,
)
from relsub.learner import Sample, build_hypothesis
from relsub.relation import make_count, make_kl, make_product, make_trivial

from oracles import strings_upto

AB = ("a", "b")
TRIVIAL = make_trivial(AB)
COUNT1 = make_count("a", 1, AB)
KL11 = make_kl(1, 1, AB)


# --- presentations ----------------------------------------------------------------

def test_presentation_examples():
    assert presentation_lenlex(corpus.claim5(), 5) == ["b", "abb", "aabbb", "ababb"]
    assert presentation_lenlex(corpus.anbn(), 6) == ["ab", "aabb", "aaabbb"]
    assert presentation_lenlex(empty_grammar(AB), 6) == []
    with pytest.raises(PremiseViolation):
        presentation_lenlex(parse_grammar("S -> 'a' S | ()"), 3)


# --- convergence --------------------------------------------------------------------

def test_convergence_l2_count():
    rep = run_convergence(corpus.l2(), COUNT1, 8, 12)
    assert rep.converged and rep.final_equivalent
    assert rep.overgenerated is None and rep.undergenerated is None
    assert rep.convergence_index <= rep.presented
    assert len(rep.timings) == len(rep.sizes) == rep.presented


def test_convergence_ancbn_trivial():
    g = corpus.ancbn()
    rep = run_convergence(g, make_trivial(g.alphabet), 9, 13)
    assert rep.converged and rep.final_equivalent


def test_convergence_anbn_trivial_overgenerates():
    # {a^n b^n} is not substitutable: a and aab share (λ, b) but not (λ, abb)
    rep = run_convergence(corpus.anbn(), TRIVIAL, 8, 12)
    assert rep.converged
    assert not rep.final_equivalent
    assert rep.overgenerated == "aababb"
    assert not member(corpus.anbn(), rep.overgenerated)


def test_convergence_claim5_kl_reaches_target_on_lenlex_run():
    # the length-lex prefix happens to avoid the pigeonhole strings
    rep = run_convergence(corpus.claim5(), KL11, 9, 12)
    assert rep.converged and rep.convergence_index == 4
    assert rep.final_equivalent


def test_sizes_are_monotone_along_presentation():
    rep = run_convergence(corpus.l2(), COUNT1, 7, 7)
    desks = [s[0] for s in rep.sizes]
    assert desks == sorted(desks)


def test_hypotheses_monotone_along_presentation():
    words = presentation_lenlex(corpus.l2(), 6)
    prev = set()
    for m in range(1, len(words) + 1):
        cur = enumerate_language(build_hypothesis(words[:m], COUNT1), 7)
        assert prev <= cur
        prev = cur


def test_key_values_keys():
    rep = run_convergence(corpus.l2(), COUNT1, 5, 6)
    keys = [line.split("=")[0] for line in rep.key_values().splitlines()]
    assert keys == ["converged", "convergence_index", "final_equivalent", "rebuilds", "desk", "rules_total"]
    assert run_convergence(empty_grammar(AB), TRIVIAL, 4, 4).key_values().splitlines()[1] == "convergence_index=none"


# --- completeness and soundness -------------------------------------------------------

def test_completeness_anbn():
    rep = completeness_check(corpus.anbn(), TRIVIAL, 12)
    assert rep.sample == ("ab", "aabb")
    assert rep.desk == 6
    assert rep.holds and rep.missing is None


def test_completeness_single_rule():
    rep = completeness_check(parse_grammar("S -> 'a'"), TRIVIAL, 5)
    assert rep.sample == ("a",) and rep.holds


def test_completeness_l2_count():
    rep = completeness_check(corpus.l2(), COUNT1, 10)
    assert rep.holds
    assert all(member(corpus.l2(), w) for w in rep.sample)


@pytest.mark.parametrize("r", [TRIVIAL, KL11, COUNT1, make_product(KL11, COUNT1)], ids=["trivial", "kl11", "count1", "prod"])
def test_completeness_for_every_relation(r):
    for g in (corpus.anbn(), corpus.claim5(), corpus.l2()):
        assert completeness_check(g, r, 9).holds


def test_soundness_l2_on_subsets():
    words = presentation_lenlex(corpus.l2(), 6)
    for m in range(1, len(words) + 1, 3):
        assert soundness_check(corpus.l2(), COUNT1, words[:m], 10).holds
    assert soundness_check(corpus.l2(), COUNT1, words[::2], 10).holds


def test_soundness_claim5_negative_control():
    k = ["ababb", "aababbb", "aabbaabbb"]
    rep = soundness_check(corpus.claim5(), KL11, k, 10)
    assert not rep.holds
    assert rep.offending == "abbaabb"


def test_soundness_rejects_foreign_sample():
    with pytest.raises(InvalidSample):
        soundness_check(corpus.anbn(), TRIVIAL, ["ab", "ba"], 6)


# --- substitutability check -----------------------------------------------------------

def _brute_violation_exists(lang, r, bound):
    """Conclusive Definition-style violation by trying every context explicitly."""
    subs = {w[i:j] for w in lang for i in range(len(w)) for j in range(i + 1, len(w) + 1)}

    def dist(x):
        return {(w[:i], w[i + len(x):]) for w in lang for i in range(len(w) - len(x) + 1) if w[i:i + len(x)] == x}

    for x in subs:
        for y in subs:
            if x == y or not r(x, y):
                continue
            dx, dy = dist(x), dist(y)
            if dx & dy and any(len(l) + len(rr) + len(y) <= bound for l, rr in dx - dy):
                return True
    return False


def test_check_l2_count_has_no_violation():
    lang = enumerate_language(corpus.l2(), 8)
    v = check_substitutable(lang, COUNT1, 8)
    assert v.substitutable
    assert v.describe().startswith("no violation up to bound 8")


def test_check_ancbn_trivial_has_no_violation():
    g = corpus.ancbn()
    assert check_substitutable(enumerate_language(g, 9), make_trivial(g.alphabet), 9).substitutable


def test_check_anbn_trivial_violation():
    v = check_substitutable(enumerate_language(corpus.anbn(), 10), TRIVIAL, 10)
    assert not v.substitutable
    assert (v.violation.x, v.violation.y) == ("a", "aab")
    assert v.violation.distinguishing.wrap("aab") == "aababb"


@pytest.mark.parametrize("k,l", [(1, 1), (1, 2), (2, 1), (2, 2)])
def test_check_l2_kl_pattern(k, l):
    lang = enumerate_language(corpus.l2(), 8)
    r = make_kl(k, l, AB)
    x, y = "b" * k + "b" + "b" * l, "b" * k + "a" + "b" * l
    found = [v for v in violations(lang, r, 8) if (v.x, v.y) == (x, y)]
    assert found and found[0].conclusive
    c = found[0].distinguishing
    assert set(c.left) <= {"b"} and re.fullmatch("ab*", c.right)
    assert not check_substitutable(lang, r, 8).substitutable


def test_check_claim5_kl_violation():
    lang = enumerate_language(corpus.claim5(), 9)
    v = check_substitutable(lang, KL11, 9)
    assert v.violation is not None and v.violation.conclusive
    x, y = v.violation.x, v.violation.y
    assert KL11(x, y)
    assert member(corpus.claim5(), v.violation.shared.wrap(x))
    assert member(corpus.claim5(), v.violation.shared.wrap(y))
    assert member(corpus.claim5(), v.violation.distinguishing.wrap(x))
    assert not member(corpus.claim5(), v.violation.distinguishing.wrap(y))


def test_check_agrees_with_brute_force_on_finite_languages():
    pool = [w for w in strings_upto(AB, 4) if w]
    rng = random.Random(7)
    for _ in range(40):
        lang = set(rng.sample(pool, rng.randint(1, 8)))
        for r in (TRIVIAL, COUNT1, KL11):
            assert check_substitutable(lang, r, 4).substitutable == (not _brute_violation_exists(lang, r, 4))


def test_violation_describe():
    text = Violation("a", "b", Context("", "x"), Context("y", ""), True).describe()
    assert text.splitlines() == ["x=a", "y=b", "shared=(λ, x)", "distinguishing=(y, λ)", "conclusive"]


# --- claim 5 witness --------------------------------------------------------------------

def test_witness_kl11():
    w = find_claim5_witness(KL11, 5)
    assert (w.n, w.k) == (1, 1)
    assert w.strings == ("aababbb", "aabbaabbb", "ababb", "abbaabb")
    assert w.members == (True, True, True, False) and w.valid
    assert w.describe().rstrip().endswith("s4 member: false")


@pytest.mark.parametrize("r,n_max", [(COUNT1, 5), (TRIVIAL, 1), (make_kl(2, 2, AB), 5), (make_product(KL11, COUNT1), 5)])
def test_witness_found_and_valid(r, n_max):
    w = find_claim5_witness(r, n_max)
    assert w is not None and w.valid
    assert r(w.x, w.y)
    assert [member(corpus.claim5(), s) for s in w.strings] == [True, True, True, False]


def test_witness_trivial_smallest_bound():
    w = find_claim5_witness(TRIVIAL, 1)
    assert (w.n, w.k) == (1, 1) and w.valid
    assert find_claim5_witness(TRIVIAL, 0) is None


def test_witness_none_when_monoid_separates():
    # count with a large threshold keeps b^N a^N apart for small N
    assert find_claim5_witness(make_count("a", 9, AB), 5) is None


# --- build metrics ----------------------------------------------------------------------

def test_measure_build_examples():
    m = measure_build({"ab"}, TRIVIAL)
    assert m.rules_total == 4
    assert m.counts == {"start": 1, "branching": 1, "unary": 0, "lexical": 2}
    empty = measure_build(set(), TRIVIAL)
    assert empty.rules_total == 0 and empty.nonterminals == 1


def test_measure_build_within_bounds():
    for desk in (50, 200):
        k = random_sample(desk, 10, "ab", seed=desk)
        assert k.desk == desk
        m = measure_build(k, TRIVIAL)
        assert m.within_bounds
        assert m.counts["start"] == len(k)


def test_family_bounds_shape():
    k = Sample(frozenset({"abc"}))
    b = family_bounds(k, 3)
    assert b["unary"] == BOUND_CONSTANT * 1 * 36
    assert b["start"] == 3 and b["lexical"] == 3


def test_random_sample_errors():
    with pytest.raises(ValueError):
        random_sample(55, 10)
    with pytest.raises(ValueError):
        random_sample(50, 2)
    assert random_sample(40, 10, seed=1) == random_sample(40, 10, seed=1)
