"""Context-free grammars: CNF conversion, CYK membership, bounded enumeration.

Symbols are plain strings. A rhs symbol is a terminal iff it belongs to the
grammar's alphabet; terminals are single characters and the nonterminal
namespace is kept disjoint from them.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

from .errors import GrammarError

INF = float("inf")


class Production(NamedTuple):
    lhs: str
    rhs: tuple[str, ...]


@dataclass(frozen=True)
class Cfg:
    """A grammar ``(V, Σ, P, S)``.

    ``nonterminals`` and ``productions`` are ordered tuples so that every
    derived object (CNF, typed grammars, printed text) is deterministic.
    A grammar in Chomsky normal form is just a ``Cfg`` for which
    :func:`is_cnf` holds.
    """

    nonterminals: tuple[str, ...]
    alphabet: tuple[str, ...]
    productions: tuple[Production, ...]
    start: str

    def __post_init__(self):
        nts = tuple(dict.fromkeys(self.nonterminals))
        prods = tuple(dict.fromkeys(Production(p[0], tuple(p[1])) for p in self.productions))
        object.__setattr__(self, "nonterminals", nts)
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "productions", prods)
        ntset, sigma = set(nts), set(self.alphabet)
        if len(sigma) != len(self.alphabet):
            raise GrammarError("alphabet symbols must be distinct")
        clash = ntset & sigma
        if clash:
            raise GrammarError(f"names used as both terminal and nonterminal: {sorted(clash)}")
        if self.start not in ntset:
            raise GrammarError(f"start symbol {self.start!r} is not a nonterminal")
        for lhs, rhs in prods:
            if lhs not in ntset:
                raise GrammarError(f"rule lhs {lhs!r} is not a nonterminal")
            for s in rhs:
                if s not in ntset and s not in sigma:
                    raise GrammarError(f"rule {lhs} -> {' '.join(rhs)} uses unknown symbol {s!r}")

    @cached_property
    def terminals(self) -> frozenset[str]:
        return frozenset(self.alphabet)

    def is_terminal(self, s: str) -> bool:
        return s in self.terminals

    @cached_property
    def rules(self) -> dict[str, list[tuple[str, ...]]]:
        out: dict[str, list[tuple[str, ...]]] = {A: [] for A in self.nonterminals}
        for lhs, rhs in self.productions:
            out[lhs].append(rhs)
        return out

    @cached_property
    def _chart(self) -> "_ChartIndex":
        return _ChartIndex(self if _cyk_ready(self) else to_cnf(self))


def empty_grammar(alphabet: Sequence[str], start: str = "S") -> Cfg:
    return Cfg((start,), tuple(alphabet), (), start)


def lenlex_key(alphabet: Sequence[str]):
    """Sort key ordering strings by length, then lexicographically by ``alphabet`` order."""
    rank = {c: i for i, c in enumerate(alphabet)}
    fallback = len(rank)

    def key(w: str):
        return (len(w), tuple(rank.get(c, fallback) for c in w), w)

    return key


def fresh_name(base: str, taken: set[str]) -> str:
    name, i = base, 1
    while name in taken:
        name = f"{base}{i}"
        i += 1
    taken.add(name)
    return name


# ---------------------------------------------------------------------------
# structural analyses

def nullable(g: Cfg) -> set[str]:
    out: set[str] = set()
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            if lhs not in out and all(s in out for s in rhs):
                out.add(lhs)
                changed = True
    return out


def min_lengths(g: Cfg) -> dict[str, float]:
    """Shortest yield length per symbol; ``inf`` marks unproductive nonterminals."""
    best: dict[str, float] = {A: INF for A in g.nonterminals}
    best.update({a: 1 for a in g.alphabet})
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            n = sum(best[s] for s in rhs)
            if n < best[lhs]:
                best[lhs] = n
                changed = True
    return best


def productive(g: Cfg) -> set[str]:
    return {A for A, n in min_lengths(g).items() if n < INF and A not in g.terminals}


def reachable(g: Cfg) -> set[str]:
    seen = {g.start}
    stack = [g.start]
    while stack:
        A = stack.pop()
        for rhs in g.rules[A]:
            for s in rhs:
                if s not in g.terminals and s not in seen:
                    seen.add(s)
                    stack.append(s)
    return seen


def trim(g: Cfg) -> Cfg:
    """Drop nonterminals that derive nothing or cannot be reached from the start."""
    prod = productive(g)
    if g.start not in prod:
        return empty_grammar(g.alphabet, g.start)
    keep = [p for p in g.productions if p.lhs in prod and all(s in prod or g.is_terminal(s) for s in p.rhs)]
    staged = Cfg(tuple(A for A in g.nonterminals if A in prod), g.alphabet, tuple(keep), g.start)
    reach = reachable(staged)
    return Cfg(
        tuple(A for A in staged.nonterminals if A in reach),
        g.alphabet,
        tuple(p for p in keep if p.lhs in reach),
        g.start,
    )


def is_trim(g: Cfg) -> bool:
    return productive(g) == set(g.nonterminals) and reachable(g) == set(g.nonterminals)


def is_cnf(g: Cfg) -> bool:
    start_on_rhs = any(g.start in rhs for _, rhs in g.productions)
    for lhs, rhs in g.productions:
        if len(rhs) == 0:
            if lhs != g.start or start_on_rhs:
                return False
        elif len(rhs) == 1:
            if not g.is_terminal(rhs[0]):
                return False
        elif len(rhs) == 2:
            if g.is_terminal(rhs[0]) or g.is_terminal(rhs[1]):
                return False
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Chomsky normal form

def to_cnf(g: Cfg) -> Cfg:
    """Equivalent grammar in Chomsky normal form.

    Steps run in a fixed order: fresh start, terminal isolation, binarization,
    nullable elimination, unit elimination, useless-symbol removal. The fresh
    start is only introduced when the old start is nullable and occurs on some
    rhs, which is the one case where ``S -> λ`` would leak into derivations.
    """
    taken = set(g.nonterminals) | set(g.alphabet)
    nts = list(g.nonterminals)
    prods = list(g.productions)
    start = g.start

    if any(start in rhs for _, rhs in prods) and start in nullable(g):
        start = fresh_name(g.start + "0", taken)
        nts.insert(0, start)
        prods.insert(0, Production(start, (g.start,)))

    term_nt: dict[str, str] = {}
    isolated = []
    for lhs, rhs in prods:
        if len(rhs) >= 2:
            new_rhs = []
            for s in rhs:
                if s in g.terminals:
                    if s not in term_nt:
                        term_nt[s] = fresh_name(f"T_{s}", taken)
                    s = term_nt[s]
                new_rhs.append(s)
            rhs = tuple(new_rhs)
        isolated.append(Production(lhs, rhs))
    for a, T in term_nt.items():
        nts.append(T)
        isolated.append(Production(T, (a,)))

    binary = []
    for lhs, rhs in isolated:
        while len(rhs) > 2:
            tail = fresh_name(f"{lhs}_", taken)
            nts.append(tail)
            binary.append(Production(lhs, (rhs[0], tail)))
            lhs, rhs = tail, rhs[1:]
        binary.append(Production(lhs, rhs))

    staged = Cfg(tuple(nts), g.alphabet, tuple(binary), start)
    null = nullable(staged)
    no_eps = []
    for lhs, rhs in binary:
        variants = [()]
        for s in rhs:
            if s in null:
                variants = [v + (s,) for v in variants] + variants
            else:
                variants = [v + (s,) for v in variants]
        for v in variants:
            if v:
                no_eps.append(Production(lhs, v))
    if start in null:
        no_eps.append(Production(start, ()))

    # unit elimination: A =>* B through unit rules, then copy B's non-unit rules
    unit_edges: dict[str, set[str]] = {A: set() for A in nts}
    for lhs, rhs in no_eps:
        if len(rhs) == 1 and rhs[0] not in g.terminals:
            unit_edges[lhs].add(rhs[0])
    proper: dict[str, list[tuple[str, ...]]] = {A: [] for A in nts}
    for lhs, rhs in no_eps:
        if not (len(rhs) == 1 and rhs[0] not in g.terminals):
            proper[lhs].append(rhs)
    final = []
    for A in nts:
        order = [A]
        seen = {A}
        i = 0
        while i < len(order):
            for B in sorted(unit_edges[order[i]], key=nts.index):
                if B not in seen:
                    seen.add(B)
                    order.append(B)
            i += 1
        for B in order:
            for rhs in proper[B]:
                if rhs == () and A != start:
                    continue
                final.append(Production(A, rhs))
    return trim(Cfg(tuple(nts), g.alphabet, tuple(final), start))


# ---------------------------------------------------------------------------
# membership

def _cyk_ready(g: Cfg) -> bool:
    """Binary, unit, lexical and start->λ rules only (CNF or hypothesis shape)."""
    start_on_rhs = any(g.start in rhs for _, rhs in g.productions)
    for lhs, rhs in g.productions:
        if len(rhs) == 0:
            if lhs != g.start or start_on_rhs:
                return False
        elif len(rhs) == 2:
            if g.is_terminal(rhs[0]) or g.is_terminal(rhs[1]):
                return False
        elif len(rhs) > 2:
            return False
    return True


class _ChartIndex:
    def __init__(self, g: Cfg):
        self.start = g.start
        self.accepts_empty = any(lhs == g.start and not rhs for lhs, rhs in g.productions)
        parents: dict[str, list[str]] = {}
        lexical: dict[str, set[str]] = {}
        pairs: dict[str, dict[str, set[str]]] = {}
        for lhs, rhs in g.productions:
            if len(rhs) == 1:
                if g.is_terminal(rhs[0]):
                    lexical.setdefault(rhs[0], set()).add(lhs)
                else:
                    parents.setdefault(rhs[0], []).append(lhs)
            elif len(rhs) == 2:
                pairs.setdefault(rhs[0], {}).setdefault(rhs[1], set()).add(lhs)
        self._parents = parents
        self._up: dict[str, frozenset[str]] = {}
        self.lexical = {a: self._close(As) for a, As in lexical.items()}
        self.pairs = {B: {C: self._close(As) for C, As in row.items()} for B, row in pairs.items()}

    def _up_of(self, A: str) -> frozenset[str]:
        # every X with X =>* A through unit rules, A included
        got = self._up.get(A)
        if got is None:
            seen = {A}
            stack = [A]
            while stack:
                for X in self._parents.get(stack.pop(), ()):
                    if X not in seen:
                        seen.add(X)
                        stack.append(X)
            got = self._up[A] = frozenset(seen)
        return got

    def _close(self, As: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for A in As:
            out |= self._up_of(A)
        return frozenset(out)

    def parse(self, w: str) -> bool:
        n = len(w)
        if n == 0:
            return self.accepts_empty
        chart: dict[tuple[int, int], frozenset[str] | set[str]] = {}
        for i, c in enumerate(w):
            cell = self.lexical.get(c)
            if cell is None:
                return False
            chart[i, i + 1] = cell
        for span in range(2, n + 1):
            for i in range(n - span + 1):
                j = i + span
                cell: set[str] = set()
                for k in range(i + 1, j):
                    left, right = chart[i, k], chart[k, j]
                    if not left or not right:
                        continue
                    for B in left:
                        row = self.pairs.get(B)
                        if not row:
                            continue
                        if len(row) < len(right):
                            for C, As in row.items():
                                if C in right:
                                    cell |= As
                        else:
                            for C in right:
                                As = row.get(C)
                                if As:
                                    cell |= As
                chart[i, j] = cell
        return self.start in chart[0, n]


def member(g: Cfg, w: str) -> bool:
    """CYK with unit-rule closure per cell. Grammars of other shapes go through :func:`to_cnf`."""
    return g._chart.parse(w)


# ---------------------------------------------------------------------------
# bounded enumeration

def enumerate_nonterminals(g: Cfg, max_len: int) -> dict[str, set[str]]:
    """For every nonterminal, its yields of length at most ``max_len``.

    Length-stratified fixpoint: level ``n`` is built from shorter levels, then
    closed under the rules that can keep the length unchanged (unit rules and
    rules whose other symbols are nullable).
    """
    minlen = min_lengths(g)
    term = g.terminals
    tables: dict[str, list[set[str]]] = {A: [set() for _ in range(max_len + 1)] for A in g.nonterminals}
    live = [p for p in g.productions if all(minlen[s] < INF for s in p.rhs)]

    def part(s: str, n: int):
        if s in term:
            return (s,) if n == 1 else ()
        return tables[s][n]

    def combos(rhs: tuple[str, ...], n: int) -> set[str]:
        if not rhs:
            return {""} if n == 0 else set()
        if len(rhs) == 1:
            return set(part(rhs[0], n))
        head, rest = rhs[0], rhs[1:]
        rest_min = sum(minlen[s] for s in rest)
        out: set[str] = set()
        for i in range(int(minlen[head]), int(n - rest_min) + 1):
            P = part(head, i)
            if not P:
                continue
            R = combos(rest, n - i)
            if R:
                out.update(p + r for p in P for r in R)
        return out

    # rules through which a symbol can pass its whole length to the lhs
    unit_parents: dict[str, list[str]] = {}
    other_deps: dict[str, list[Production]] = {}
    for p in live:
        if len(p.rhs) == 1 and p.rhs[0] not in term:
            unit_parents.setdefault(p.rhs[0], []).append(p.lhs)
            continue
        for i, s in enumerate(p.rhs):
            if s not in term and all(minlen[t] == 0 for j, t in enumerate(p.rhs) if j != i):
                other_deps.setdefault(s, []).append(p)

    for n in range(max_len + 1):
        work: list[tuple[str, set[str]]] = []
        for p in live:
            got = combos(p.rhs, n)
            new = got - tables[p.lhs][n]
            if new:
                tables[p.lhs][n] |= new
                work.append((p.lhs, new))
        while work:
            B, delta = work.pop()
            for A in unit_parents.get(B, ()):
                new = delta - tables[A][n]
                if new:
                    tables[A][n] |= new
                    work.append((A, new))
            for p in other_deps.get(B, ()):
                new = combos(p.rhs, n) - tables[p.lhs][n]
                if new:
                    tables[p.lhs][n] |= new
                    work.append((p.lhs, new))
    return {A: set().union(*levels) for A, levels in tables.items()}


def enumerate_language(g: Cfg, max_len: int, start: str | None = None) -> set[str]:
    """``{w in L(g) : |w| <= max_len}``, or the same for nonterminal ``start``."""
    if max_len < 0:
        raise ValueError("max_len must be non-negative")
    A = g.start if start is None else start
    return enumerate_nonterminals(trim(_with_start(g, A)), max_len)[A]


def _with_start(g: Cfg, A: str) -> Cfg:
    if A == g.start:
        return g
    if A not in g.nonterminals:
        raise GrammarError(f"unknown nonterminal {A!r}")
    return Cfg(g.nonterminals, g.alphabet, g.productions, A)


def equivalent_up_to(g1: Cfg, g2: Cfg, n: int) -> bool:
    return enumerate_language(g1, n) == enumerate_language(g2, n)


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"""\s*(?:(?P<term>'(?:\\.|[^'\\])')|(?P<eps>\(\))|(?P<bar>\|)|(?P<arrow>->)|(?P<comment>\#.*)|(?P<name>\S+))""")


def _tokens(line: str):
    pos = 0
    line = line.rstrip()
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if m.group("comment") is not None:
            return
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "term":
            value = re.sub(r"\\(.)", r"\1", value[1:-1])
        elif kind == "name" and value.startswith("'"):
            raise GrammarError(f"bad token {value!r}: terminals are single quoted characters")
        yield kind, value
        pos = m.end()


def parse_grammar(text: str) -> Cfg:
    """Read ``start:``/``alphabet:`` headers and ``NT -> alt | alt`` rule lines.

    Terminals are quoted (``'a'``), ``()`` is the empty string. Without a
    ``start:`` line the first lhs is the start; without ``alphabet:`` the
    terminals are taken in order of first appearance.
    """
    start = None
    declared = None
    lhs_seen: list[str] = []
    raw: list[tuple[str, tuple[tuple[str, str], ...]]] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = list(_tokens(line))
        if not toks:
            continue
        head = toks[0]
        if head == ("name", "start:"):
            if len(toks) != 2 or toks[1][0] != "name":
                raise GrammarError(f"line {lineno}: expected 'start: <NT>'")
            start = toks[1][1]
            continue
        if head == ("name", "alphabet:"):
            if any(k != "term" for k, _ in toks[1:]):
                raise GrammarError(f"line {lineno}: alphabet entries must be quoted terminals")
            declared = [v for _, v in toks[1:]]
            continue
        if len(toks) < 2 or head[0] != "name" or toks[1][0] != "arrow":
            raise GrammarError(f"line {lineno}: expected '<NT> -> ...'")
        lhs = head[1]
        lhs_seen.append(lhs)
        alt: list[tuple[str, str]] = []
        for kind, value in toks[2:] + [("bar", "|")]:
            if kind == "bar":
                if not alt:
                    raise GrammarError(f"line {lineno}: empty alternative (write () for the empty string)")
                if any(k == "eps" for k, _ in alt):
                    if len(alt) != 1:
                        raise GrammarError(f"line {lineno}: () must stand alone")
                    alt = []
                raw.append((lhs, tuple(alt)))
                alt = []
            elif kind == "arrow":
                raise GrammarError(f"line {lineno}: unexpected '->'")
            else:
                alt.append((kind, value))
    if start is None:
        if not lhs_seen:
            raise GrammarError("grammar has no rules and no start symbol")
        start = lhs_seen[0]
    lhs_order = list(dict.fromkeys([start] + lhs_seen))
    rank = {A: i for i, A in enumerate(lhs_order)}
    raw.sort(key=lambda r: rank[r[0]])

    symbols = [item for _, alt in raw for item in alt]
    quoted = [v for k, v in symbols if k == "term"]
    bare = [v for k, v in symbols if k == "name"]
    clash = set(quoted) & (set(bare) | set(lhs_order) | {start})
    if clash:
        raise GrammarError(f"names used as both terminal and nonterminal: {sorted(clash)}")
    alphabet = list(dict.fromkeys(quoted)) if declared is None else declared
    for a in alphabet:
        if len(a) != 1:
            raise GrammarError(f"terminals are single characters, got {a!r}")
    missing = set(quoted) - set(alphabet)
    if missing:
        raise GrammarError(f"terminals missing from the declared alphabet: {sorted(missing)}")
    nts = tuple(dict.fromkeys(lhs_order + bare))
    prods = tuple(Production(lhs, tuple(v for _, v in alt)) for lhs, alt in raw)
    return Cfg(nts, tuple(alphabet), prods, start)


def _quote(a: str) -> str:
    return "'" + a.replace("\\", "\\\\").replace("'", "\\'") + "'"


def format_grammar(g: Cfg) -> str:
    lines = [f"start: {g.start}", "alphabet: " + " ".join(_quote(a) for a in g.alphabet)]
    for A in dict.fromkeys((g.start,) + g.nonterminals):
        alts = g.rules.get(A, [])
        if not alts:
            continue
        rendered = [
            " ".join(_quote(s) if g.is_terminal(s) else s for s in rhs) if rhs else "()"
            for rhs in alts
        ]
        lines.append(f"{A} -> " + " | ".join(rendered))
    return "\n".join(lines).rstrip() + "\n"


def load_grammar(path) -> Cfg:
    return parse_grammar(Path(path).read_text(encoding="utf-8"))
