"""Minimal yields, minimal contexts, characteristic sets and monoid typing."""
from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Sequence

from .errors import GrammarError, PremiseViolation
from .grammar import Cfg, Production, fresh_name, is_cnf, is_trim, lenlex_key, trim
from .relation import MonoidMorphism


class Context(NamedTuple):
    left: str
    right: str

    def wrap(self, y: str) -> str:
        return self.left + y + self.right


def context_key(alphabet: Sequence[str]):
    """Order contexts by total flank length, then left, then right (length-lex)."""
    key = lenlex_key(alphabet)

    def ckey(c: Context):
        return (len(c.left) + len(c.right), key(c.left), key(c.right))

    return ckey


@lru_cache(maxsize=64)
def minimal_yields(g: Cfg) -> dict[str, str]:
    """Length-lex least terminal string of every productive nonterminal."""
    key = lenlex_key(g.alphabet)
    best: dict[str, str] = {a: a for a in g.alphabet}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in g.productions:
            if all(s in best for s in rhs):
                cand = "".join(best[s] for s in rhs)
                cur = best.get(lhs)
                if cur is None or key(cand) < key(cur):
                    best[lhs] = cand
                    changed = True
    return {A: w for A, w in best.items() if A not in g.terminals}


def omega(g: Cfg, alpha: str | Sequence[str]) -> str:
    """Least string derivable from the symbol sequence ``alpha``.

    A bare ``str`` is taken as a single symbol name.
    """
    if isinstance(alpha, str):
        alpha = (alpha,)
    best = minimal_yields(g)
    out = []
    for s in alpha:
        if g.is_terminal(s):
            out.append(s)
        elif s in best:
            out.append(best[s])
        elif s in g.nonterminals:
            raise GrammarError(f"nonterminal {s!r} derives no terminal string")
        else:
            raise GrammarError(f"unknown symbol {s!r}")
    return "".join(out)


@lru_cache(maxsize=64)
def minimal_contexts(g: Cfg) -> dict[str, Context]:
    """Least context ``(x, z)`` with ``S =>* x A z`` for every reachable, usable ``A``.

    Fixpoint over rules: a context of ``A`` extends to each rhs occurrence of a
    nonterminal by the minimal yields of its siblings. The ordering is
    preserved by that extension, so relaxing to a fixpoint gives the minimum.
    """
    yields = minimal_yields(g)
    ckey = context_key(g.alphabet)

    def y(s):
        return s if g.is_terminal(s) else yields[s]

    usable = [p for p in g.productions if all(g.is_terminal(s) or s in yields for s in p.rhs)]
    best: dict[str, Context] = {g.start: Context("", "")}
    changed = True
    while changed:
        changed = False
        for lhs, rhs in usable:
            ctx = best.get(lhs)
            if ctx is None:
                continue
            for i, s in enumerate(rhs):
                if g.is_terminal(s):
                    continue
                cand = Context(
                    ctx.left + "".join(y(t) for t in rhs[:i]),
                    "".join(y(t) for t in rhs[i + 1:]) + ctx.right,
                )
                cur = best.get(s)
                if cur is None or ckey(cand) < ckey(cur):
                    best[s] = cand
                    changed = True
    return best


def chi(g: Cfg, A: str) -> Context:
    try:
        return minimal_contexts(g)[A]
    except KeyError:
        raise GrammarError(f"nonterminal {A!r} is not reachable from {g.start!r}") from None


def char_set(g: Cfg) -> set[str]:
    """Characteristic sample: ``ω(β)`` wrapped in the least context of ``A``, per rule ``A -> β``."""
    if not is_trim(g):
        raise GrammarError("characteristic sets need a trim grammar")
    return {chi(g, lhs).wrap(omega(g, rhs)) for lhs, rhs in g.productions}


def type_transform(g: Cfg, m: MonoidMorphism) -> Cfg:
    """Refine every nonterminal ``A`` of a CNF grammar into copies ``A_p``, ``p`` in the monoid.

    ``A_p`` derives exactly the yields ``w`` of ``A`` with ``h(w) = p``. A fresh
    start ``S'`` gets a rule ``S' -> S_p`` for every element ``p``; the result
    is trimmed. Only productive copies are built.
    """
    if not is_cnf(g):
        raise GrammarError("type_transform needs a grammar in Chomsky normal form")
    if any(lhs == g.start and not rhs for lhs, rhs in g.productions):
        raise PremiseViolation("the grammar derives the empty string")
    M = m.monoid
    for a in g.alphabet:
        m.image_of(a)

    typed: dict[str, set[int]] = {A: set() for A in g.nonterminals}
    for lhs, rhs in g.productions:
        if len(rhs) == 1:
            typed[lhs].add(m.image_of(rhs[0]))
    binary = [(lhs, rhs) for lhs, rhs in g.productions if len(rhs) == 2]
    changed = True
    while changed:
        changed = False
        for lhs, (B, C) in binary:
            for p in list(typed[B]):
                for q in list(typed[C]):
                    r = M.op(p, q)
                    if r not in typed[lhs]:
                        typed[lhs].add(r)
                        changed = True

    def name(A, p):
        return f"{A}_{p}"

    taken = {name(A, p) for A in g.nonterminals for p in range(M.size)} | set(g.alphabet)
    new_start = fresh_name(g.start + "'", taken)
    prods = [Production(new_start, (name(g.start, p),)) for p in sorted(typed[g.start])]
    for lhs, rhs in g.productions:
        if len(rhs) == 1:
            prods.append(Production(name(lhs, m.image_of(rhs[0])), rhs))
        else:
            B, C = rhs
            for p in sorted(typed[B]):
                for q in sorted(typed[C]):
                    prods.append(Production(name(lhs, M.op(p, q)), (name(B, p), name(C, q))))
    nts = [new_start] + [name(A, p) for A in g.nonterminals for p in sorted(typed[A])]
    return trim(Cfg(tuple(nts), g.alphabet, tuple(prods), new_start))


def split_typed_name(name: str) -> tuple[str, int]:
    """Inverse of the ``A_p`` naming used by :func:`type_transform`."""
    base, _, p = name.rpartition("_")
    return base, int(p)
