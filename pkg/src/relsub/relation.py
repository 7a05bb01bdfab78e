"""Recognizable equivalence relations on strings.

A relation is carried by a finite monoid ``M`` (dense element indices and an
operation table), a morphism ``h`` from the free monoid over an alphabet into
``M``, and a set ``F`` of related element pairs: ``x ~ y`` iff
``(h(x), h(y)) in F``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import RelationError, SymbolNotInAlphabet


@dataclass(frozen=True)
class FiniteMonoid:
    op_table: tuple[tuple[int, ...], ...]
    identity: int = 0
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.op_table)
        object.__setattr__(self, "op_table", table)
        n = len(table)
        if n == 0:
            raise RelationError("a monoid needs at least one element")
        for row in table:
            if len(row) != n:
                raise RelationError(f"operation table must be {n}x{n}")
            for v in row:
                if not 0 <= v < n:
                    raise RelationError(f"table entry {v} out of range 0..{n - 1}")
        if not 0 <= self.identity < n:
            raise RelationError(f"identity {self.identity} out of range")
        if self.labels is not None and len(self.labels) != n:
            raise RelationError("one label per element expected")

    @property
    def size(self) -> int:
        return len(self.op_table)

    def op(self, x: int, y: int) -> int:
        return self.op_table[x][y]

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)

    def generated(self, generators: Iterable[int]) -> list[int]:
        """Elements of the submonoid generated by ``generators``, sorted."""
        gens = sorted(set(generators))
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.op_table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def law_violations(self) -> list[str]:
        out = []
        e = self.identity
        for x in range(self.size):
            if self.op_table[e][x] != x:
                out.append(f"identity law: op[{e}][{x}] = {self.op_table[e][x]}, expected {x}")
            if self.op_table[x][e] != x:
                out.append(f"identity law: op[{x}][{e}] = {self.op_table[x][e]}, expected {x}")
        t = np.asarray(self.op_table)
        bad = np.argwhere(t[t, :] != t[:, t])
        if len(bad):
            x, y, z = (int(v) for v in bad[0])
            out.append(f"associativity: fails at ({x},{y},{z}) and {len(bad) - 1} other triples")
        return out


@dataclass(frozen=True)
class MonoidMorphism:
    monoid: FiniteMonoid
    alphabet: tuple[str, ...]
    symbol_map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "symbol_map", tuple(int(v) for v in self.symbol_map))
        if len(set(self.alphabet)) != len(self.alphabet):
            raise RelationError("alphabet symbols must be distinct")
        if len(self.alphabet) != len(self.symbol_map):
            raise RelationError("one image per alphabet symbol expected")
        for v in self.symbol_map:
            if not 0 <= v < self.monoid.size:
                raise RelationError(f"symbol image {v} is not a monoid element")

    @cached_property
    def _images(self) -> dict[str, int]:
        return dict(zip(self.alphabet, self.symbol_map))

    def __call__(self, w: str) -> int:
        images = self._images
        table = self.monoid.op_table
        p = self.monoid.identity
        for c in w:
            try:
                p = table[p][images[c]]
            except KeyError:
                raise SymbolNotInAlphabet(c, self.alphabet) from None
        return p

    def image_of(self, symbol: str) -> int:
        try:
            return self._images[symbol]
        except KeyError:
            raise SymbolNotInAlphabet(symbol, self.alphabet) from None

    def reachable(self) -> list[int]:
        return self.monoid.generated(self.symbol_map)


@dataclass(frozen=True)
class RecognizableRelation:
    morphism: MonoidMorphism
    related_pairs: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(
            self, "related_pairs", frozenset((int(p), int(q)) for p, q in self.related_pairs)
        )

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.morphism.alphabet

    @property
    def monoid(self) -> FiniteMonoid:
        return self.morphism.monoid

    def image(self, w: str) -> int:
        return self.morphism(w)

    def related_images(self, p: int, q: int) -> bool:
        return (p, q) in self.related_pairs

    def __call__(self, x: str, y: str) -> bool:
        return (self.morphism(x), self.morphism(y)) in self.related_pairs


def eval_hom(m: MonoidMorphism, w: str) -> int:
    return m(w)


def related(r: RecognizableRelation, x: str, y: str) -> bool:
    return r(x, y)


def count_occurrences(a: str, w: str) -> int:
    return w.count(a)


def _check_alphabet(alphabet) -> tuple[str, ...]:
    alphabet = tuple(alphabet)
    if not alphabet:
        raise RelationError("alphabet must be nonempty")
    for c in alphabet:
        if len(c) != 1:
            raise RelationError(f"alphabet symbols are single characters, got {c!r}")
    if len(set(alphabet)) != len(alphabet):
        raise RelationError("alphabet symbols must be distinct")
    return alphabet


def _diagonal(n: int) -> frozenset[tuple[int, int]]:
    return frozenset((i, i) for i in range(n))


def make_trivial(alphabet: Sequence[str]) -> RecognizableRelation:
    """The all-pairs relation; substitutability under it is plain substitutability."""
    alphabet = _check_alphabet(alphabet)
    monoid = FiniteMonoid(((0,),), 0, ("1",))
    morphism = MonoidMorphism(monoid, alphabet, (0,) * len(alphabet))
    return RecognizableRelation(morphism, frozenset({(0, 0)}))


def make_kl(k: int, l: int, alphabet: Sequence[str]) -> RecognizableRelation:
    """``x ~ y`` iff ``x == y`` or both lie in ``u Σ* v`` with ``|u| = k``, ``|v| = l``.

    Elements are the strings shorter than ``k + l`` (kept exactly) followed by
    the (k-prefix, l-suffix) pairs of all longer strings.
    """
    alphabet = _check_alphabet(alphabet)
    if k < 0 or l < 0:
        raise RelationError("k and l must be non-negative")
    span = k + l
    short = ["".join(t) for n in range(span) for t in itertools.product(alphabet, repeat=n)]
    pairs = [
        ("".join(u), "".join(v))
        for u in itertools.product(alphabet, repeat=k)
        for v in itertools.product(alphabet, repeat=l)
    ]
    index: dict[object, int] = {s: i for i, s in enumerate(short)}
    for j, p in enumerate(pairs):
        index[p] = len(short) + j
    reps = short + [u + v for u, v in pairs]

    def canon(w: str):
        if len(w) < span:
            return w
        return (w[:k], w[len(w) - l:])

    n = len(reps)
    table = tuple(tuple(index[canon(reps[x] + reps[y])] for y in range(n)) for x in range(n))
    labels = tuple(s or "λ" for s in short) + tuple(f"{u}..{v}" for u, v in pairs)
    monoid = FiniteMonoid(table, index[canon("")], labels)
    morphism = MonoidMorphism(monoid, alphabet, tuple(index[canon(c)] for c in alphabet))
    return RecognizableRelation(morphism, _diagonal(n))


def make_count(a: str, d: int, alphabet: Sequence[str]) -> RecognizableRelation:
    """Counting ``a`` with saturation: elements ``0..d`` and one element for ``> d``."""
    alphabet = _check_alphabet(alphabet)
    if a not in alphabet:
        raise SymbolNotInAlphabet(a, alphabet)
    if d < 0:
        raise RelationError("bound d must be non-negative")
    n = d + 2
    table = tuple(tuple(min(x + y, d + 1) for y in range(n)) for x in range(n))
    labels = tuple(str(i) for i in range(d + 1)) + (f">{d}",)
    monoid = FiniteMonoid(table, 0, labels)
    morphism = MonoidMorphism(monoid, alphabet, tuple(1 if c == a else 0 for c in alphabet))
    return RecognizableRelation(morphism, _diagonal(n))


def make_product(r1: RecognizableRelation, r2: RecognizableRelation) -> RecognizableRelation:
    """Conjunction of two relations over the direct-product monoid."""
    if set(r1.alphabet) != set(r2.alphabet):
        raise RelationError(
            f"alphabet mismatch: {''.join(r1.alphabet)!r} vs {''.join(r2.alphabet)!r}"
        )
    m1, m2 = r1.monoid, r2.monoid
    n2 = m2.size

    def pack(p: int, q: int) -> int:
        return p * n2 + q

    table = tuple(
        tuple(pack(m1.op(x1, y1), m2.op(x2, y2)) for y1 in range(m1.size) for y2 in range(n2))
        for x1 in range(m1.size)
        for x2 in range(n2)
    )
    labels = tuple(f"({m1.label(p)},{m2.label(q)})" for p in range(m1.size) for q in range(n2))
    monoid = FiniteMonoid(table, pack(m1.identity, m2.identity), labels)
    alphabet = r1.alphabet
    symbol_map = tuple(
        pack(r1.morphism.image_of(c), r2.morphism.image_of(c)) for c in alphabet
    )
    pairs = frozenset(
        (pack(p1, p2), pack(q1, q2))
        for p1, q1 in r1.related_pairs
        for p2, q2 in r2.related_pairs
    )
    return RecognizableRelation(MonoidMorphism(monoid, alphabet, symbol_map), pairs)


def validate_relation(r: RecognizableRelation) -> list[str]:
    """Return a list of problems; an empty list means ``r`` is a usable relation.

    ``F`` is only checked on the submonoid the alphabet actually reaches.
    """
    out = r.monoid.law_violations()
    n = r.monoid.size
    for p, q in sorted(r.related_pairs):
        if not (0 <= p < n and 0 <= q < n):
            out.append(f"F: pair ({p},{q}) names a non-element")
    reach = r.morphism.reachable()
    F = r.related_pairs
    for p in reach:
        if (p, p) not in F:
            out.append(f"F: not reflexive at {p}")
    for p in reach:
        for q in reach:
            if (p, q) in F and (q, p) not in F:
                out.append(f"F: not symmetric, ({p},{q}) present without ({q},{p})")
    by_left: dict[int, list[int]] = {}
    reach_set = set(reach)
    for p, q in F:
        if p in reach_set and q in reach_set:
            by_left.setdefault(p, []).append(q)
    for p in reach:
        for q in by_left.get(p, ()):
            for s in by_left.get(q, ()):
                if (p, s) not in F:
                    out.append(f"F: not transitive, ({p},{q}) and ({q},{s}) without ({p},{s})")
    return out


# ---------------------------------------------------------------------------
# monoid table files

_KEY = re.compile(r"^\s*(size|identity|op|hom|F)\s*:(.*)$")


def parse_table(text: str) -> RecognizableRelation:
    """Read the ``size/identity/op/hom/F`` table format."""
    size = identity = None
    rows: list[list[int]] = []
    hom: list[tuple[str, int]] = []
    pairs: list[tuple[int, int]] = []
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _KEY.match(line)
        try:
            if m:
                key, rest = m.group(1), m.group(2).strip()
                section = key
                if key == "size":
                    size = int(rest)
                elif key == "identity":
                    identity = int(rest)
                elif key == "hom":
                    hom.extend(_parse_hom(rest))
                elif rest:
                    raise RelationError(f"line {lineno}: '{key}:' takes its data on following lines")
                continue
            if section == "op":
                rows.append([int(v) for v in line.split()])
            elif section == "F":
                p, q = line.split()
                pairs.append((int(p), int(q)))
            elif section == "hom":
                hom.extend(_parse_hom(line))
            else:
                raise RelationError(f"line {lineno}: unexpected data {line!r}")
        except ValueError as exc:
            if isinstance(exc, RelationError):
                raise
            raise RelationError(f"line {lineno}: cannot parse {line!r}") from None
    if size is None or identity is None:
        raise RelationError("table needs 'size:' and 'identity:'")
    if len(rows) != size:
        raise RelationError(f"expected {size} operation rows, got {len(rows)}")
    if not hom:
        raise RelationError("table needs a 'hom:' line")
    monoid = FiniteMonoid(tuple(map(tuple, rows)), identity)
    alphabet = tuple(s for s, _ in hom)
    _check_alphabet(alphabet)
    morphism = MonoidMorphism(monoid, alphabet, tuple(v for _, v in hom))
    return RecognizableRelation(morphism, frozenset(pairs))


def _parse_hom(text: str) -> list[tuple[str, int]]:
    out = []
    for item in text.split():
        sym, arrow, idx = item.partition("->")
        if not arrow or len(sym) != 1:
            raise RelationError(f"bad hom entry {item!r}, expected <symbol>-><index>")
        out.append((sym, int(idx)))
    return out


def format_table(r: RecognizableRelation) -> str:
    m = r.monoid
    lines = [f"size: {m.size}", f"identity: {m.identity}", "op:"]
    lines += [" ".join(map(str, row)) for row in m.op_table]
    lines.append("hom: " + " ".join(f"{c}->{v}" for c, v in zip(r.alphabet, r.morphism.symbol_map)))
    lines.append("F:")
    lines += [f"{p} {q}" for p, q in sorted(r.related_pairs)]
    return "\n".join(lines) + "\n"


def load_table(path) -> RecognizableRelation:
    return parse_table(Path(path).read_text(encoding="utf-8"))


# ---------------------------------------------------------------------------
# relation spec mini-language

def parse_spec(text: str):
    """Parse a relation spec into a nested tuple.

    ``trivial`` | ``kl:<k>,<l>`` | ``count:<symbol>,<d>`` |
    ``product:(<spec>;<spec>)`` | ``table:<path>``
    """
    text = text.strip()
    if text == "trivial":
        return ("trivial",)
    head, colon, body = text.partition(":")
    if not colon:
        raise RelationError(f"unknown relation spec {text!r}")
    try:
        if head == "kl":
            k, l = body.split(",")
            return ("kl", int(k), int(l))
        if head == "count":
            sym, d = body.rsplit(",", 1)
            if len(sym) != 1:
                raise RelationError(f"count symbol must be one character, got {sym!r}")
            return ("count", sym, int(d))
    except ValueError as exc:
        if isinstance(exc, RelationError):
            raise
        raise RelationError(f"malformed relation spec {text!r}") from None
    if head == "table":
        if not body:
            raise RelationError("table spec needs a path")
        return ("table", body)
    if head == "product":
        if not (body.startswith("(") and body.endswith(")")):
            raise RelationError(f"product spec must be parenthesised: {text!r}")
        inner = body[1:-1]
        depth = 0
        for i, c in enumerate(inner):
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            elif c == ";" and depth == 0:
                return ("product", parse_spec(inner[:i]), parse_spec(inner[i + 1:]))
        raise RelationError(f"product spec needs two operands separated by ';': {text!r}")
    raise RelationError(f"unknown relation spec {text!r}")


def _spec_leaves(tree):
    if tree[0] == "product":
        yield from _spec_leaves(tree[1])
        yield from _spec_leaves(tree[2])
    else:
        yield tree


def relation_from_spec(text: str, alphabet: Iterable[str] = ()) -> RecognizableRelation:
    """Build the relation named by ``text``.

    Table files fix their own alphabet. Otherwise the alphabet is ``alphabet``
    extended by any symbol a ``count`` spec mentions, in order of appearance.
    """
    tree = parse_spec(text)
    leaves = list(_spec_leaves(tree))
    tables = {leaf[1]: load_table(leaf[1]) for leaf in leaves if leaf[0] == "table"}
    wanted = list(dict.fromkeys(alphabet))
    if tables:
        fixed = next(iter(tables.values())).alphabet
        missing = [c for c in wanted if c not in fixed]
        if missing:
            raise SymbolNotInAlphabet(missing[0], fixed)
        sigma = fixed
    else:
        sigma = tuple(dict.fromkeys(wanted + [leaf[1] for leaf in leaves if leaf[0] == "count"]))

    def build(node):
        kind = node[0]
        if kind == "trivial":
            return make_trivial(sigma)
        if kind == "kl":
            return make_kl(node[1], node[2], sigma)
        if kind == "count":
            return make_count(node[1], node[2], sigma)
        if kind == "table":
            return tables[node[1]]
        return make_product(build(node[1]), build(node[2]))

    return build(tree)
