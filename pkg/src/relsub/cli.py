"""Command-line interface.

Exit status is 0 on success, 1 on domain errors (premise violations, parse
failures, bad relation specs) and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys

from . import harness
from .charset import char_set, type_transform
from .errors import RelsubError
from .grammar import (
    empty_grammar,
    enumerate_language,
    format_grammar,
    lenlex_key,
    load_grammar,
    member,
    to_cnf,
    trim,
)
from .learner import START, initial_state, learn_step
from .relation import parse_spec, relation_from_spec


def _symbols(strings, explicit=None):
    if explicit:
        return list(explicit)
    return list(dict.fromkeys(c for w in strings for c in w))


def _read_lines(path: str) -> list[str]:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


def _print_strings(strings, alphabet, out):
    for w in sorted(strings, key=lenlex_key(alphabet)):
        out.write(w + "\n")


def cmd_relate(args, out):
    r = relation_from_spec(args.relation, _symbols([args.x, args.y], args.alphabet))
    out.write("related\n" if r(args.x, args.y) else "unrelated\n")


def cmd_member(args, out):
    g = load_grammar(args.grammar)
    out.write("true\n" if member(g, args.word) else "false\n")


def cmd_enumerate(args, out):
    g = load_grammar(args.grammar)
    _print_strings(enumerate_language(g, args.max_len), g.alphabet, out)


def cmd_cnf(args, out):
    out.write(format_grammar(to_cnf(load_grammar(args.grammar))))


def _typed(args):
    g = load_grammar(args.grammar)
    r = relation_from_spec(args.relation, g.alphabet)
    return g, trim(type_transform(to_cnf(g), r.morphism))


def cmd_charset(args, out):
    g, typed = _typed(args)
    _print_strings(char_set(typed), g.alphabet, out)


def cmd_type_transform(args, out):
    _, typed = _typed(args)
    out.write(format_grammar(typed))


def cmd_learn(args, out):
    words = _read_lines(args.stream)
    parse_spec(args.relation)
    for i, w in enumerate(words, 1):
        if not w:
            raise RelsubError(f"line {i}: the empty string cannot be presented")
    if not words:
        out.write("=== hypothesis after n=0 ===\n")
        out.write(format_grammar(empty_grammar(tuple(args.alphabet or ()), START)))
        return
    r = relation_from_spec(args.relation, _symbols(words, args.alphabet))
    state = initial_state(r)
    for i, w in enumerate(words, 1):
        nxt = learn_step(state, w)
        if nxt.rebuild_count != state.rebuild_count:
            out.write(f"=== hypothesis after n={i} ===\n")
            out.write(format_grammar(nxt.hypothesis))
        state = nxt


def cmd_convergence(args, out):
    g = load_grammar(args.grammar)
    r = relation_from_spec(args.relation, g.alphabet)
    report = harness.run_convergence(g, r, args.max_len, args.check_len)
    out.write(report.key_values())


def cmd_witness(args, out):
    r = relation_from_spec(args.relation, ["a", "b"])
    w = harness.find_claim5_witness(r, args.max_n)
    if w is None:
        out.write(f"no related pair b^N a^N ~ b^M a^M with N <= {args.max_n}, N < M <= {args.max_n + 1}\n")
    else:
        out.write(w.describe())


def cmd_check(args, out):
    if args.grammar:
        if args.max_len is None:
            raise RelsubError("--grammar needs --max-len")
        g = load_grammar(args.grammar)
        lang = enumerate_language(g, args.max_len)
        alphabet = list(g.alphabet)
        bound = args.max_len
    else:
        lang = set(_read_lines(args.stream))
        alphabet = _symbols(sorted(lang), args.alphabet)
        bound = args.max_len
    r = relation_from_spec(args.relation, alphabet)
    out.write(harness.check_substitutable(lang, r, bound).describe())


def _nat(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("expected a non-negative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relsub", description="Learn CFGs of ~-substitutable languages.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("relate", help="decide x ~ y")
    s.add_argument("--relation", required=True)
    s.add_argument("--alphabet")
    s.add_argument("x")
    s.add_argument("y")
    s.set_defaults(func=cmd_relate)

    s = sub.add_parser("member", help="decide w in L(G)")
    s.add_argument("--grammar", required=True)
    s.add_argument("word")
    s.set_defaults(func=cmd_member)

    s = sub.add_parser("enumerate", help="list L(G) up to a length")
    s.add_argument("--grammar", required=True)
    s.add_argument("--max-len", type=_nat, required=True)
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("cnf", help="print the Chomsky normal form")
    s.add_argument("--grammar", required=True)
    s.set_defaults(func=cmd_cnf)

    for name, func, helptext in (
        ("charset", cmd_charset, "print the characteristic sample of the typed CNF grammar"),
        ("type-transform", cmd_type_transform, "print the grammar typed by the relation's monoid"),
    ):
        s = sub.add_parser(name, help=helptext)
        s.add_argument("--grammar", required=True)
        s.add_argument("--relation", default="trivial")
        s.set_defaults(func=func)

    s = sub.add_parser("learn", help="run the learner over a stream of strings")
    s.add_argument("--relation", default="trivial")
    s.add_argument("--stream", default="-")
    s.add_argument("--alphabet")
    s.set_defaults(func=cmd_learn)

    s = sub.add_parser("experiment", help="experiments")
    ex = s.add_subparsers(dest="experiment", required=True)
    c = ex.add_parser("convergence", help="learn from a length-lex presentation and compare")
    c.add_argument("--grammar", required=True)
    c.add_argument("--relation", default="trivial")
    c.add_argument("--max-len", type=_nat, required=True)
    c.add_argument("--check-len", type=_nat, required=True)
    c.set_defaults(func=cmd_convergence)

    s = sub.add_parser("witness", help="non-substitutability witnesses")
    wx = s.add_subparsers(dest="witness", required=True)
    c = wx.add_parser("nonsubstitutable", help="pigeonhole witness for the a S S | b language")
    c.add_argument("--relation", required=True)
    c.add_argument("--max-n", type=_nat, default=5)
    c.set_defaults(func=cmd_witness)

    s = sub.add_parser("check", help="bounded checks")
    cx = s.add_subparsers(dest="check", required=True)
    c = cx.add_parser("substitutable", help="search for a ~-substitutability violation")
    c.add_argument("--relation", default="trivial")
    src = c.add_mutually_exclusive_group(required=True)
    src.add_argument("--grammar")
    src.add_argument("--stream")
    c.add_argument("--max-len", type=_nat)
    c.add_argument("--alphabet")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except (RelsubError, OSError) as exc:
        print(f"relsub: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
