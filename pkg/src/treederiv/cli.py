"""Command-line entry point: ``treederiv VERB ...``.

Exit status is 0 on success, 1 on a domain error (parse, arity, validity,
missing index) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys

from .automaton import (
    accepts,
    build_derivative_automaton,
    is_deterministic,
    membership_via_rounds,
    naive_pd_automaton,
    to_dot,
    to_json,
)
from .derivation import d_tree
from .errors import TreeDerivError
from .oracle import enumerate_language, member_bruteforce
from .partial import pd_tree
from .syntax import parse_expr, parse_tree, tree_alphabet
from .trees import RankedAlphabet

__all__ = ["main", "build_parser"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: error: {message}")


def _alphabet_arg(text: str) -> RankedAlphabet:
    try:
        return RankedAlphabet.parse(text)
    except (ValueError, TreeDerivError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _non_negative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treederiv", description="Bottom-Up derivatives of regular tree expressions.")
    parser.add_argument(
        "--alphabet",
        type=_alphabet_arg,
        default=None,
        help='ranked alphabet such as "f:2,g:1,a:0"; merged with the symbols of the inputs',
    )
    verbs = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = verbs.add_parser("derive", help="derivative by each tree in turn")
    p.add_argument("expr")
    p.add_argument("trees", nargs="+")

    p = verbs.add_parser("pderive", help="partial derivative by each tree in turn")
    p.add_argument("expr")
    p.add_argument("trees", nargs="+")

    for name, text in (
        ("automaton", "derivative tree automaton"),
        ("naive-pd-automaton", "UNSOUND automaton built from partial derivatives"),
    ):
        p = verbs.add_parser(name, help=text)
        p.add_argument("expr")
        p.add_argument("--max-rounds", type=_positive, default=32)
        p.add_argument("--format", choices=("text", "dot", "json"), default="text")
        p.add_argument("--omit-sink", action="store_true", help="drop the 0{1} state in DOT output")

    p = verbs.add_parser("member", help="membership through derivative rounds")
    p.add_argument("expr")
    p.add_argument("tree")

    p = verbs.add_parser("oracle-member", help="membership by brute-force enumeration")
    p.add_argument("expr")
    p.add_argument("tree")

    p = verbs.add_parser("enumerate", add_help=False, help="trees of the language up to a height")
    p.add_argument("--help", action="help", help="show this help message and exit")
    p.add_argument("expr")
    p.add_argument("-h", "--height", type=_non_negative, default=3)
    return parser


def _read_inputs(args):
    e, alphabet = parse_expr(args.expr, args.alphabet)
    trees = []
    for text in getattr(args, "trees", None) or ([args.tree] if hasattr(args, "tree") else []):
        t = parse_tree(text, alphabet)
        alphabet = alphabet.merge(tree_alphabet(t))
        trees.append(t)
    return e, alphabet, trees


def _print_automaton(args, automaton, trace, out, banner=None):
    if args.format == "dot":
        out.write(to_dot(automaton, omit_sink=args.omit_sink))
        return
    if args.format == "json":
        out.write(to_json(automaton, trace) + "\n")
        return
    if banner:
        out.write(banner + "\n")
    out.write(f"states: {len(automaton.labels)}\n")
    out.write(f"rounds: {trace.rounds_used}\n")
    out.write(f"fixed_point: {str(trace.fixed_point).lower()}\n")
    out.write(f"deterministic: {str(is_deterministic(automaton)).lower()}\n")
    for q, label in enumerate(automaton.labels):
        mark = "*" if q in automaton.finals else " "
        out.write(f"{mark} q{q} = {label}\n")
    for args_, symbol, target in automaton.sorted_transitions():
        inputs = ",".join(f"q{q}" for q in args_)
        out.write(f"  {symbol}({inputs}) -> q{target}\n")


def _dispatch(args, out, err):
    e, alphabet, trees = _read_inputs(args)
    verb = args.verb
    if verb == "derive":
        for t in trees:
            out.write(f"{d_tree(e, t)}\n")
    elif verb == "pderive":
        for t in trees:
            terms = pd_tree(e, t).ordered()
            out.write(f"# {t}: {len(terms)} term(s)\n" if len(trees) > 1 else "")
            for x in terms:
                out.write(f"{x}\n")
    elif verb == "automaton":
        automaton, trace = build_derivative_automaton(e, args.max_rounds, alphabet)
        _print_automaton(args, automaton, trace, out)
    elif verb == "naive-pd-automaton":
        automaton, trace = naive_pd_automaton(e, args.max_rounds, alphabet)
        banner = "UNSOUND: naive partial-derivative construction; may accept trees outside the language"
        if args.format == "text":
            _print_automaton(args, automaton, trace, out, banner)
        else:
            err.write(banner + "\n")
            _print_automaton(args, automaton, trace, out)
    elif verb == "member":
        out.write(f"{str(membership_via_rounds(e, trees[0], alphabet)).lower()}\n")
    elif verb == "oracle-member":
        out.write(f"{str(member_bruteforce(trees[0], e, alphabet)).lower()}\n")
    elif verb == "enumerate":
        for t in enumerate_language(e, args.height, alphabet).sorted():
            out.write(f"{t}\n")
    return 0


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        err.write(parser.format_usage())
        err.write(f"{exc}\n")
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _dispatch(args, out, err)
    except (TreeDerivError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
