"""Text format for trees and expressions.

Grammar (ASCII, whitespace ignored, ``¬`` accepted for ``!``)::

    expr    := term ('+' term)*
    term    := factor ('&' factor)*
    factor  := unary postfix*
    unary   := '!' unary | atom
    postfix := '*' SYM          iterated product on a nullary symbol
             | '@'              composition closure
             | '.' SYM atom     product on a nullary symbol
             | 'o(' expr (',' expr)* ')'   composition
    atom    := SYM '[' expr (',' expr)* ']' | SYM | '%' INT
             | '0' ('{' INT (',' INT)* '}')? | '(' expr ')'

A symbol name is one letter optionally followed by digits, ``_`` or ``'``,
so ``.af[a]`` reads as the product on ``a`` with right operand ``f[a]``.
Complement binds tighter than the postfix operators:
``!(g[a]*a).af[f[a,a],a]`` is ``(!(g[a]*a)) .a f[f[a,a],a]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import InvalidExpression, ParseError
from .expressions import (
    Closure,
    Compose,
    Empty,
    Eps,
    Expr,
    Inter,
    Neg,
    Product,
    Star,
    Sum,
    Symbol,
    validate,
)
from .trees import Hole, Node, RankedAlphabet, Tree

__all__ = ["SourceSpan", "parse_expr", "parse_tree", "print_expr", "print_tree"]


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<sym>[A-Za-z][0-9_']*)
  | (?P<int>[0-9]+)
  | (?P<punct>[+&!¬*@.()\[\],{}%])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", SourceSpan(pos, pos + 1), text)
        kind = m.lastgroup
        if kind != "ws":
            value = "!" if m.group() == "¬" else m.group()
            tokens.append(_Token(kind, value, SourceSpan(m.start(), m.end())))
        pos = m.end()
    tokens.append(_Token("eof", "", SourceSpan(len(text), len(text))))
    return tokens


class _Parser:
    def __init__(self, text: str, alphabet: RankedAlphabet | None, trees_only: bool):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.trees_only = trees_only
        self.declared = alphabet
        self.arities: dict[str, tuple[int, SourceSpan]] = {}
        # span of every node built, keyed by identity; ``keep`` pins the nodes
        self.spans: dict[int, SourceSpan] = {}
        self.keep: list = []

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def peek(self, offset=1) -> _Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.span, self.text)

    def mark(self, node: Expr, start: _Token) -> Expr:
        end = self.tokens[self.pos - 1].span.end
        self.spans[id(node)] = SourceSpan(start.span.start, end)
        self.keep.append(node)
        return node

    def span_of(self, node: Expr) -> SourceSpan | None:
        return self.spans.get(id(node))

    def expect(self, text) -> _Token:
        if self.tok.text != text or self.tok.kind == "sym":
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return self.advance()

    def is_punct(self, text) -> bool:
        return self.tok.kind == "punct" and self.tok.text == text

    def record(self, name: str, arity: int, tok: _Token):
        if self.declared is not None and name in self.declared and self.declared[name] != arity:
            raise self.error(
                f"arity conflict: {name!r} is declared with arity {self.declared[name]}, used with {arity}",
                tok,
            )
        known = self.arities.get(name)
        if known is not None and known[0] != arity:
            first = known[1]
            raise self.error(
                f"arity conflict: {name!r} first used with arity {known[0]} at {first.start}, "
                f"here with {arity}",
                tok,
            )
        if known is None:
            self.arities[name] = (arity, tok.span)

    def alphabet(self) -> RankedAlphabet:
        entries = [(name, arity) for name, (arity, _) in self.arities.items()]
        if self.declared is not None:
            entries = list(self.declared.items()) + entries
        return RankedAlphabet(entries)

    # -- grammar ------------------------------------------------------------

    def parse_expr(self) -> Expr:
        start = self.tok
        terms = [self.parse_term()]
        while self.is_punct("+"):
            if self.trees_only:
                raise self.error("operator '+' in tree position")
            self.advance()
            terms.append(self.parse_term())
        return terms[0] if len(terms) == 1 else self.mark(Sum(terms), start)

    def parse_term(self) -> Expr:
        start = self.tok
        factors = [self.parse_factor()]
        while self.is_punct("&"):
            if self.trees_only:
                raise self.error("operator '&' in tree position")
            self.advance()
            factors.append(self.parse_factor())
        return factors[0] if len(factors) == 1 else self.mark(Inter(factors), start)

    def parse_factor(self) -> Expr:
        start = self.tok
        e = self.parse_unary()
        while True:
            tok = self.tok
            if tok.kind == "punct" and tok.text in "*@.":
                if self.trees_only:
                    raise self.error(f"operator {tok.text!r} in tree position")
                self.advance()
                if tok.text == "@":
                    e = self.mark(Closure(e), start)
                    continue
                anchor = self.parse_anchor()
                if tok.text == "*":
                    e = self.mark(Star(e, anchor), start)
                else:
                    e = self.mark(Product(e, anchor, self.parse_atom()), start)
            elif tok.kind == "sym" and tok.text == "o" and self.peek().text == "(":
                if self.trees_only:
                    raise self.error("composition in tree position")
                self.advance()
                self.advance()
                args = [self.parse_expr()]
                while self.is_punct(","):
                    self.advance()
                    args.append(self.parse_expr())
                self.expect(")")
                e = self.mark(Compose(e, args), start)
            else:
                return e

    def parse_anchor(self) -> str:
        tok = self.tok
        if tok.kind != "sym":
            raise self.error("expected a nullary symbol")
        self.advance()
        self.record(tok.text, 0, tok)
        return tok.text

    def parse_unary(self) -> Expr:
        if self.is_punct("!"):
            if self.trees_only:
                raise self.error("operator '!' in tree position")
            start = self.advance()
            return self.mark(Neg(self.parse_unary()), start)
        return self.parse_atom()

    def parse_atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "sym":
            self.advance()
            children = []
            if self.is_punct("["):
                self.advance()
                children.append(self.parse_expr())
                while self.is_punct(","):
                    self.advance()
                    children.append(self.parse_expr())
                self.expect("]")
            self.record(tok.text, len(children), tok)
            return self.mark(Symbol(tok.text, children), tok)
        if self.is_punct("%"):
            self.advance()
            num = self.tok
            if num.kind != "int" or int(num.text) < 1:
                raise self.error("expected a positive placeholder index after '%'")
            self.advance()
            return self.mark(Eps(int(num.text)), tok)
        if tok.kind == "int":
            if tok.text != "0":
                raise self.error(f"unexpected number {tok.text!r}")
            if self.trees_only:
                raise self.error("empty set in tree position")
            self.advance()
            indices = []
            if self.is_punct("{"):
                self.advance()
                if not self.is_punct("}"):
                    indices.append(self.parse_index())
                    while self.is_punct(","):
                        self.advance()
                        indices.append(self.parse_index())
                self.expect("}")
            return self.mark(Empty(indices), tok)
        if self.is_punct("("):
            if self.trees_only:
                raise self.error("parenthesis in tree position")
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        found = tok.text or "end of input"
        raise self.error(f"unexpected {found!r}")

    def parse_index(self) -> int:
        tok = self.tok
        if tok.kind != "int" or int(tok.text) < 1:
            raise self.error("expected a positive index")
        self.advance()
        return int(tok.text)

    def finish(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after end of expression")


def parse_expr(text: str, alphabet: RankedAlphabet | None = None) -> tuple[Expr, RankedAlphabet]:
    """Parse ``text`` and return the expression with its (declared + inferred) alphabet.

    The expression is checked for validity; violations are reported as a
    :class:`ParseError`.
    """
    parser = _Parser(text, alphabet, trees_only=False)
    e = parser.parse_expr()
    parser.finish()
    inferred = parser.alphabet()
    violations = validate(e, inferred)
    if violations:
        span = parser.span_of(violations[0].subexpression)
        err = ParseError(f"invalid expression: {'; '.join(map(str, violations))}", span, text)
        err.__cause__ = InvalidExpression(violations)
        raise err
    return e, inferred


def _to_tree(e: Expr) -> Tree:
    if isinstance(e, Eps):
        return Hole(e.index)
    return Node(e.name, tuple(_to_tree(c) for c in e.children))


def parse_tree(text: str, alphabet: RankedAlphabet | None = None) -> Tree:
    """Parse a tree: symbols and ``%j`` placeholders only."""
    parser = _Parser(text, alphabet, trees_only=True)
    e = parser.parse_expr()
    parser.finish()
    try:
        return _to_tree(e)
    except Exception as exc:  # duplicate placeholder
        raise ParseError(str(exc), SourceSpan(0, len(text)), text) from exc


def tree_alphabet(t: Tree) -> RankedAlphabet:
    entries = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Node):
            entries.append((node.symbol, len(node.children)))
            stack.extend(node.children)
    return RankedAlphabet(entries)


# -- printing -----------------------------------------------------------------

_SUM, _INTER, _POSTFIX, _UNARY, _ATOM = range(5)


def _level(e: Expr) -> int:
    if isinstance(e, Sum):
        return _SUM
    if isinstance(e, Inter):
        return _INTER
    if isinstance(e, (Closure, Star, Product, Compose)):
        return _POSTFIX
    if isinstance(e, Neg):
        return _UNARY
    return _ATOM


def _print(e: Expr, min_level: int) -> str:
    text = _raw(e)
    if _level(e) < min_level:
        return f"({text})"
    return text


def _raw(e: Expr) -> str:
    if isinstance(e, Eps):
        return f"%{e.index}"
    if isinstance(e, Empty):
        if not e.indices:
            return "0"
        return "0{" + ",".join(str(i) for i in sorted(e.indices)) + "}"
    if isinstance(e, Symbol):
        if not e.children:
            return e.name
        return f"{e.name}[{','.join(_print(c, _SUM) for c in e.children)}]"
    if isinstance(e, Sum):
        return "+".join(_print(o, _INTER) for o in e.operands)
    if isinstance(e, Inter):
        return "&".join(_print(o, _POSTFIX) for o in e.operands)
    if isinstance(e, Neg):
        return "!" + _print(e.operand, _UNARY)
    if isinstance(e, Closure):
        return _print(e.operand, _POSTFIX) + "@"
    if isinstance(e, Star):
        return f"{_print(e.operand, _POSTFIX)}*{e.anchor}"
    if isinstance(e, Product):
        right = _print(e.right, _ATOM)
        sep = " " if right[0].isdigit() or right[0] in "_'" else ""
        return f"{_print(e.left, _POSTFIX)}.{e.anchor}{sep}{right}"
    if isinstance(e, Compose):
        return f"{_print(e.head, _POSTFIX)}o({','.join(_print(a, _SUM) for a in e.args)})"
    raise TypeError(f"not an expression: {e!r}")


def print_expr(e: Expr) -> str:
    return _raw(e)


def print_tree(t: Tree) -> str:
    return str(t)
