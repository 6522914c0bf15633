"""Seeded generator of random valid expressions for property suites."""

from __future__ import annotations

import random

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
    check_valid,
)
from .trees import RankedAlphabet

__all__ = ["DEFAULT_ALPHABET", "random_expr", "generate_corpus"]

DEFAULT_ALPHABET = RankedAlphabet.parse("f:2,g:1,a:0,b:0")

_WEIGHTS = {
    "symbol": 6,
    "sum": 3,
    "inter": 1,
    "neg": 2,
    "compose": 2,
    "closure": 2,
    "product": 2,
    "star": 2,
}


def _split(rng, indices, parts):
    """Random assignment of ``indices`` to ``parts`` disjoint blocks."""
    blocks = [set() for _ in range(parts)]
    for i in sorted(indices):
        blocks[rng.randrange(parts)].add(i)
    return [frozenset(b) for b in blocks]


def random_expr(
    rng: random.Random,
    depth: int = 4,
    indices=frozenset(),
    alphabet: RankedAlphabet = DEFAULT_ALPHABET,
) -> Expr:
    """A valid expression of AST depth at most ``depth`` with placeholder set ``indices``."""
    indices = frozenset(indices)
    nullary = alphabet.nullary
    if depth == 0 or rng.random() < 0.2:
        if not indices:
            return Symbol(rng.choice(nullary)) if rng.random() < 0.95 else Empty()
        if len(indices) == 1:
            return Eps(next(iter(indices)))
        if depth == 0:
            return Empty(indices)

    ops = dict(_WEIGHTS)
    if len(indices) != 1:
        ops.pop("closure")
    if indices:
        ops.pop("star")
    if len(indices) > 2:
        ops.pop("compose")
    names = list(ops)
    op = rng.choices(names, weights=[ops[k] for k in names])[0]
    sub = depth - 1

    if op == "symbol":
        arities = [k for k in sorted({alphabet[s] for s in alphabet}) if k > 0 or not indices]
        arity = rng.choice(arities)
        if arity == 0:
            return Symbol(rng.choice(nullary))
        name = rng.choice(alphabet.of_arity(arity))
        blocks = _split(rng, indices, arity)
        return Symbol(name, [random_expr(rng, sub, b, alphabet) for b in blocks])
    if op in ("sum", "inter"):
        parts = [random_expr(rng, sub, indices, alphabet) for _ in range(2)]
        return Sum(parts) if op == "sum" else Inter(parts)
    if op == "neg":
        return Neg(random_expr(rng, sub, indices, alphabet))
    if op == "compose":
        k = rng.choice((1, 2))
        head = random_expr(rng, sub, frozenset(range(1, k + 1)), alphabet)
        blocks = _split(rng, indices, k)
        return Compose(head, [random_expr(rng, sub, b, alphabet) for b in blocks])
    if op == "closure":
        (j,) = indices
        return Closure(random_expr(rng, sub, {j}, alphabet))
    if op == "product":
        anchor = rng.choice(nullary)
        return Product(
            random_expr(rng, sub, indices, alphabet), anchor, random_expr(rng, sub, frozenset(), alphabet)
        )
    if op == "star":
        return Star(random_expr(rng, sub, frozenset(), alphabet), rng.choice(nullary))
    raise AssertionError(op)


def generate_corpus(
    count: int = 200,
    seed: int = 0,
    depth: int = 4,
    alphabet: RankedAlphabet = DEFAULT_ALPHABET,
) -> list[Expr]:
    """``count`` distinct valid nullary expressions, reproducible from ``seed``."""
    rng = random.Random(seed)
    seen: dict = {}
    while len(seen) < count:
        e = random_expr(rng, depth, frozenset(), alphabet)
        check_valid(e, alphabet)
        seen.setdefault(e, None)
    return list(seen)
