"""Bottom-Up derivatives of expressions by placeholders, symbols and trees.

Every public function returns a normalized expression, so derivatives can
be compared syntactically (this is how automaton states are identified).
"""

from __future__ import annotations

from functools import lru_cache

from .errors import IndexNotPresent, MissingIndices
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
    _remap,
    expr_inc_eps,
    normalize,
    nullable,
    sum_of,
)
from .trees import Hole, Tree, inc_eps

__all__ = ["d_eps", "d_symbol", "d_tree", "target_indices", "restore_indices"]


def target_indices(e: Expr, n: int) -> frozenset:
    """Index set of any derivative of ``e`` by a symbol of arity ``n``."""
    return frozenset({1} | {x + 1 for x in e.indices if x > n})


def _eps_shift(e: Expr, j: int) -> Expr:
    return _remap(e, lambda x: 1 if x == j else x + 1)


@lru_cache(maxsize=1 << 16)
def d_eps(e: Expr, j: int) -> Expr:
    """Move placeholder ``j`` to position 1 and shift every other index up by one."""
    if j not in e.indices:
        raise IndexNotPresent(f"placeholder {j} is not an index of {e}")
    return normalize(_eps_shift(e, j))


def _check_symbol_pre(e: Expr, n: int):
    missing = [i for i in range(1, n + 1) if i not in e.indices]
    if missing:
        raise MissingIndices(
            f"deriving by a symbol of arity {n} needs indices 1..{n}; {e} lacks {missing}"
        )


def d_symbol(e: Expr, symbol: str, arity: int, *, raw: bool = False) -> Expr:
    """Derivative of ``e`` by ``symbol`` of the given arity.

    With ``raw=True`` the top-level result is returned before normalization
    (subterms are still normalized); this exposes the Boolean
    homomorphism shape for testing.
    """
    _check_symbol_pre(e, arity)
    if raw:
        return _d(e, symbol, arity)
    return _d_norm(e, symbol, arity)


@lru_cache(maxsize=1 << 16)
def _d_norm(e: Expr, symbol: str, n: int) -> Expr:
    return normalize(_d(e, symbol, n))


def _covers(e: Expr, n: int) -> bool:
    return all(i in e.indices for i in range(1, n + 1))


def _compose_1(head: Expr, first: Expr) -> Expr:
    """``head o_1 first``: graft ``first`` on the smallest index, keep the others."""
    rest = sorted(head.indices)[1:]
    return Compose(head, (first,) + tuple(Eps(i) for i in rest))


def _d(e: Expr, a: str, n: int) -> Expr:
    if isinstance(e, (Empty, Eps)):
        return Empty(target_indices(e, n))

    if isinstance(e, Symbol):
        terms = []
        for j, child in enumerate(e.children):
            if n and not _covers(child, n):
                continue
            args = [expr_inc_eps(1, c) for c in e.children]
            args[j] = _d_norm(child, a, n)
            terms.append(Symbol(e.name, args))
        if e.name == a and len(e.children) == n and all(
            nullable(c, i) for i, c in enumerate(e.children, 1)
        ):
            terms.append(Eps(1))
        return sum_of(terms, target_indices(e, n))

    if isinstance(e, Sum):
        return Sum(tuple(_d_norm(o, a, n) for o in e.operands))
    if isinstance(e, Inter):
        return Inter(tuple(_d_norm(o, a, n) for o in e.operands))
    if isinstance(e, Neg):
        return Neg(_d_norm(e.operand, a, n))

    if isinstance(e, Product):
        left, b, right = e.left, e.anchor, e.right
        if a == b:
            return _compose_1(Product(_d_norm(left, b, 0), b, right), _d_norm(right, b, 0))
        first = Product(_d_norm(left, a, n), b, right)
        if n == 0:
            second = _compose_1(Product(_d_norm(left, b, 0), b, right), _d_norm(right, a, 0))
            return Sum((first, second))
        return first

    if isinstance(e, Compose):
        return _d_compose(e, a, n)

    if isinstance(e, Closure):
        inner = Compose(e, (_d_norm(e.operand, a, n),))
        if n == 0:
            return Compose(inner, (Eps(1), expr_inc_eps(1, e)))
        return inner

    if isinstance(e, Star):
        b = e.anchor
        closure = Closure(_d_norm(e.operand, b, 0))
        if a == b:
            return Product(closure, b, e)
        return Product(Compose(closure, (_d_norm(e.operand, a, n),)), b, e)

    raise TypeError(f"not an expression: {e!r}")


def _d_compose(e: Compose, a: str, n: int) -> Expr:
    head, args = e.head, e.args
    terms = []
    for j, arg in enumerate(args):
        if n and not _covers(arg, n):
            continue
        new_args = [expr_inc_eps(1, x) for x in args]
        new_args[j] = _d_norm(arg, a, n)
        terms.append(Compose(head, new_args))

    # the symbol sits in the head, its children are placeholders filled by args
    positions = []
    for l in range(1, n + 1):
        p = next((p for p, arg in enumerate(args) if nullable(arg, l)), None)
        if p is None:
            break
        positions.append(p)
    else:
        head_order = sorted(head.indices)
        cur = head
        for shift, p in enumerate(reversed(positions)):
            cur = d_eps(cur, head_order[p] + shift)
        dh = _d_norm(cur, a, n)
        rest = [expr_inc_eps(1, x) for p, x in enumerate(args) if p not in positions]
        terms.append(Compose(dh, [Eps(1)] + rest))

    return sum_of(terms, target_indices(e, n))


def restore_indices(e: Expr, untouched) -> Expr:
    """Positional renaming ``o(%1, %(y+1)...)`` closing a tree derivative."""
    order = sorted(e.indices)
    targets = [1] + [y + 1 for y in sorted(untouched)]
    if len(order) != len(targets):
        raise AssertionError(f"index bookkeeping mismatch: {order} vs {targets}")
    table = dict(zip(order, targets))
    return _remap(e, table.__getitem__)


def d_tree(e: Expr, t: Tree) -> Expr:
    """Derivative of ``e`` by the tree ``t`` (placeholders of ``t`` must index ``e``)."""
    if not t.indices <= e.indices:
        missing = sorted(t.indices - e.indices)
        raise IndexNotPresent(f"tree {t} uses placeholders {missing} absent from {e}")
    return _d_tree(e, t)


@lru_cache(maxsize=1 << 16)
def _d_tree(e: Expr, t: Tree) -> Expr:
    if isinstance(t, Hole):
        return d_eps(e, t.index)
    k = len(t.children)
    cur = e
    for j in range(k, 0, -1):
        cur = _d_tree(cur, inc_eps(k - j, t.children[j - 1]))
    cur = d_symbol(cur, t.symbol, k)
    return normalize(restore_indices(cur, e.indices - t.indices))
