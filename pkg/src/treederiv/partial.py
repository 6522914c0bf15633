"""Bottom-Up partial derivatives: finite sets of derived terms.

The union of the languages of the derived terms is the quotient of the
language of the input.  Members that normalize to a typed empty set are
dropped, so an empty :class:`TermSet` denotes the empty quotient.
"""

from __future__ import annotations

from functools import lru_cache

from .derivation import _check_symbol_pre, _compose_1, _covers, d_eps, restore_indices, target_indices
from .errors import IndexNotPresent
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
    expr_inc_eps,
    expr_key,
    normalize,
    nullable,
    sum_of,
)
from .trees import Hole, Tree, inc_eps

__all__ = ["TermSet", "pd_eps", "pd_symbol", "pd_tree", "set_closure"]


class TermSet(frozenset):
    """A set of normalized expressions; :meth:`ordered` lists them in expression order."""

    def __new__(cls, terms=()):
        kept = (normalize(x) for x in terms)
        return super().__new__(cls, (x for x in kept if not isinstance(x, Empty)))

    def ordered(self) -> list[Expr]:
        return sorted(frozenset.__iter__(self), key=expr_key)

    def __repr__(self):
        return "TermSet({" + ", ".join(str(x) for x in self.ordered()) + "})"

    __str__ = __repr__

    def total(self, indices) -> Expr:
        """The sum of the members, or the typed empty set when there are none."""
        return normalize(sum_of(self.ordered(), indices))


def set_closure(terms: TermSet, indices) -> TermSet:
    """``{(sum of terms)@}``, with the empty set closing to ``{%1}``."""
    if not terms:
        return TermSet((Eps(1),))
    return TermSet((Closure(terms.total(indices)),))


def _members(e) -> tuple:
    return tuple(e) if isinstance(e, (TermSet, frozenset, set, list, tuple)) else (e,)


def pd_eps(e, j: int) -> TermSet:
    """``{d_eps(E, j)}``, extended to sets of expressions by union."""
    out = []
    for x in _members(e):
        out.append(d_eps(x, j))
    return TermSet(out)


def pd_symbol(e, symbol: str, arity: int) -> TermSet:
    out = set()
    for x in _members(e):
        _check_symbol_pre(x, arity)
        out |= _pd(x, symbol, arity)
    return TermSet(out)


@lru_cache(maxsize=1 << 16)
def _pd(e: Expr, a: str, n: int) -> TermSet:
    T = target_indices(e, n)

    if isinstance(e, (Empty, Eps)):
        return TermSet()

    if isinstance(e, Symbol):
        out = []
        for j, child in enumerate(e.children):
            if n and not _covers(child, n):
                continue
            for d in _pd(child, a, n):
                args = [expr_inc_eps(1, c) for c in e.children]
                args[j] = d
                out.append(Symbol(e.name, args))
        if e.name == a and len(e.children) == n and all(
            nullable(c, i) for i, c in enumerate(e.children, 1)
        ):
            out.append(Eps(1))
        return TermSet(out)

    if isinstance(e, Sum):
        return TermSet(x for o in e.operands for x in _pd(o, a, n))
    if isinstance(e, Neg):
        return TermSet((Neg(_pd(e.operand, a, n).total(T)),))
    if isinstance(e, Inter):
        parts = [_pd(o, a, n) for o in e.operands]
        if any(not p for p in parts):
            return TermSet()
        return TermSet((Inter(tuple(p.total(T) for p in parts)),))

    if isinstance(e, Product):
        left, b, right = e.left, e.anchor, e.right
        if a == b:
            return TermSet(
                _compose_1(Product(l, b, right), r) for l in _pd(left, b, 0) for r in _pd(right, b, 0)
            )
        out = [Product(l, b, right) for l in _pd(left, a, n)]
        if n == 0:
            out += [
                _compose_1(Product(l, b, right), r) for l in _pd(left, b, 0) for r in _pd(right, a, 0)
            ]
        return TermSet(out)

    if isinstance(e, Compose):
        return _pd_compose(e, a, n)

    if isinstance(e, Closure):
        out = []
        for d in _pd(e.operand, a, n):
            inner = Compose(e, (d,))
            out.append(Compose(inner, (Eps(1), expr_inc_eps(1, e))) if n == 0 else inner)
        return TermSet(out)

    if isinstance(e, Star):
        b = e.anchor
        closures = set_closure(_pd(e.operand, b, 0), {1})
        if a == b:
            return TermSet(Product(c, b, e) for c in closures)
        return TermSet(
            Product(_compose_1(c, d), b, e) for c in closures for d in _pd(e.operand, a, n)
        )

    raise TypeError(f"not an expression: {e!r}")


def _pd_compose(e: Compose, a: str, n: int) -> TermSet:
    head, args = e.head, e.args
    out = []
    for j, arg in enumerate(args):
        if n and not _covers(arg, n):
            continue
        for d in _pd(arg, a, n):
            new_args = [expr_inc_eps(1, x) for x in args]
            new_args[j] = d
            out.append(Compose(head, new_args))

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
        rest = [expr_inc_eps(1, x) for p, x in enumerate(args) if p not in positions]
        for dh in _pd(cur, a, n):
            out.append(Compose(dh, [Eps(1)] + rest))
    return TermSet(out)


def pd_tree(e, t: Tree) -> TermSet:
    """Partial derivative by a tree, memberwise on sets of expressions."""
    out = set()
    for x in _members(e):
        if not t.indices <= x.indices:
            missing = sorted(t.indices - x.indices)
            raise IndexNotPresent(f"tree {t} uses placeholders {missing} absent from {x}")
        out |= _pd_tree(x, t)
    return TermSet(out)


@lru_cache(maxsize=1 << 16)
def _pd_tree(e: Expr, t: Tree) -> TermSet:
    if isinstance(t, Hole):
        return TermSet((d_eps(e, t.index),))
    k = len(t.children)
    current = TermSet((e,))
    for j in range(k, 0, -1):
        child = inc_eps(k - j, t.children[j - 1])
        current = TermSet(y for x in current for y in _pd_tree(x, child))
    untouched = e.indices - t.indices
    return TermSet(
        restore_indices(y, untouched) for x in current for y in _pd(x, t.symbol, k)
    )
