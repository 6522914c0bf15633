"""Extended regular tree expressions.

The AST covers symbols, indexed placeholders, typed empty sets, the Boolean
operators ``+`` (sum), ``&`` (intersection) and ``!`` (complement),
composition, composition closure, the ``a``-product and its iteration.

Every node carries its placeholder index set (``expr.indices``) and a cached
hash, so expressions can be used as dictionary keys and automaton states.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import InvalidExpression, NonInjectiveMap
from .trees import RankedAlphabet

__all__ = [
    "Expr",
    "Symbol",
    "Eps",
    "Empty",
    "Sum",
    "Inter",
    "Neg",
    "Compose",
    "Closure",
    "Product",
    "Star",
    "sym",
    "Violation",
    "expr_eps_indices",
    "validate",
    "check_valid",
    "nullable",
    "remap_eps",
    "expr_inc_eps",
    "normalize",
    "expr_key",
    "expr_order",
    "sum_of",
    "alphabet_of",
    "may_contain_symbol",
]


class Expr:
    __slots__ = ("indices", "_hash", "_key")

    def _fields(self) -> tuple:
        raise NotImplementedError

    def _init(self, indices):
        self.indices = frozenset(indices)
        self._hash = hash((type(self).__name__,) + self._fields())
        self._key = None

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is type(self)
            and other._hash == self._hash
            and other._fields() == self._fields()
        )

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return expr_key(self) < expr_key(other)

    def __str__(self):
        from .syntax import print_expr

        return print_expr(self)

    def __repr__(self):
        return f"{type(self).__name__}({self})"


class Symbol(Expr):
    __slots__ = ("name", "children")

    def __init__(self, name: str, children=()):
        self.name = name
        self.children = tuple(children)
        self._init(frozenset().union(*(c.indices for c in self.children)))

    def _fields(self):
        return (self.name, self.children)


class Eps(Expr):
    __slots__ = ("index",)

    def __init__(self, index: int):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"placeholder index must be a positive int, got {index!r}")
        self.index = index
        self._init((index,))

    def _fields(self):
        return (self.index,)


class Empty(Expr):
    """The empty language typed by an index set (``0{1,2}``)."""

    __slots__ = ()

    def __init__(self, indices=()):
        indices = frozenset(indices)
        if any(not isinstance(i, int) or i < 1 for i in indices):
            raise ValueError(f"empty-set indices must be positive ints, got {sorted(indices)!r}")
        self._init(indices)

    def _fields(self):
        return (tuple(sorted(self.indices)),)


class Sum(Expr):
    __slots__ = ("operands",)

    def __init__(self, operands):
        self.operands = tuple(operands)
        if not self.operands:
            raise ValueError("a sum needs at least one operand")
        self._init(frozenset().union(*(o.indices for o in self.operands)))

    def _fields(self):
        return (self.operands,)


class Inter(Expr):
    __slots__ = ("operands",)

    def __init__(self, operands):
        self.operands = tuple(operands)
        if not self.operands:
            raise ValueError("an intersection needs at least one operand")
        self._init(frozenset().union(*(o.indices for o in self.operands)))

    def _fields(self):
        return (self.operands,)


class Neg(Expr):
    __slots__ = ("operand",)

    def __init__(self, operand: Expr):
        self.operand = operand
        self._init(operand.indices)

    def _fields(self):
        return (self.operand,)


class Compose(Expr):
    """``head o(args...)``: graft ``args[i]`` on the i-th smallest index of ``head``."""

    __slots__ = ("head", "args")

    def __init__(self, head: Expr, args):
        self.head = head
        self.args = tuple(args)
        self._init(frozenset().union(*(a.indices for a in self.args)))

    def _fields(self):
        return (self.head, self.args)


class Closure(Expr):
    __slots__ = ("operand",)

    def __init__(self, operand: Expr):
        self.operand = operand
        self._init(operand.indices)

    def _fields(self):
        return (self.operand,)


class Product(Expr):
    """``left .anchor right``: every ``anchor`` leaf of ``left`` replaced by a tree of ``right``."""

    __slots__ = ("left", "anchor", "right")

    def __init__(self, left: Expr, anchor: str, right: Expr):
        self.left = left
        self.anchor = anchor
        self.right = right
        self._init(left.indices | right.indices)

    def _fields(self):
        return (self.left, self.anchor, self.right)


class Star(Expr):
    __slots__ = ("operand", "anchor")

    def __init__(self, operand: Expr, anchor: str):
        self.operand = operand
        self.anchor = anchor
        self._init(operand.indices)

    def _fields(self):
        return (self.operand, self.anchor)


def sym(name: str, *children: Expr) -> Symbol:
    return Symbol(name, children)


def sum_of(operands, indices) -> Expr:
    """Sum of ``operands``, or the empty set typed by ``indices`` when there are none."""
    operands = list(operands)
    if not operands:
        return Empty(indices)
    if len(operands) == 1:
        return operands[0]
    return Sum(operands)


def expr_eps_indices(e: Expr) -> list[int]:
    return sorted(e.indices)


# -- ordering ---------------------------------------------------------------

_RANK = {
    "Eps": 0,
    "Empty": 1,
    "Symbol": 2,
    "Sum": 3,
    "Inter": 4,
    "Neg": 5,
    "Compose": 6,
    "Closure": 7,
    "Product": 8,
    "Star": 9,
}


def expr_key(e: Expr) -> tuple:
    """Sort key realising :func:`expr_order` (cached on the node)."""
    key = e._key
    if key is not None:
        return key
    rank = _RANK[type(e).__name__]
    if isinstance(e, Eps):
        key = (rank, e.index)
    elif isinstance(e, Empty):
        key = (rank, tuple(sorted(e.indices)))
    elif isinstance(e, Symbol):
        key = (rank, e.name, tuple(expr_key(c) for c in e.children))
    elif isinstance(e, (Sum, Inter)):
        key = (rank, tuple(expr_key(o) for o in e.operands))
    elif isinstance(e, (Neg, Closure)):
        key = (rank, expr_key(e.operand))
    elif isinstance(e, Compose):
        key = (rank, expr_key(e.head), tuple(expr_key(a) for a in e.args))
    elif isinstance(e, Product):
        key = (rank, expr_key(e.left), e.anchor, expr_key(e.right))
    elif isinstance(e, Star):
        key = (rank, expr_key(e.operand), e.anchor)
    else:
        raise TypeError(f"not an expression: {e!r}")
    e._key = key
    return key


def expr_order(e1: Expr, e2: Expr) -> int:
    k1, k2 = expr_key(e1), expr_key(e2)
    return (k1 > k2) - (k1 < k2)


# -- validity ---------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    subexpression: Expr
    clause: str

    def __str__(self):
        return f"{self.clause} in {self.subexpression}"


def _children(e: Expr) -> tuple:
    if isinstance(e, Symbol):
        return e.children
    if isinstance(e, (Sum, Inter)):
        return e.operands
    if isinstance(e, (Neg, Closure, Star)):
        return (e.operand,)
    if isinstance(e, Compose):
        return (e.head,) + e.args
    if isinstance(e, Product):
        return (e.left, e.right)
    return ()


def _pairwise_disjoint(parts) -> bool:
    seen = set()
    for p in parts:
        if seen & p.indices:
            return False
        seen |= p.indices
    return True


def validate(e: Expr, alphabet: RankedAlphabet | None = None) -> list[Violation]:
    """Return every violation of the validity predicate (empty list when valid).

    With an ``alphabet``, symbol arities and product/star anchors are checked
    against it as well.
    """
    out: list[Violation] = []
    stack = [e]
    while stack:
        node = stack.pop()
        stack.extend(reversed(_children(node)))
        if isinstance(node, Symbol):
            if not _pairwise_disjoint(node.children):
                out.append(Violation(node, "children share a placeholder index"))
            if alphabet is not None:
                if node.name not in alphabet:
                    out.append(Violation(node, f"symbol {node.name!r} is not in the alphabet"))
                elif alphabet[node.name] != len(node.children):
                    out.append(
                        Violation(node, f"symbol {node.name!r} has arity {alphabet[node.name]}")
                    )
        elif isinstance(node, (Sum, Inter)):
            first = node.operands[0].indices
            if any(o.indices != first for o in node.operands[1:]):
                out.append(Violation(node, "operands have different placeholder index sets"))
        elif isinstance(node, Compose):
            if len(node.head.indices) != len(node.args):
                out.append(
                    Violation(
                        node,
                        f"head has {len(node.head.indices)} placeholders but {len(node.args)} arguments",
                    )
                )
            if not _pairwise_disjoint(node.args):
                out.append(Violation(node, "arguments share a placeholder index"))
        elif isinstance(node, Closure):
            if len(node.operand.indices) != 1:
                out.append(Violation(node, "closure operand must have exactly one placeholder"))
        elif isinstance(node, Product):
            if node.right.indices:
                out.append(Violation(node, "right operand of a product must have no placeholder"))
            _check_anchor(node, alphabet, out)
        elif isinstance(node, Star):
            if node.operand.indices:
                out.append(Violation(node, "star operand must have no placeholder"))
            _check_anchor(node, alphabet, out)
    return out


def _check_anchor(node, alphabet, out):
    if alphabet is None:
        return
    if node.anchor not in alphabet:
        out.append(Violation(node, f"anchor {node.anchor!r} is not in the alphabet"))
    elif alphabet[node.anchor] != 0:
        out.append(Violation(node, f"anchor {node.anchor!r} is not a nullary symbol"))


def check_valid(e: Expr, alphabet: RankedAlphabet | None = None) -> Expr:
    violations = validate(e, alphabet)
    if violations:
        raise InvalidExpression(violations)
    return e


def alphabet_of(e: Expr) -> RankedAlphabet:
    """Symbols used by ``e`` with the arity of their first use (anchors are nullary)."""
    entries = []
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Symbol):
            entries.append((node.name, len(node.children)))
        elif isinstance(node, (Product, Star)):
            entries.append((node.anchor, 0))
        stack.extend(_children(node))
    return RankedAlphabet(entries)


# -- nullability ------------------------------------------------------------


@lru_cache(maxsize=1 << 16)
def nullable(e: Expr, j: int) -> bool:
    """Decide whether the bare placeholder ``%j`` belongs to the language of ``e``."""
    if isinstance(e, Eps):
        return e.index == j
    if isinstance(e, (Symbol, Empty, Star)):
        return False
    if isinstance(e, Sum):
        return any(nullable(o, j) for o in e.operands)
    if isinstance(e, Inter):
        return all(nullable(o, j) for o in e.operands)
    if isinstance(e, Neg):
        return e.operand.indices == {j} and not nullable(e.operand, j)
    if isinstance(e, Compose):
        head_indices = sorted(e.head.indices)
        return any(
            nullable(e.head, i) and nullable(arg, j) for i, arg in zip(head_indices, e.args)
        )
    if isinstance(e, Closure):
        return e.operand.indices == {j}
    if isinstance(e, Product):
        return nullable(e.left, j)
    raise TypeError(f"not an expression: {e!r}")


# -- index renaming ---------------------------------------------------------


def _remap(e: Expr, fn) -> Expr:
    if not e.indices:
        return e
    if isinstance(e, Eps):
        return Eps(fn(e.index))
    if isinstance(e, Empty):
        return Empty(fn(i) for i in e.indices)
    if isinstance(e, Symbol):
        return Symbol(e.name, tuple(_remap(c, fn) for c in e.children))
    if isinstance(e, Sum):
        return Sum(tuple(_remap(o, fn) for o in e.operands))
    if isinstance(e, Inter):
        return Inter(tuple(_remap(o, fn) for o in e.operands))
    if isinstance(e, Neg):
        return Neg(_remap(e.operand, fn))
    if isinstance(e, Compose):
        # head indices are positional and stay untouched
        return Compose(e.head, tuple(_remap(a, fn) for a in e.args))
    if isinstance(e, Closure):
        return Closure(_remap(e.operand, fn))
    if isinstance(e, Product):
        return Product(_remap(e.left, fn), e.anchor, e.right)
    if isinstance(e, Star):
        return e
    raise TypeError(f"not an expression: {e!r}")


def remap_eps(e: Expr, mapping: dict) -> Expr:
    """Rename the placeholder indices of ``e`` (typed empty sets included).

    Indices absent from ``mapping`` are kept.  The induced map must be
    injective on the index set of ``e``.
    """
    image = [mapping.get(i, i) for i in e.indices]
    if len(set(image)) != len(image):
        raise NonInjectiveMap(f"map {mapping!r} is not injective on {sorted(e.indices)!r}")
    if any(not isinstance(i, int) or i < 1 for i in image):
        raise ValueError(f"map {mapping!r} produces a non-positive index")
    return _remap(e, lambda i: mapping.get(i, i))


def expr_inc_eps(z: int, e: Expr) -> Expr:
    if z == 0:
        return e
    return _remap(e, lambda i: i + z)


# -- syntactic containment of a nullary symbol ------------------------------


@lru_cache(maxsize=1 << 16)
def may_contain_symbol(e: Expr, a: str) -> bool:
    """Conservative test: can some tree of ``L(e)`` carry the symbol ``a``?

    ``False`` is a proof that no tree does; complements always answer ``True``.
    """
    if isinstance(e, Symbol):
        return e.name == a or any(may_contain_symbol(c, a) for c in e.children)
    if isinstance(e, (Eps, Empty)):
        return False
    if isinstance(e, Sum):
        return any(may_contain_symbol(o, a) for o in e.operands)
    if isinstance(e, Inter):
        return all(may_contain_symbol(o, a) for o in e.operands)
    if isinstance(e, Neg):
        return True
    if isinstance(e, Compose):
        return may_contain_symbol(e.head, a) or any(may_contain_symbol(x, a) for x in e.args)
    if isinstance(e, Closure):
        return may_contain_symbol(e.operand, a)
    if isinstance(e, Product):
        if e.anchor == a:
            return may_contain_symbol(e.right, a)
        return may_contain_symbol(e.left, a) or may_contain_symbol(e.right, a)
    if isinstance(e, Star):
        return e.anchor == a or may_contain_symbol(e.operand, a)
    raise TypeError(f"not an expression: {e!r}")


# -- normal form ------------------------------------------------------------


@lru_cache(maxsize=1 << 17)
def normalize(e: Expr) -> Expr:
    """Canonical representative of ``e`` under a small set of sound rewrites.

    * sums are flattened, sorted by :func:`expr_order` and deduplicated;
      typed empty summands are dropped while other summands remain;
    * a symbol, composition or product whose structure forces emptiness
      (a literal empty child, argument, head or left operand) becomes the
      typed empty set;
    * a composition whose arguments are all placeholders is a renaming of
      its head; otherwise the head is renumbered to ``%1 .. %k``;
    * ``!!E`` is ``E``;
    * ``L .a R`` is ``L`` when no tree of ``L`` can carry ``a``.
    """
    if isinstance(e, (Eps, Empty)):
        return e
    if isinstance(e, Symbol):
        children = tuple(normalize(c) for c in e.children)
        if any(isinstance(c, Empty) for c in children):
            return Empty(e.indices)
        return Symbol(e.name, children)
    if isinstance(e, Sum):
        return _normalize_sum(e)
    if isinstance(e, Inter):
        return Inter(tuple(normalize(o) for o in e.operands))
    if isinstance(e, Neg):
        inner = normalize(e.operand)
        if isinstance(inner, Neg):
            return inner.operand
        return Neg(inner)
    if isinstance(e, Compose):
        head = normalize(e.head)
        args = tuple(normalize(a) for a in e.args)
        if isinstance(head, Empty) or any(isinstance(a, Empty) for a in args):
            return Empty(e.indices)
        if all(isinstance(a, Eps) for a in args):
            order = sorted(head.indices)
            return normalize(_remap(head, dict(zip(order, (a.index for a in args))).__getitem__))
        order = sorted(head.indices)
        if order != list(range(1, len(order) + 1)):
            head = normalize(_remap(head, {j: i for i, j in enumerate(order, 1)}.__getitem__))
        return Compose(head, args)
    if isinstance(e, Closure):
        return Closure(normalize(e.operand))
    if isinstance(e, Product):
        left = normalize(e.left)
        if isinstance(left, Empty):
            return left
        if not may_contain_symbol(left, e.anchor):
            return left
        return Product(left, e.anchor, normalize(e.right))
    if isinstance(e, Star):
        return Star(normalize(e.operand), e.anchor)
    raise TypeError(f"not an expression: {e!r}")


def _flatten_sum(e: Expr, out: list):
    if isinstance(e, Sum):
        for o in e.operands:
            _flatten_sum(o, out)
    else:
        out.append(e)


def _normalize_sum(e: Sum) -> Expr:
    flat: list = []
    for o in e.operands:
        _flatten_sum(normalize(o), flat)
    kept = {o for o in flat if not isinstance(o, Empty)}
    if not kept:
        return Empty(e.indices)
    ordered = sorted(kept, key=expr_key)
    if len(ordered) == 1:
        return ordered[0]
    return Sum(ordered)
