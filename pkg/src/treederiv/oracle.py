"""Brute-force semantic ground truth.

Two independent evaluators of ``L(E)`` live here:

* :func:`enumerate_language` builds the height-bounded language bottom-up
  from the set semantics of each operator;
* :func:`contains` decides ``t in L(E)`` top-down by searching
  decompositions of ``t``.

Neither looks at derivatives, so both can judge the syntactic modules.
Tests cross-check the two evaluators against each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

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
    alphabet_of,
    check_valid,
    may_contain_symbol,
)
from .errors import NonNullaryExpression
from .trees import Hole, Node, RankedAlphabet, Tree, compose, leaf, remap_tree, subtrees, tree_key

__all__ = [
    "BoundedLanguage",
    "universe",
    "enumerate_language",
    "contains",
    "quotient_set",
    "quotient_by_contexts",
    "member_bruteforce",
]


@dataclass(frozen=True)
class BoundedLanguage:
    trees: frozenset
    height_bound: int
    alphabet: RankedAlphabet

    def sorted(self) -> list[Tree]:
        return sorted(self.trees, key=tree_key)

    def __contains__(self, t):
        return t in self.trees

    def __len__(self):
        return len(self.trees)

    def __iter__(self):
        return iter(self.sorted())


# -- the tree universe ----------------------------------------------------------


@lru_cache(maxsize=256)
def _grouped(alphabet: RankedAlphabet, h: int, pool: frozenset) -> dict:
    """Trees of height <= h whose placeholders are drawn from ``pool``, grouped by index set."""
    groups: dict = {}

    def add(t):
        groups.setdefault(t.indices, []).append(t)

    for name in alphabet.nullary:
        add(leaf(name))
    for j in sorted(pool):
        add(Hole(j))
    if h == 0:
        return groups
    below = _grouped(alphabet, h - 1, pool)
    keys = list(below)
    for name in alphabet:
        m = alphabet[name]
        if m == 0:
            continue
        for combo in itertools.product(keys, repeat=m):
            used = frozenset()
            ok = True
            for k in combo:
                if used & k:
                    ok = False
                    break
                used |= k
            if not ok:
                continue
            for children in itertools.product(*(below[k] for k in combo)):
                add(Node(name, children))
    return groups


@lru_cache(maxsize=256)
def universe(alphabet: RankedAlphabet, h: int, indices=frozenset()) -> frozenset:
    """All trees over ``alphabet`` of height <= ``h`` with placeholder set exactly ``indices``."""
    indices = frozenset(indices)
    return frozenset(_grouped(alphabet, h, indices).get(indices, ()))


# -- bottom-up enumeration --------------------------------------------------------


class _OverBudget(Exception):
    pass


# forward substitution gives up after producing this many trees
_WORK_LIMIT = 200_000


def _substitute(s: Tree, a: str, pool, budget: int, meter: list) -> set:
    """Replace every ``a`` leaf of ``s`` independently by trees of ``pool`` within ``budget``.

    ``meter[0]`` counts down the trees built; :class:`_OverBudget` is raised at zero.
    """
    if isinstance(s, Hole):
        return {s}
    if s.symbol == a and not s.children:
        return {r for r in pool if r.height <= budget}
    if not s.children:
        return {s}
    if budget == 0:
        return set()
    parts = [_substitute(c, a, pool, budget - 1, meter) for c in s.children]
    if any(not p for p in parts):
        return set()
    size = 1
    for p in parts:
        size *= len(p)
    meter[0] -= size
    if meter[0] < 0:
        raise _OverBudget
    return {Node(s.symbol, combo) for combo in itertools.product(*parts)}


def _abstractions(u: Tree, a: str, member, memo: dict, allow_self: bool):
    """Trees ``s`` with ``u = s[a <- trees accepted by member]``, every ``a`` leaf of ``s`` replaced."""
    if allow_self and member(u):
        yield leaf(a)
    if isinstance(u, Hole):
        yield u
        return
    if not u.children:
        if u.symbol != a:
            yield u
        return
    parts = []
    for c in u.children:
        listed = memo.get(c)
        if listed is None:
            listed = memo[c] = list(_abstractions(c, a, member, memo, True))
        parts.append(listed)
    for combo in itertools.product(*parts):
        yield Node._trusted(u.symbol, combo)


def _product_backward(left: frozenset, a: str, right: frozenset, candidates) -> set:
    memo: dict = {}
    return {
        t
        for t in candidates
        if any(s in left for s in _abstractions(t, a, right.__contains__, memo, True))
    }


def _star_backward(layer: frozenset, a: str, candidates) -> set:
    # a tree only depends on strictly smaller ones once the root is not folded
    accepted: set = set()
    memo: dict = {}
    for t in sorted(candidates, key=lambda u: u.size):
        if t == leaf(a) or any(
            s in layer for s in _abstractions(t, a, accepted.__contains__, memo, False)
        ):
            accepted.add(t)
    return accepted


def _disjoint_placements(t: Tree, parts: list):
    """Pairwise disjoint positions ``(p_1, ..., p_k)`` of ``t`` with ``t|p_i`` in ``parts[i]``."""
    options = [[path for path, sub in subtrees(t) if sub in part] for part in parts]

    def go(i, chosen):
        if i == len(options):
            yield chosen
            return
        for path in options[i]:
            if not any(path[: len(q)] == q or q[: len(path)] == path for q in chosen):
                yield from go(i + 1, chosen + [path])

    return go(0, [])


def _compose_backward(head: Expr, heads: frozenset, parts: list, candidates) -> set:
    order = sorted(head.indices)
    out = set()
    for t in candidates:
        for chosen in _disjoint_placements(t, parts):
            s = _replace_many(t, {path: Hole(j) for path, j in zip(chosen, order)})
            if s in heads:
                out.add(t)
                break
    return out


def _closure_backward(layer: frozenset, j: int, candidates) -> set:
    # t = s o (u) with s != %j puts u strictly below the root, so sizes decrease
    accepted = {Hole(j)}
    for t in sorted(candidates, key=lambda u: u.size):
        if t in accepted:
            continue
        for path, sub in subtrees(t):
            if path and sub in accepted and _replace_many(t, {path: Hole(j)}) in layer:
                accepted.add(t)
                break
    return accepted


@lru_cache(maxsize=1 << 14)
def _enum(e: Expr, h: int, alphabet: RankedAlphabet) -> frozenset:
    if isinstance(e, Eps):
        return frozenset((Hole(e.index),))
    if isinstance(e, Empty):
        return frozenset()
    if isinstance(e, Symbol):
        if not e.children:
            return frozenset((leaf(e.name),))
        if h == 0:
            return frozenset()
        parts = [_enum(c, h - 1, alphabet) for c in e.children]
        return frozenset(Node(e.name, combo) for combo in itertools.product(*parts))
    if isinstance(e, Sum):
        return frozenset().union(*(_enum(o, h, alphabet) for o in e.operands))
    if isinstance(e, Inter):
        out = _enum(e.operands[0], h, alphabet)
        for o in e.operands[1:]:
            out &= _enum(o, h, alphabet)
        return out
    if isinstance(e, Neg):
        return universe(alphabet, h, e.indices) - _enum(e.operand, h, alphabet)
    if isinstance(e, Compose):
        heads = _enum(e.head, h, alphabet)
        parts = [_enum(a, h, alphabet) for a in e.args]
        work = len(heads)
        for p in parts:
            work *= len(p)
        if work > _WORK_LIMIT:
            return frozenset(_compose_backward(e.head, heads, parts, universe(alphabet, h, e.indices)))
        out = set()
        for s in heads:
            for combo in itertools.product(*parts):
                t = compose(s, combo)
                if t.height <= h:
                    out.add(t)
        return frozenset(out)
    if isinstance(e, Closure):
        layer = _enum(e.operand, h, alphabet)
        (j,) = e.operand.indices
        acc = {Hole(j)}
        work = _WORK_LIMIT
        while True:
            work -= len(layer) * len(acc)
            if work < 0:
                return frozenset(_closure_backward(layer, j, universe(alphabet, h, e.indices)))
            grown = set(acc)
            for s in layer:
                for u in acc:
                    t = compose(s, (u,))
                    if t.height <= h:
                        grown.add(t)
            if grown == acc:
                return frozenset(acc)
            acc = grown
    if isinstance(e, Product):
        left = _enum(e.left, h, alphabet)
        right = _enum(e.right, h, alphabet)
        try:
            meter = [_WORK_LIMIT]
            out = set()
            for s in left:
                out |= _substitute(s, e.anchor, right, h, meter)
            return frozenset(out)
        except _OverBudget:
            return frozenset(_product_backward(left, e.anchor, right, universe(alphabet, h, e.indices)))
    if isinstance(e, Star):
        layer = _enum(e.operand, h, alphabet)
        try:
            meter = [_WORK_LIMIT]
            acc = {leaf(e.anchor)}
            while True:
                grown = set(acc)
                for s in layer:
                    grown |= _substitute(s, e.anchor, acc, h, meter)
                if grown == acc:
                    return frozenset(acc)
                acc = grown
        except _OverBudget:
            return frozenset(_star_backward(layer, e.anchor, universe(alphabet, h)))
    raise TypeError(f"not an expression: {e!r}")


def enumerate_language(e: Expr, h: int, alphabet: RankedAlphabet | None = None) -> BoundedLanguage:
    """The trees of ``L(e)`` of height at most ``h``.

    Complements are taken inside the trees over ``alphabet`` (default: the
    symbols of ``e``) that carry exactly the placeholder set of the operand.
    """
    if h < 0:
        raise ValueError("height bound must be non-negative")
    alphabet = alphabet if alphabet is not None else alphabet_of(e)
    check_valid(e, alphabet)
    return BoundedLanguage(_enum(e, h, alphabet), h, alphabet)


# -- top-down membership ------------------------------------------------------------


def contains(e: Expr, t: Tree) -> bool:
    """Decide ``t in L(e)``.

    ``t`` is assumed to be a tree over the alphabet in which complements of
    ``e`` are read; no height bound is involved.
    """
    return _contains(e, t)


@lru_cache(maxsize=1 << 18)
def _contains(e: Expr, t: Tree) -> bool:
    if t.indices != e.indices:
        return False
    if isinstance(e, Eps):
        return isinstance(t, Hole)
    if isinstance(e, Empty):
        return False
    if isinstance(e, Symbol):
        return (
            isinstance(t, Node)
            and t.symbol == e.name
            and len(t.children) == len(e.children)
            and all(_contains(c, u) for c, u in zip(e.children, t.children))
        )
    if isinstance(e, Sum):
        return any(_contains(o, t) for o in e.operands)
    if isinstance(e, Inter):
        return all(_contains(o, t) for o in e.operands)
    if isinstance(e, Neg):
        return not _contains(e.operand, t)
    if isinstance(e, Compose):
        return _contains_compose(e, t)
    if isinstance(e, Closure):
        return _contains_closure(e, t)
    if isinstance(e, Product):
        return _contains_product(e, t)
    if isinstance(e, Star):
        return _contains_star(e, t)
    raise TypeError(f"not an expression: {e!r}")


def _surely_empty(e: Expr) -> bool:
    """Cheap sufficient test for an empty language."""
    if isinstance(e, Empty):
        return True
    if isinstance(e, Symbol):
        return any(_surely_empty(c) for c in e.children)
    if isinstance(e, Sum):
        return all(_surely_empty(o) for o in e.operands)
    if isinstance(e, Inter):
        return any(_surely_empty(o) for o in e.operands)
    if isinstance(e, Compose):
        return _surely_empty(e.head) or any(_surely_empty(x) for x in e.args)
    if isinstance(e, Product):
        return _surely_empty(e.left)
    return False


def _contains_compose(e: Compose, t: Tree) -> bool:
    if _surely_empty(e.head):
        return False
    pairs = tuple(zip(sorted(e.head.indices), e.args))
    return _match(e.head, t, pairs)


@lru_cache(maxsize=1 << 18)
def _match(h: Expr, u: Tree, pairs: tuple) -> bool:
    """Is there a placement of the ``(index, arg)`` pairs in ``u`` whose abstraction lies in ``L(h)``?"""
    if u.indices != frozenset().union(*(x.indices for _, x in pairs)):
        return False
    if isinstance(h, Eps):
        return len(pairs) == 1 and _contains(pairs[0][1], u)
    if isinstance(h, Empty):
        return False
    if isinstance(h, Symbol):
        # the root stays a symbol, so placements split over the children
        if not isinstance(u, Node) or u.symbol != h.name or len(u.children) != len(h.children):
            return False
        return all(
            _match(c, v, tuple(p for p in pairs if p[0] in c.indices))
            for c, v in zip(h.children, u.children)
        )
    if isinstance(h, Sum):
        return any(_match(o, u, pairs) for o in h.operands)
    return _place(h, u, pairs)


def _place(h: Expr, t: Tree, pairs: tuple) -> bool:
    options = []
    for _, arg in pairs:
        found = [path for path, sub in subtrees(t) if sub.indices == arg.indices and _contains(arg, sub)]
        if not found:
            return False
        options.append(found)

    def nested(p, q):
        return p[: len(q)] == q or q[: len(p)] == p

    def search(i, chosen):
        if i == len(options):
            s = _replace_many(t, {path: Hole(j) for path, (j, _) in zip(chosen, pairs)})
            return _contains(h, s)
        for path in options[i]:
            if any(nested(path, q) for q in chosen):
                continue
            if search(i + 1, chosen + [path]):
                return True
        return False

    return search(0, [])


def _replace_many(t: Tree, table: dict) -> Tree:
    """Replace several pairwise disjoint positions at once, rebuilding only the spine above them."""
    if () in table:
        return table[()]
    groups: dict = {}
    for path, new in table.items():
        groups.setdefault(path[0], {})[path[1:]] = new
    children = list(t.children)
    for i, sub in groups.items():
        children[i] = _replace_many(children[i], sub)
    return Node._trusted(t.symbol, tuple(children))


def _replace(t: Tree, path, new: Tree) -> Tree:
    if not path:
        return new
    children = list(t.children)
    children[path[0]] = _replace(children[path[0]], path[1:], new)
    return Node(t.symbol, children)


def _contains_closure(e: Closure, t: Tree) -> bool:
    (j,) = e.operand.indices
    if t == Hole(j):
        return True
    # walk down the path to the placeholder; each proper subtree on it may be the inner layer
    path = []
    node = t
    while isinstance(node, Node):
        k = next(i for i, c in enumerate(node.children) if j in c.indices)
        path.append(k)
        node = node.children[k]
        inner = node
        outer = _replace(t, tuple(path), Hole(j))
        if _contains(e, inner) and _contains(e.operand, outer):
            return True
    return False


def _preimages(t: Tree, a: str, member, exclude_root: bool):
    """Lazily yield every ``s`` with ``t`` in ``{s} .a R`` where ``member`` decides ``R``."""

    def gen(node, is_root):
        if isinstance(node, Hole):
            yield node
            return
        if not node.indices and not (is_root and exclude_root) and member(node):
            yield leaf(a)
        if node.symbol == a and not node.children:
            return
        if not node.children:
            yield node
            return
        yield from _product_gen([lambda c=c: gen(c, False) for c in node.children], node.symbol)

    return gen(t, True)


def _product_gen(factories, symbol):
    def rec(i, acc):
        if i == len(factories):
            yield Node(symbol, acc)
            return
        for x in factories[i]():
            yield from rec(i + 1, acc + (x,))

    return rec(0, ())


def _push_product(left: Expr, a: str, right: Expr) -> Expr | None:
    """An expression equal to ``left .a right`` without a product at the root, if one is known."""
    if not may_contain_symbol(left, a):
        return left
    if isinstance(left, Symbol):
        if left.name == a and not left.children:
            return right
        return Symbol(left.name, tuple(Product(c, a, right) for c in left.children))
    if isinstance(left, Sum):
        return Sum(tuple(Product(o, a, right) for o in left.operands))
    if isinstance(left, Compose):
        return Compose(Product(left.head, a, right), tuple(Product(x, a, right) for x in left.args))
    if isinstance(left, Closure):
        return Closure(Product(left.operand, a, right))
    if isinstance(left, Product):
        if left.anchor == a:
            return Product(left.left, a, Product(left.right, a, right))
        if not may_contain_symbol(right, left.anchor):
            return Product(Product(left.left, a, right), left.anchor, Product(left.right, a, right))
    return None


def _contains_product(e: Product, t: Tree) -> bool:
    pushed = _push_product(e.left, e.anchor, e.right)
    if pushed is not None:
        return _contains(pushed, t)
    if isinstance(e.left, Star) and e.left.anchor == e.anchor:
        return _star_member(e.left.operand, e.anchor, e.right, t)
    right = e.right
    return any(
        _contains(e.left, s)
        for s in _preimages(t, e.anchor, lambda u: _contains(right, u), exclude_root=False)
    )


def _contains_star(e: Star, t: Tree) -> bool:
    return _star_member(e.operand, e.anchor, Symbol(e.anchor), t)


@lru_cache(maxsize=1 << 16)
def _star_member(x: Expr, b: str, base: Expr, t: Tree) -> bool:
    """``t`` in the least set S with ``L(base)`` in S and ``L(x) .b S`` in S."""
    if t.indices:
        return False
    if _contains(base, t):
        return True
    return any(
        _contains(x, s)
        for s in _preimages(t, b, lambda u: _star_member(x, b, base, u), exclude_root=True)
    )


# -- quotients --------------------------------------------------------------------


def quotient_set(language, t: Tree) -> frozenset:
    """Bottom-Up quotient of a finite tree set by ``t``.

    Every occurrence of ``t`` inside a member is replaced by ``%1`` and the
    member's other placeholders are shifted up by one.
    """
    out = set()
    for big in language:
        for path, sub in subtrees(big):
            if sub != t:
                continue
            others = big.indices - t.indices
            shifted = _replace(big, path, Hole(1 << 30))
            shifted = remap_tree(shifted, lambda x: 1 if x == 1 << 30 else x + 1)
            if shifted.indices == {1} | {x + 1 for x in others}:
                out.add(shifted)
    return frozenset(out)


def quotient_by_contexts(e: Expr, t: Tree, h: int, alphabet: RankedAlphabet) -> frozenset:
    """Trees of ``t^-1(L(e))`` with height at most ``h``.

    Equal to ``quotient_set(enumerate_language(e, h + height(t) + 1), t)``
    cut at height ``h``: every context ``c`` of height <= ``h`` is tested
    by plugging ``t`` and asking :func:`contains`.
    """
    if not t.indices <= e.indices:
        return frozenset()
    others = sorted(e.indices - t.indices)
    target = frozenset({1} | {x + 1 for x in others})
    out = set()
    for c in universe(alphabet, h, target):
        order = sorted(c.indices)
        plugged = compose(c, (t,) + tuple(Hole(x) for x in others))
        assert order[0] == 1
        if _contains(e, plugged):
            out.add(c)
    return frozenset(out)


def member_bruteforce(t: Tree, e: Expr, alphabet: RankedAlphabet | None = None) -> bool:
    """``t in L(e)`` by enumerating ``L(e)`` up to the height of ``t``."""
    if e.indices:
        raise NonNullaryExpression(f"{e} has placeholders {sorted(e.indices)}")
    alphabet = alphabet if alphabet is not None else alphabet_of(e)
    return t in enumerate_language(e, t.height, alphabet.merge(_tree_symbols(t)))


def _tree_symbols(t: Tree) -> dict:
    out = {}
    for _, sub in subtrees(t):
        if isinstance(sub, Node):
            out[sub.symbol] = len(sub.children)
    return out

