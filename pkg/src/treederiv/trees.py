"""Ranked trees whose leaves may be indexed placeholders.

A tree is either a placeholder ``Hole(j)`` (written ``%j`` in text) or a
node ``Node(symbol, children)``.  Every placeholder index occurs at most once in a
tree; constructors reject duplicates.

Heights follow one convention throughout the package: leaves (nullary
symbols and holes) have height 0.
"""

from __future__ import annotations

from collections.abc import Iterator, Mapping

from .errors import ArityMismatch, DuplicateIndex, UnknownSymbol

__all__ = [
    "RankedAlphabet",
    "Tree",
    "Hole",
    "Node",
    "leaf",
    "eps_indices",
    "inc_eps",
    "remap_tree",
    "compose",
    "tree_order",
    "tree_key",
    "check_tree",
    "subtrees",
    "replace_at",
]


class RankedAlphabet(Mapping):
    """Immutable map from symbol name to arity."""

    __slots__ = ("_arities",)

    def __init__(self, entries=()):
        arities = {}
        items = entries.items() if isinstance(entries, Mapping) else entries
        for name, arity in items:
            if not isinstance(name, str) or not name:
                raise ValueError(f"symbol names must be non-empty strings, got {name!r}")
            if not isinstance(arity, int) or arity < 0:
                raise ValueError(f"arity of {name!r} must be a non-negative int")
            if arities.get(name, arity) != arity:
                raise ArityMismatch(f"symbol {name!r} declared with arities {arities[name]} and {arity}")
            arities[name] = arity
        self._arities = dict(sorted(arities.items()))

    @classmethod
    def parse(cls, text: str) -> RankedAlphabet:
        """Read a declaration such as ``"f:2,g:1,a:0"``."""
        entries = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            name, sep, arity = chunk.partition(":")
            if not sep:
                raise ValueError(f"alphabet entry {chunk!r} is not of the form name:arity")
            entries.append((name.strip(), int(arity)))
        return cls(entries)

    def __getitem__(self, name):
        return self._arities[name]

    def __iter__(self):
        return iter(self._arities)

    def __len__(self):
        return len(self._arities)

    def __hash__(self):
        return hash(tuple(self._arities.items()))

    def __eq__(self, other):
        if isinstance(other, RankedAlphabet):
            return self._arities == other._arities
        return NotImplemented

    def __repr__(self):
        return f"RankedAlphabet({self})"

    def __str__(self):
        return ",".join(f"{name}:{arity}" for name, arity in self._arities.items())

    def arity(self, name: str) -> int:
        try:
            return self._arities[name]
        except KeyError:
            raise UnknownSymbol(f"symbol {name!r} is not in the alphabet") from None

    def of_arity(self, k: int) -> tuple[str, ...]:
        return tuple(name for name, arity in self._arities.items() if arity == k)

    @property
    def nullary(self) -> tuple[str, ...]:
        return self.of_arity(0)

    @property
    def max_arity(self) -> int:
        return max(self._arities.values(), default=0)

    def merge(self, other: Mapping) -> RankedAlphabet:
        return RankedAlphabet(list(self.items()) + list(other.items()))


class Tree:
    """Common base of :class:`Hole` and :class:`Node`.

    Trees are immutable; equality is structural and the hash is cached.
    """

    __slots__ = ()

    height: int
    size: int
    indices: frozenset

    def __repr__(self):
        return f"Tree({self})"


class Hole(Tree):
    __slots__ = ("index", "indices", "_hash")

    height = 0
    size = 1

    def __init__(self, index: int):
        if not isinstance(index, int) or index < 1:
            raise ValueError(f"placeholder index must be a positive int, got {index!r}")
        self.index = index
        self.indices = frozenset((index,))
        self._hash = hash(("Hole", index))

    def __eq__(self, other):
        return isinstance(other, Hole) and other.index == self.index

    def __hash__(self):
        return self._hash

    def __str__(self):
        return f"%{self.index}"


class Node(Tree):
    __slots__ = ("symbol", "children", "height", "size", "indices", "_hash")

    def __init__(self, symbol: str, children=()):
        children = tuple(children)
        indices = frozenset()
        for child in children:
            if not isinstance(child, Tree):
                raise TypeError(f"children must be trees, got {child!r}")
            if indices & child.indices:
                dup = sorted(indices & child.indices)
                raise DuplicateIndex(f"placeholder index {dup[0]} occurs twice under {symbol!r}")
            indices |= child.indices
        self.symbol = symbol
        self.children = children
        self.indices = indices
        self.height = 1 + max(c.height for c in children) if children else 0
        self.size = 1 + sum(c.size for c in children)
        self._hash = hash((symbol, children))

    @classmethod
    def _trusted(cls, symbol: str, children: tuple) -> "Node":
        """Build without type or disjointness checks; the caller guarantees both."""
        self = object.__new__(cls)
        self.symbol = symbol
        self.children = children
        self.indices = frozenset().union(*(c.indices for c in children))
        self.height = 1 + max(c.height for c in children) if children else 0
        self.size = 1 + sum(c.size for c in children)
        self._hash = hash((symbol, children))
        return self

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Node)
            and other._hash == self._hash
            and other.symbol == self.symbol
            and other.children == self.children
        )

    def __hash__(self):
        return self._hash

    def __str__(self):
        if not self.children:
            return self.symbol
        return f"{self.symbol}[{','.join(str(c) for c in self.children)}]"


def leaf(symbol: str) -> Node:
    return Node(symbol, ())


def eps_indices(t: Tree) -> list[int]:
    """The placeholder indices of ``t`` in ascending order."""
    return sorted(t.indices)


def remap_tree(t: Tree, mapping) -> Tree:
    """Rename placeholder indices through ``mapping`` (a dict or callable)."""
    if not t.indices:
        return t
    if isinstance(t, Hole):
        new = mapping(t.index) if callable(mapping) else mapping.get(t.index, t.index)
        return t if new == t.index else Hole(new)
    return Node(t.symbol, tuple(remap_tree(c, mapping) for c in t.children))


def inc_eps(z: int, t: Tree) -> Tree:
    """Shift every placeholder index of ``t`` by ``z``."""
    if z == 0:
        return t
    return remap_tree(t, lambda x: x + z)


def compose(t: Tree, args) -> Tree:
    """Graft ``args[i]`` on the ``i``-th smallest placeholder of ``t``."""
    args = tuple(args)
    order = eps_indices(t)
    if len(args) != len(order):
        raise ArityMismatch(f"tree has {len(order)} placeholders but {len(args)} arguments were given")
    table = dict(zip(order, args))

    def graft(node):
        if isinstance(node, Hole):
            return table[node.index]
        if not node.indices:
            return node
        return Node(node.symbol, tuple(graft(c) for c in node.children))

    return graft(t)


def _preorder(t: Tree, out: list):
    if isinstance(t, Hole):
        out.append((0, t.index, ""))
    else:
        out.append((1, 0, t.symbol))
        for c in t.children:
            _preorder(c, out)


def tree_key(t: Tree) -> tuple:
    """Sort key realising :func:`tree_order`."""
    seq: list = []
    _preorder(t, seq)
    return (t.height, t.size, tuple(seq))


def tree_order(t1: Tree, t2: Tree) -> int:
    """Total order on trees: height, then size, then preorder labels.

    Returns -1, 0 or 1.  Placeholders sort before every symbol.
    """
    k1, k2 = tree_key(t1), tree_key(t2)
    return (k1 > k2) - (k1 < k2)


def check_tree(t: Tree, alphabet: RankedAlphabet) -> None:
    """Raise unless every node of ``t`` uses a symbol at its declared arity."""
    if isinstance(t, Hole):
        return
    arity = alphabet.arity(t.symbol)
    if arity != len(t.children):
        raise ArityMismatch(f"symbol {t.symbol!r} has arity {arity}, used with {len(t.children)} children")
    for c in t.children:
        check_tree(c, alphabet)


def subtrees(t: Tree, path=()) -> Iterator[tuple[tuple, Tree]]:
    """Yield ``(path, subtree)`` pairs in preorder; a path is a tuple of child positions."""
    yield path, t
    if isinstance(t, Node):
        for i, c in enumerate(t.children):
            yield from subtrees(c, path + (i,))


def replace_at(t: Tree, path, new: Tree) -> Tree:
    if not path:
        return new
    head, rest = path[0], path[1:]
    children = list(t.children)
    children[head] = replace_at(children[head], rest, new)
    return Node(t.symbol, children)
