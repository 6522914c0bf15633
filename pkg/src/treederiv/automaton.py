"""Bottom-up tree automata and the round-based derivative construction.

States of a derivative automaton are normalized derivatives of the root
expression.  Round 0 derives by the nullary symbols; round ``n`` derives by
``f(w_1, ..., w_m)`` where each ``w_i`` is the witness tree of an existing
state.  The construction stops when a round adds no state.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .derivation import d_tree
from .errors import NonNullaryExpression, UnknownSymbol
from .expressions import Empty, Expr, alphabet_of, check_valid, nullable
from .partial import pd_tree
from .trees import Hole, Node, RankedAlphabet, Tree, leaf, subtrees, tree_key

__all__ = [
    "TreeAutomaton",
    "Round",
    "BuildTrace",
    "run",
    "accepts",
    "is_deterministic",
    "build_derivative_automaton",
    "membership_via_rounds",
    "naive_pd_automaton",
    "to_dot",
    "to_json",
]

SINK = Empty({1})


@dataclass(frozen=True)
class TreeAutomaton:
    """``(alphabet, states, finals, transitions)``.

    A state is an integer id; ``labels[id]`` is the expression it stands for.
    A transition is ``(argument ids, symbol, target id)``.
    """

    alphabet: RankedAlphabet
    labels: tuple
    finals: frozenset
    transitions: frozenset

    def __post_init__(self):
        n = len(self.labels)
        if not self.finals <= set(range(n)):
            raise ValueError("final states must be states")
        for args, symbol, target in self.transitions:
            if symbol not in self.alphabet:
                raise UnknownSymbol(f"transition on unknown symbol {symbol!r}")
            if len(args) != self.alphabet[symbol]:
                raise ValueError(f"transition {args} {symbol} has the wrong arity")
            if not all(0 <= q < n for q in args + (target,)):
                raise ValueError(f"transition {args} {symbol} -> {target} uses unknown states")

    @property
    def states(self) -> range:
        return range(len(self.labels))

    def state_of(self, label: Expr) -> int:
        return self.labels.index(label)

    def table(self) -> dict:
        out: dict = {}
        for args, symbol, target in self.transitions:
            out.setdefault((args, symbol), set()).add(target)
        return out

    def sorted_transitions(self) -> list:
        return sorted(self.transitions, key=lambda tr: (tr[0], tr[1], tr[2]))


@dataclass(frozen=True)
class Round:
    """Snapshot of the construction after one round."""

    states: frozenset
    transitions: frozenset
    finals: frozenset
    witnesses: dict = field(hash=False)


@dataclass
class BuildTrace:
    rounds: list
    fixed_point: bool
    rounds_used: int
    truncated: bool = False

    def automaton_at(self, n: int, alphabet: RankedAlphabet, labels) -> TreeAutomaton:
        r = self.rounds[n]
        ids = sorted(r.states)
        return TreeAutomaton(alphabet, tuple(labels[i] for i in ids), r.finals, r.transitions)


# -- running an automaton ----------------------------------------------------------


def run(a: TreeAutomaton, t: Tree) -> frozenset:
    """The set of states reached on ``t`` bottom-up."""
    table = a.table()

    def go(node) -> frozenset:
        if isinstance(node, Hole):
            raise ValueError("run expects a tree without placeholders")
        if node.symbol not in a.alphabet:
            raise UnknownSymbol(f"symbol {node.symbol!r} is not in the alphabet")
        below = [go(c) for c in node.children]
        out = set()
        for combo in itertools.product(*below):
            out |= table.get((combo, node.symbol), set())
        return frozenset(out)

    return go(t)


def accepts(a: TreeAutomaton, t: Tree) -> bool:
    return bool(run(a, t) & a.finals)


def is_deterministic(a: TreeAutomaton) -> bool:
    return all(len(targets) <= 1 for targets in a.table().values())


# -- derivative automaton ------------------------------------------------------------


def _prepare(e: Expr, alphabet):
    alphabet = alphabet_of(e) if alphabet is None else alphabet.merge(alphabet_of(e))
    check_valid(e, alphabet)
    if e.indices:
        raise NonNullaryExpression(f"{e} has placeholders {sorted(e.indices)}")
    return alphabet


class _Builder:
    """Shared bookkeeping of the two round-based constructions."""

    def __init__(self, alphabet):
        self.alphabet = alphabet
        self.labels: list = []
        self.ids: dict = {}
        self.witness: dict = {}
        self.transitions: set = set()
        self.rounds: list = []

    def _state(self, label) -> int:
        q = self.ids.get(label)
        if q is None:
            q = len(self.labels)
            self.ids[label] = q
            self.labels.append(label)
        return q

    def _candidate_trees(self, new_prev, incremental):
        if not self.rounds:
            for name in self.alphabet.nullary:
                yield (), leaf(name)
            return
        known = sorted(self.witness)
        for name in self.alphabet:
            m = self.alphabet[name]
            if m == 0:
                continue
            for combo in itertools.product(known, repeat=m):
                if incremental and not any(q in new_prev for q in combo):
                    continue
                yield combo, Node(name, tuple(self.witness[q] for q in combo))

    def _finals(self):
        return frozenset(q for q, label in enumerate(self.labels) if nullable(label, 1))

    def _snapshot(self):
        self.rounds.append(
            Round(
                frozenset(range(len(self.labels))),
                frozenset(self.transitions),
                self._finals(),
                dict(self.witness),
            )
        )


def build_derivative_automaton(
    e: Expr,
    max_rounds: int = 32,
    alphabet: RankedAlphabet | None = None,
    *,
    incremental: bool = True,
    prefer_max: bool = False,
    max_states: int | None = None,
) -> tuple[TreeAutomaton, BuildTrace]:
    """Round-based derivative automaton of a nullary expression.

    Each new state receives the ``tree_order``-least tree producing it in
    its round (the greatest one with ``prefer_max``).  With
    ``incremental=False`` every tuple of states is derived again in every
    round.  ``max_states`` stops a run whose state count explodes; the trace
    then reports ``truncated``.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    alphabet = _prepare(e, alphabet)
    b = _Builder(alphabet)
    fixed_point = False
    truncated = False
    new_prev: set = set()
    n = 0
    while True:
        produced: dict = {}
        for combo, t in b._candidate_trees(new_prev, incremental):
            label = d_tree(e, t)
            fresh = label not in b.ids
            q = b._state(label)
            b.transitions.add((combo, t.symbol, q))
            if fresh or q in produced:
                produced.setdefault(q, []).append(t)
            if max_states is not None and len(b.labels) > max_states:
                truncated = True
                break
        for q, trees in produced.items():
            pick = max if prefer_max else min
            b.witness[q] = pick(trees, key=tree_key)
        b._snapshot()
        new_prev = set(produced)
        if truncated:
            break
        if n >= 1 and not produced:
            fixed_point = True
            break
        if n == max_rounds:
            break
        n += 1
    trace = BuildTrace(b.rounds, fixed_point, n, truncated)
    automaton = TreeAutomaton(alphabet, tuple(b.labels), b._finals(), frozenset(b.transitions))
    return automaton, trace


def membership_via_rounds(e: Expr, t: Tree, alphabet: RankedAlphabet | None = None) -> bool:
    """Decide ``t in L(e)`` by deriving only along the subterms of ``t``.

    Subterms are visited by increasing height, which mirrors the rounds of
    the full construction; each subterm is mapped to the state of its
    derivative, computed from the witnesses of its children's states.
    """
    _prepare(e, alphabet)
    if t.indices:
        raise ValueError("membership expects a tree without placeholders")
    state: dict = {}
    witness: dict = {}
    for _, u in sorted(set(subtrees(t)), key=lambda pu: tree_key(pu[1])):
        if u in state:
            continue
        probe = Node(u.symbol, tuple(witness[state[c]] for c in u.children))
        label = d_tree(e, probe)
        state[u] = label
        witness.setdefault(label, u)
    return nullable(state[t], 1)


# -- naive partial-derivative construction (unsound) ----------------------------------


def naive_pd_automaton(
    e: Expr,
    max_rounds: int = 32,
    alphabet: RankedAlphabet | None = None,
) -> tuple[TreeAutomaton, BuildTrace]:
    """UNSOUND: the round construction fed with partial derivatives.

    Witnesses are chosen greedily: candidate trees are scanned in
    ``tree_order`` and each one is assigned to every still uncovered derived
    term it produces.  The resulting automaton may accept trees outside
    ``L(e)``; it exists to exhibit that failure.
    """
    if max_rounds < 1:
        raise ValueError("max_rounds must be positive")
    alphabet = _prepare(e, alphabet)
    b = _Builder(alphabet)
    fixed_point = False
    new_prev: set = set()
    n = 0
    while True:
        produced: dict = {}
        for combo, t in b._candidate_trees(new_prev, True):
            for label in pd_tree(e, t).ordered():
                fresh = label not in b.ids
                q = b._state(label)
                b.transitions.add((combo, t.symbol, q))
                if fresh or q in produced:
                    produced.setdefault(q, set()).add(t)
        # greedy cover: fewest distinct witness trees
        uncovered = set(produced)
        candidates = sorted({t for ts in produced.values() for t in ts}, key=tree_key)
        for t in candidates:
            hit = {q for q in uncovered if t in produced[q]}
            for q in hit:
                b.witness[q] = t
            uncovered -= hit
        b._snapshot()
        new_prev = set(produced)
        if n >= 1 and not produced:
            fixed_point = True
            break
        if n == max_rounds:
            break
        n += 1
    trace = BuildTrace(b.rounds, fixed_point, n)
    automaton = TreeAutomaton(alphabet, tuple(b.labels), b._finals(), frozenset(b.transitions))
    return automaton, trace


# -- export ------------------------------------------------------------------------------


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def to_dot(a: TreeAutomaton, omit_sink: bool = False) -> str:
    """Graphviz rendering: one point node per transition, dashed numbered argument edges."""
    hidden = {q for q in a.states if omit_sink and a.labels[q] == SINK}
    lines = [
        "digraph automaton {",
        "  rankdir=LR;",
        '  node [shape=box, style=rounded, fontname="monospace"];',
    ]
    for q in a.states:
        if q in hidden:
            continue
        extra = ", peripheries=2" if q in a.finals else ""
        lines.append(f'  q{q} [label="{_dot_escape(str(a.labels[q]))}"{extra}];')
    k = 0
    for args, symbol, target in a.sorted_transitions():
        if target in hidden or any(q in hidden for q in args):
            continue
        node = f"t{k}"
        k += 1
        lines.append(f'  {node} [shape=point, xlabel="{_dot_escape(symbol)}"];')
        lines.append(f'  {node} -> q{target} [label="{_dot_escape(symbol)}"];')
        for i, q in enumerate(args, 1):
            lines.append(f'  q{q} -> {node} [style=dashed, arrowhead=none, label="{i}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(a: TreeAutomaton, trace: BuildTrace | None = None) -> str:
    doc = {
        "states": [
            {"id": q, "label": str(a.labels[q]), "final": q in a.finals} for q in a.states
        ],
        "transitions": [
            {"args": list(args), "symbol": symbol, "target": target}
            for args, symbol, target in a.sorted_transitions()
        ],
        "fixed_point": None if trace is None else trace.fixed_point,
        "rounds": None if trace is None else trace.rounds_used,
    }
    return json.dumps(doc, indent=2)
