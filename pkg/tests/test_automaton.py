import functools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import EX5, EX6_ALPHABET, P, T, corpus, ground_trees, small_trees
from treederiv.automaton import (
    SINK,
    TreeAutomaton,
    accepts,
    build_derivative_automaton,
    is_deterministic,
    membership_via_rounds,
    naive_pd_automaton,
    run,
    to_dot,
    to_json,
)
from treederiv.corpus import DEFAULT_ALPHABET as A
from treederiv.derivation import d_tree
from treederiv.expressions import Eps, Sum, Symbol
from treederiv.errors import InvalidExpression, NonNullaryExpression, UnknownSymbol
from treederiv.oracle import contains, enumerate_language, member_bruteforce, quotient_by_contexts, universe
from treederiv.trees import RankedAlphabet

INVALID = Sum((Symbol("a"), Eps(1)))


@functools.lru_cache(maxsize=None)
def ex6(max_rounds=32):
    return build_derivative_automaton(P(EX5), max_rounds, EX6_ALPHABET)


@functools.lru_cache(maxsize=None)
def built(e, **kw):
    return build_derivative_automaton(e, 8, A, **dict(kw))


def d(text):
    return d_tree(P(EX5), T(text))


def q(automaton, text):
    return automaton.state_of(d(text))


def f_transitions(automaton, omit_sink=True):
    sink = automaton.labels.index(SINK) if SINK in automaton.labels else None
    out = set()
    for args, symbol, target in automaton.transitions:
        if omit_sink and (target == sink or sink in args):
            continue
        out.add((args, symbol, target))
    return out


# -- Example 6 ---------------------------------------------------------------


class TestExample6:
    def test_fixed_point_round_3(self):
        a, trace = ex6()
        assert trace.fixed_point
        assert trace.rounds_used == 3
        assert len(trace.rounds) == 4

    def test_states(self):
        a, _ = ex6()
        expected = {d("a"), d("b"), d("f[a,a]"), d("f[f[a,a],a]"), SINK}
        assert set(a.labels) == expected
        assert len(a.labels) == 5
        assert d("c") == d("b")

    def test_state_labels_print(self):
        a, _ = ex6()
        assert str(d("f[f[a,a],a]")) == "!(g[%1]@).af[f[a,a],a]"
        assert str(d("b")) == "!0{1}.af[f[a,a],a]"

    def test_finals(self):
        a, _ = ex6()
        assert a.finals == {q(a, "b")}

    def test_non_sink_transitions(self):
        a, _ = ex6()
        qa, qb, qfaa, qt = (q(a, x) for x in ("a", "b", "f[a,a]", "f[f[a,a],a]"))
        assert f_transitions(a) == {
            ((), "a", qa),
            ((), "b", qb),
            ((), "c", qb),
            ((qb,), "g", qb),
            ((qt,), "g", qt),
            ((qa, qa), "f", qfaa),
            ((qfaa, qa), "f", qt),
            ((qb, qb), "f", qb),
            ((qb, qt), "f", qb),
            ((qt, qb), "f", qb),
            ((qt, qt), "f", qb),
        }

    def test_transition_counts(self):
        a, _ = ex6()
        kept = f_transitions(a)
        by_arity = {n: sum(1 for tr in kept if len(tr[0]) == n) for n in (0, 1, 2)}
        assert by_arity == {0: 3, 1: 2, 2: 6}

    def test_complete(self):
        a, _ = ex6()
        n = len(a.labels)
        assert len(a.transitions) == 3 + n + n * n

    def test_deterministic(self):
        assert is_deterministic(ex6()[0])

    def test_round_0(self):
        a, trace = ex6()
        r0 = trace.rounds[0]
        qa, qb, sink = q(a, "a"), q(a, "b"), a.state_of(SINK)
        assert r0.states == {qa, qb}
        assert r0.finals == {qb}
        assert r0.transitions == {((), "a", qa), ((), "b", qb), ((), "c", qb)}
        assert r0.witnesses == {qa: T("a"), qb: T("b")}
        assert sink not in r0.states

    def test_round_1(self):
        a, trace = ex6()
        r1 = trace.rounds[1]
        qa, qb, qfaa, sink = q(a, "a"), q(a, "b"), q(a, "f[a,a]"), a.state_of(SINK)
        assert r1.states == {qa, qb, qfaa, sink}
        assert r1.finals == {qb}
        assert r1.witnesses[qfaa] == T("f[a,a]")
        visible = {tr for tr in r1.transitions if sink not in tr[0] + (tr[2],)}
        assert visible - trace.rounds[0].transitions == {
            ((qa, qa), "f", qfaa),
            ((qb, qb), "f", qb),
            ((qb,), "g", qb),
        }

    def test_round_2(self):
        a, trace = ex6()
        qa, qfaa, qt = q(a, "a"), q(a, "f[a,a]"), q(a, "f[f[a,a],a]")
        r1, r2 = trace.rounds[1], trace.rounds[2]
        assert r2.states - r1.states == {qt}
        assert r2.witnesses[qt] == T("f[f[a,a],a]")
        sink = a.state_of(SINK)
        visible = {tr for tr in r2.transitions - r1.transitions if sink not in tr[0] + (tr[2],)}
        assert visible == {((qfaa, qa), "f", qt)}

    def test_round_3_adds_no_state(self):
        _, trace = ex6()
        assert trace.rounds[3].states == trace.rounds[2].states

    def test_max_rounds_1(self):
        a, trace = ex6(1)
        assert not trace.fixed_point
        assert trace.rounds_used == 1
        assert len(trace.rounds) == 2
        full = ex6()[1]
        for n in (0, 1):
            assert trace.rounds[n].states == full.rounds[n].states
            assert trace.rounds[n].transitions == full.rounds[n].transitions
            assert trace.rounds[n].finals == full.rounds[n].finals

    def test_automaton_at(self):
        a, trace = ex6()
        a0 = trace.automaton_at(0, EX6_ALPHABET, a.labels)
        assert len(a0.labels) == 2
        assert accepts(a0, T("b")) and not accepts(a0, T("a"))

    @pytest.mark.parametrize(
        "text, member",
        [
            ("b", True),
            ("c", True),
            ("a", False),
            ("g[b]", True),
            ("g[c]", True),
            ("f[b,c]", True),
            ("f[a,a]", False),
            ("f[f[a,a],a]", False),
            ("f[f[f[a,a],a],b]", True),
            ("g[f[f[a,a],a]]", False),
            ("f[g[f[f[a,a],a]],g[f[f[a,a],a]]]", True),
            ("g[a]", False),
        ],
    )
    def test_accepts(self, text, member):
        a, _ = ex6()
        t = T(text)
        assert accepts(a, t) is member
        if t.height <= 3:
            assert member_bruteforce(t, P(EX5), EX6_ALPHABET) is member
        assert contains(P(EX5), t) is member
        assert membership_via_rounds(P(EX5), t, EX6_ALPHABET) is member

    def test_run_b_and_g_b(self):
        a, _ = ex6()
        assert run(a, T("b")) == {q(a, "b")}
        assert run(a, T("g[b]")) == {q(a, "b")}

    def test_run_unknown_symbol(self):
        a, _ = ex6()
        with pytest.raises(UnknownSymbol):
            run(a, T("h[b]"))


# -- small automata ------------------------------------------------------------


def test_empty_automaton_is_deterministic():
    a = TreeAutomaton(RankedAlphabet({}), (), frozenset(), frozenset())
    assert is_deterministic(a)


def test_duplicate_transition_not_deterministic():
    a = TreeAutomaton(
        RankedAlphabet({"a": 0}), (P("a"), P("b")), frozenset(), frozenset({((), "a", 0), ((), "a", 1)})
    )
    assert not is_deterministic(a)
    assert run(a, T("a")) == {0, 1}


def test_missing_transition_propagates_empty():
    alphabet = RankedAlphabet({"a": 0, "g": 1})
    a = TreeAutomaton(alphabet, (P("a"),), frozenset({0}), frozenset({((), "a", 0)}))
    assert run(a, T("g[a]")) == frozenset()
    assert not accepts(a, T("g[g[a]]"))


@pytest.mark.parametrize(
    "labels, finals, transitions",
    [
        ((P("a"),), {1}, set()),
        ((P("a"),), set(), {((0,), "a", 0)}),
        ((P("a"),), set(), {((), "a", 3)}),
    ],
)
def test_automaton_invariants(labels, finals, transitions):
    with pytest.raises(ValueError):
        TreeAutomaton(RankedAlphabet({"a": 0}), labels, frozenset(finals), frozenset(transitions))


def test_automaton_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        TreeAutomaton(RankedAlphabet({"a": 0}), (P("a"),), frozenset(), frozenset({((), "b", 0)}))


def test_automaton_of_a():
    alphabet = RankedAlphabet.parse("f:2,a:0,b:0")
    a, trace = build_derivative_automaton(P("a"), 32, alphabet)
    assert trace.fixed_point
    qa = run(a, T("a"))
    assert len(qa) == 1
    (state,) = qa
    assert str(a.labels[state]) == "%1"
    assert a.finals == {state}
    assert run(a, T("b")) == {a.state_of(SINK)}
    assert set(a.labels) == {a.labels[state], SINK}
    for t in universe(alphabet, 2):
        assert accepts(a, t) == member_bruteforce(t, P("a"), alphabet)


def test_build_rejects_bad_input():
    with pytest.raises(NonNullaryExpression):
        build_derivative_automaton(P("f[%1,a]"), 4)
    with pytest.raises(ValueError):
        build_derivative_automaton(P("a"), 0)
    with pytest.raises(InvalidExpression):
        build_derivative_automaton(INVALID, 4)


def test_max_states_truncates():
    a, trace = build_derivative_automaton(P(EX5), 32, EX6_ALPHABET, max_states=2)
    assert trace.truncated
    assert not trace.fixed_point


# -- naive partial-derivative automaton (unsound) -----------------------------------

COUNTER = "f[a,a]+f[a,b]+f[b,a]"


def test_naive_round_0():
    a, trace = naive_pd_automaton(P(COUNTER), 32)
    r0 = trace.rounds[0]
    labels = {str(a.labels[s]) for s in r0.states}
    assert labels == {"f[%1,a]", "f[a,%1]", "f[%1,b]", "f[b,%1]"}
    assert set(r0.witnesses.values()) == {T("a")}


def test_naive_accepts_outside_language():
    e = P(COUNTER)
    naive, _ = naive_pd_automaton(e, 32)
    real, _ = build_derivative_automaton(e, 32)
    assert accepts(naive, T("f[b,b]"))
    assert not accepts(real, T("f[b,b]"))
    assert not member_bruteforce(T("f[b,b]"), e)
    assert accepts(naive, T("f[a,a]"))


def test_naive_is_nondeterministic():
    naive, _ = naive_pd_automaton(P(COUNTER), 32)
    assert not is_deterministic(naive)


# -- export ---------------------------------------------------------------------------


def _dot_counts(text):
    lines = text.splitlines()
    states = [x for x in lines if x.strip().startswith("q") and "[label=" in x and "->" not in x]
    points = [x for x in lines if "shape=point" in x]
    return states, points


def test_dot_a0():
    a, trace = ex6()
    a0 = trace.automaton_at(0, EX6_ALPHABET, a.labels)
    states, points = _dot_counts(to_dot(a0, omit_sink=True))
    assert len(states) == 2
    assert len(points) == 3


def test_dot_a3():
    a, _ = ex6()
    text = to_dot(a, omit_sink=True)
    states, points = _dot_counts(text)
    assert len(states) == 4
    assert len(points) == 11
    assert sum("peripheries=2" in x for x in states) == 1
    assert text.count("style=dashed") == 2 * 6 + 2


def test_dot_keeps_sink_by_default():
    a, _ = ex6()
    states, points = _dot_counts(to_dot(a))
    assert len(states) == 5
    assert len(points) == len(a.transitions)


def test_dot_empty():
    a = TreeAutomaton(RankedAlphabet({}), (), frozenset(), frozenset())
    assert to_dot(a).splitlines()[0] == "digraph automaton {"
    assert to_dot(a).splitlines()[-1] == "}"
    assert "->" not in to_dot(a)


def test_dot_escapes_quotes():
    a = TreeAutomaton(RankedAlphabet({'"': 0}), (P("a"),), frozenset(), frozenset({((), '"', 0)}))
    assert 'xlabel="\\""' in to_dot(a)


def test_json_shape():
    a, trace = ex6()
    doc = json.loads(to_json(a, trace))
    assert doc["fixed_point"] is True
    assert doc["rounds"] == 3
    assert [s["id"] for s in doc["states"]] == list(range(5))
    assert [s["final"] for s in doc["states"]].count(True) == 1
    keys = [(tuple(t["args"]), t["symbol"], t["target"]) for t in doc["transitions"]]
    assert keys == sorted(keys)
    assert len(keys) == len(a.transitions)


def test_json_without_trace():
    a, _ = ex6()
    doc = json.loads(to_json(a))
    assert doc["fixed_point"] is None and doc["rounds"] is None


def test_exports_are_stable():
    a1, t1 = build_derivative_automaton(P(EX5), 32, EX6_ALPHABET)
    a2, t2 = build_derivative_automaton(P(EX5), 32, EX6_ALPHABET)
    assert to_dot(a1) == to_dot(a2)
    assert to_json(a1, t1) == to_json(a2, t2)


# -- corpus properties -------------------------------------------------------------

exprs = st.sampled_from(range(200)).map(lambda i: corpus()[i])


@given(exprs)
def test_deterministic_property(e):
    assert is_deterministic(built(e)[0])


@given(exprs)
def test_monotone_rounds(e):
    a, trace = built(e)
    rounds = trace.rounds
    for n, r in enumerate(rounds):
        assert set(r.witnesses) == set(r.states)
        if n == 0:
            continue
        prev = rounds[n - 1]
        assert r.states >= prev.states
        assert r.finals & prev.states == prev.finals
        assert r.transitions >= prev.transitions
        # tuples over states known before round n-1 were all derived by then
        known = rounds[n - 2].states if n >= 2 else frozenset()
        assert {tr for tr in r.transitions if set(tr[0]) <= known and tr[0]} == {
            tr for tr in prev.transitions if set(tr[0]) <= known and tr[0]
        }


@given(exprs)
def test_witnesses_derive_to_their_state(e):
    a, trace = built(e)
    for r in trace.rounds:
        for s, t in r.witnesses.items():
            assert d_tree(e, t) == a.labels[s]
            assert run(a, t) == {s}


@given(exprs, ground_trees(3))
def test_language_agreement_sampled(e, t):
    a, trace = built(e)
    if trace.fixed_point:
        assert accepts(a, t) == member_bruteforce(t, e, A)


@given(exprs)
def test_incremental_matches_full_recompute(e):
    a, trace = built(e)
    b, trace_b = built(e, incremental=False)
    assert a == b
    assert trace.fixed_point == trace_b.fixed_point
    assert [r.transitions for r in trace.rounds] == [r.transitions for r in trace_b.rounds]


def _canonical(a):
    return (
        frozenset(a.labels),
        frozenset(a.labels[s] for s in a.finals),
        frozenset((tuple(a.labels[x] for x in args), f, a.labels[t]) for args, f, t in a.transitions),
    )


@given(exprs)
def test_witness_independence(e):
    a, trace = built(e)
    b, trace_b = built(e, prefer_max=True)
    if trace.fixed_point and trace_b.fixed_point:
        assert _canonical(a) == _canonical(b)


@given(exprs)
@settings(max_examples=30)
def test_state_meaning(e):
    a, trace = built(e)
    r = trace.rounds[-1]
    for s, t in r.witnesses.items():
        if t.height > 1:
            continue
        lhs = enumerate_language(a.labels[s], 2, A).trees
        assert lhs == quotient_by_contexts(e, t, 2, A)


@given(exprs, ground_trees(2))
def test_membership_via_rounds_matches_automaton(e, t):
    a, trace = built(e)
    if trace.fixed_point:
        assert membership_via_rounds(e, t, A) == accepts(a, t)


@pytest.mark.slow
@pytest.mark.parametrize("chunk", range(4))
def test_language_agreement_height3(chunk):
    trees = universe(A, 3)
    for e in corpus()[chunk::4]:
        a, trace = built(e)
        if not trace.fixed_point:
            continue
        for t in trees:
            assert accepts(a, t) == member_bruteforce(t, e, A), (str(e), str(t))


def test_membership_small_trees_ex6():
    e = P(EX5)
    for t in small_trees(2, EX6_ALPHABET):
        assert membership_via_rounds(e, t, EX6_ALPHABET) == accepts(ex6()[0], t)
