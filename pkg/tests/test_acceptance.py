"""Acceptance criteria 1 to 10; each test prints one PASS/FAIL line."""

import functools
import time

import pytest

from helpers import EX5, EX6_ALPHABET, EX7, EX8, P, T, corpus, small_trees
from treederiv.automaton import (
    SINK,
    accepts,
    build_derivative_automaton,
    is_deterministic,
    membership_via_rounds,
    naive_pd_automaton,
)
from treederiv.corpus import DEFAULT_ALPHABET as A
from treederiv.derivation import d_tree
from treederiv.expressions import normalize
from treederiv.oracle import enumerate_language, member_bruteforce, quotient_by_contexts, quotient_set
from treederiv.partial import pd_symbol, pd_tree

MAX_STATES = 500


@pytest.fixture
def report(capsys):
    def emit(n, ok, elapsed, limit, detail=""):
        passed = ok and elapsed < limit
        with capsys.disabled():
            status = "PASS" if passed else "FAIL"
            print(f"\nACCEPTANCE {n:>2} {status} ({elapsed:.2f}s < {limit}s) {detail}".rstrip())
        assert ok, detail
        assert elapsed < limit, f"took {elapsed:.1f}s, limit {limit}s"

    return emit


@functools.lru_cache(maxsize=None)
def corpus_automata():
    start = time.perf_counter()
    out = [build_derivative_automaton(e, 32, A, max_states=MAX_STATES) for e in corpus()]
    return out, time.perf_counter() - start


def test_1_quotient_example(report):
    start = time.perf_counter()
    got = quotient_set({T("f[f[g[a],%1],g[a]]")}, T("g[a]"))
    ok = got == {T("f[f[%1,%2],g[a]]"), T("f[f[g[a],%2],%1]")}
    report(1, ok, time.perf_counter() - start, 1, " ".join(sorted(map(str, got))))


def test_2_quotient_chain(report):
    start = time.perf_counter()
    t = T("f[%2,f[a,a]]")
    step1 = quotient_set({t}, T("a"))
    step2 = quotient_set(step1, T("a"))
    whole = quotient_set({t}, T("f[a,a]"))
    ok = (
        step1 == {T("f[%3,f[%1,a]]"), T("f[%3,f[a,%1]]")}
        and step2 == {T("f[%4,f[%2,%1]]"), T("f[%4,f[%1,%2]]")}
        # the untouched %2 is shifted to %3
        and whole == {T("f[%3,%1]")}
        and quotient_set({t}, t) == {T("%1")}
    )
    report(2, ok, time.perf_counter() - start, 1, f"f[a,a]: {' '.join(map(str, whole))}")


def test_3_derivative(report):
    start = time.perf_counter()
    got = normalize(d_tree(P(EX5), T("f[f[a,a],a]")))
    ok = got == normalize(P("!((g[%1])@).af[f[a,a],a]"))
    report(3, ok, time.perf_counter() - start, 1, str(got))


def test_4_automaton(report):
    start = time.perf_counter()
    a, trace = build_derivative_automaton(P(EX5), 32, EX6_ALPHABET)
    elapsed = time.perf_counter() - start
    e = P(EX5)
    qa, qb, qfaa, qt = (a.state_of(d_tree(e, T(x))) for x in ("a", "b", "f[a,a]", "f[f[a,a],a]"))
    sink = a.state_of(SINK)
    visible = {tr for tr in a.transitions if sink not in tr[0] + (tr[2],)}
    expected = {
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
    counts = {k: sum(1 for tr in visible if len(tr[0]) == k) for k in (0, 1, 2)}
    ok = (
        trace.fixed_point
        and trace.rounds_used == 3
        and len(a.labels) - 1 == 4
        and a.finals == {qb}
        and visible == expected
        and is_deterministic(a)
    )
    detail = f"rounds={trace.rounds_used} states={len(a.labels) - 1}+sink f={counts[2]} g={counts[1]} nullary={counts[0]}"
    report(4, ok, elapsed, 5, detail)


def test_5_partial_derivatives(report):
    start = time.perf_counter()
    first = pd_symbol(P(EX7), "a", 0)
    seven = pd_tree(P(EX7), T("g[f[b,a]]"))
    eight = pd_tree(P(EX8), T("f[f[a,a],a]"))
    closure = P("(g[%1])@")
    ok = len(first) == 3 and seven == {closure} and eight == {closure}
    report(5, ok, time.perf_counter() - start, 1, f"|pd_a|={len(first)} {seven} {eight}")


def test_6_counterexample(report):
    start = time.perf_counter()
    e = P("f[a,a]+f[a,b]+f[b,a]")
    naive, trace = naive_pd_automaton(e, 32)
    real, _ = build_derivative_automaton(e, 32)
    bb = T("f[b,b]")
    greedy = set(trace.rounds[0].witnesses.values()) == {T("a")}
    ok = greedy and accepts(naive, bb) and not accepts(real, bb) and not member_bruteforce(bb, e)
    report(6, ok, time.perf_counter() - start, 1, "naive accepts f[b,b]; derivative automaton and oracle reject")


def test_7_oracle_equivalence(report):
    start = time.perf_counter()
    exprs, trees = corpus(), small_trees()
    bad = [
        (str(e), str(t))
        for e in exprs
        for t in trees
        if membership_via_rounds(e, t, A) != member_bruteforce(t, e, A)
    ]
    elapsed = time.perf_counter() - start
    pairs = len(exprs) * len(trees)
    report(7, not bad and len(exprs) >= 200, elapsed, 300, f"{pairs - len(bad)}/{pairs} pairs agree {bad[:3]}")


def test_8_soundness(report):
    start = time.perf_counter()
    exprs, trees = corpus(), small_trees()
    bad = []
    for e in exprs:
        for t in trees:
            expected = quotient_by_contexts(e, t, 2, A)
            derived = enumerate_language(d_tree(e, t), 2, A).trees
            partial = frozenset().union(*(enumerate_language(x, 2, A).trees for x in pd_tree(e, t)))
            if derived != expected or partial != expected:
                bad.append((str(e), str(t)))
    elapsed = time.perf_counter() - start
    pairs = len(exprs) * len(trees)
    report(8, not bad, elapsed, 600, f"{pairs - len(bad)}/{pairs} pairs agree {bad[:3]}")


def test_9_determinism(report):
    start = time.perf_counter()
    ex6, _ = build_derivative_automaton(P(EX5), 32, EX6_ALPHABET)
    built, _ = corpus_automata()
    nondet = [str(e) for e, (a, _) in zip(corpus(), built) if not is_deterministic(a)]
    ok = is_deterministic(ex6) and not nondet
    report(9, ok, time.perf_counter() - start, 600, f"{len(built) + 1} automata deterministic {nondet[:3]}")


def test_10_bounded_construction(report):
    built, elapsed = corpus_automata()
    fixed = sum(trace.fixed_point for _, trace in built)
    flagged = sum(not trace.fixed_point for _, trace in built)
    ok = fixed + flagged == len(corpus()) and all(trace.rounds_used <= 32 for _, trace in built)
    truncated = sum(trace.truncated for _, trace in built)
    longest = max(trace.rounds_used for _, trace in built)
    detail = f"{fixed} fixed points, {flagged} flagged ({truncated} at the state cap), max rounds {longest}"
    report(10, ok, elapsed, 600, detail)
