import functools

"""Shared test helpers: parsing shortcuts, the seeded corpus and hypothesis strategies."""

from hypothesis import strategies as st

from treederiv.corpus import DEFAULT_ALPHABET, generate_corpus, random_expr
from treederiv.oracle import universe
from treederiv.syntax import parse_expr, parse_tree
from treederiv.trees import Hole, Node, RankedAlphabet, tree_key

EX6_ALPHABET = RankedAlphabet.parse("f:2,g:1,a:0,b:0,c:0")
EX5 = "!(g[a]*a).af[f[a,a],a]"
EX7 = "f[a,a+b]+(g[a]*a).af[b,a]"
EX8 = "(g[a]*a).af[f[a,a],a]"


def P(text, alphabet=None):
    return parse_expr(text, alphabet)[0]


def T(text, alphabet=None):
    return parse_tree(text, alphabet)


@functools.lru_cache(maxsize=None)
def corpus(count=200, seed=0):
    return tuple(generate_corpus(count, seed))


@functools.lru_cache(maxsize=None)
def small_trees(h=2, alphabet=DEFAULT_ALPHABET):
    return tuple(sorted(universe(alphabet, h), key=tree_key))


# -- hypothesis strategies -----------------------------------------------------


def nullary_exprs(depth=3):
    return st.randoms(use_true_random=False).map(lambda rng: random_expr(rng, depth))


def exprs_with(indices, depth=3):
    return st.randoms(use_true_random=False).map(lambda rng: random_expr(rng, depth, frozenset(indices)))


def ground_trees(max_height=2):
    leaves = st.sampled_from([Node("a"), Node("b")])

    def extend(inner):
        return st.one_of(
            st.builds(lambda c: Node("g", (c,)), inner),
            st.builds(lambda l, r: Node("f", (l, r)), inner, inner),
        )

    return st.recursive(leaves, extend, max_leaves=4).filter(lambda t: t.height <= max_height)


@st.composite
def trees_with_holes(draw, max_index=5):
    """A tree over f, g, a, b whose leaves may be distinct placeholders."""
    t = draw(ground_trees(3))
    fresh = iter(draw(st.permutations(range(1, max_index + 1))))

    def punch(u):
        if not u.children:
            if draw(st.booleans()):
                j = next(fresh, None)
                if j is not None:
                    return Hole(j)
            return u
        return Node(u.symbol, tuple(punch(c) for c in u.children))

    return punch(t)
