"""Bottom-Up derivatives of extended regular tree expressions."""

from .automaton import (
    BuildTrace,
    Round,
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
from .derivation import d_eps, d_symbol, d_tree
from .errors import (
    ArityMismatch,
    DuplicateIndex,
    IndexNotPresent,
    InvalidExpression,
    MissingIndices,
    NonInjectiveMap,
    NonNullaryExpression,
    ParseError,
    TreeDerivError,
    UnknownSymbol,
)
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
    expr_eps_indices,
    expr_inc_eps,
    expr_order,
    normalize,
    nullable,
    remap_eps,
    validate,
)
from .oracle import BoundedLanguage, contains, enumerate_language, member_bruteforce, quotient_set
from .partial import TermSet, pd_eps, pd_symbol, pd_tree
from .syntax import SourceSpan, parse_expr, parse_tree, print_expr, print_tree
from .trees import Hole, Node, RankedAlphabet, Tree, compose, eps_indices, inc_eps, leaf, tree_order

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
