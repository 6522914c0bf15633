# %% [markdown]
# # The derivative automaton
#
# States are normalized derivatives. Each round derives by trees built from
# the witnesses of known states, and the construction stops once a round
# adds no state.

# %%
from treederiv import RankedAlphabet, accepts, build_derivative_automaton, parse_expr, parse_tree, to_dot
from treederiv.automaton import SINK

alphabet = RankedAlphabet.parse("f:2,g:1,a:0,b:0,c:0")
e, alphabet = parse_expr("!(g[a]*a).af[f[a,a],a]", alphabet)
automaton, trace = build_derivative_automaton(e, 32, alphabet)
print("fixed point:", trace.fixed_point, "after", trace.rounds_used, "rounds")

# %%
for q, label in enumerate(automaton.labels):
    print("*" if q in automaton.finals else " ", f"q{q}", label)

# %% [markdown]
# Round by round growth of the state set, with the witness of each state.

# %%
for n, r in enumerate(trace.rounds):
    print(n, {f"q{q}": str(t) for q, t in sorted(r.witnesses.items())})

# %% [markdown]
# Transitions that avoid the sink.

# %%
sink = automaton.state_of(SINK)
for args, symbol, target in automaton.sorted_transitions():
    if sink not in args + (target,):
        print(f"{symbol}({','.join(f'q{x}' for x in args)}) -> q{target}")

# %%
for text in ("b", "g[c]", "f[a,a]", "f[f[f[a,a],a],b]"):
    print(text, accepts(automaton, parse_tree(text)))

# %% [markdown]
# Graphviz rendering without the sink.

# %%
print(to_dot(automaton, omit_sink=True))
