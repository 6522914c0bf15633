# %% [markdown]
# # Partial derivatives and a naive automaton
#
# Partial derivatives split a derivative into a set of simpler terms whose
# languages cover the quotient. Feeding them to the round construction with
# shared witnesses does not give a correct automaton.

# %%
from treederiv import accepts, build_derivative_automaton, member_bruteforce, naive_pd_automaton, parse_expr, parse_tree
from treederiv.partial import pd_tree

e, _ = parse_expr("f[a,a+b]+(g[a]*a).af[b,a]")
for text in ("a", "f[b,a]", "g[f[b,a]]"):
    print(f"{text:>10}", sorted(map(str, pd_tree(e, parse_tree(text)))))

# %% [markdown]
# A finite language where the greedy witness choice goes wrong: all four
# first-round terms share the witness `a`.

# %%
e, _ = parse_expr("f[a,a]+f[a,b]+f[b,a]")
naive, trace = naive_pd_automaton(e, 32)
print({str(naive.labels[q]): str(t) for q, t in trace.rounds[0].witnesses.items()})

# %%
bb = parse_tree("f[b,b]")
real, _ = build_derivative_automaton(e, 32)
print("naive accepts f[b,b]:", accepts(naive, bb))
print("derivative automaton accepts f[b,b]:", accepts(real, bb))
print("oracle:", member_bruteforce(bb, e))
