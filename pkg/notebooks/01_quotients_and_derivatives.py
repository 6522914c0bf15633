# %% [markdown]
# # Quotients and derivatives
#
# A bottom-up quotient removes one occurrence of a tree from a context and
# leaves the placeholder `%1` where it was. Derivatives compute the same
# thing on expressions without enumerating the language.

# %%
from treederiv import d_tree, enumerate_language, normalize, parse_expr, parse_tree, quotient_set
from treederiv.oracle import quotient_by_contexts

T = lambda text: parse_tree(text)

# %% [markdown]
# Quotient of a single context by `g[a]`. Both occurrences are cut out.

# %%
for c in sorted(map(str, quotient_set({T("f[f[g[a],%1],g[a]]")}, T("g[a]")))):
    print(c)

# %% [markdown]
# Quotienting twice by `a`, then once by `f[a,a]`. Untouched placeholders
# are shifted up so that `%1` always names the fresh hole.

# %%
t = T("f[%2,f[a,a]]")
step = {t}
for _ in range(2):
    step = quotient_set(step, T("a"))
    print(sorted(map(str, step)))
print(sorted(map(str, quotient_set({t}, T("f[a,a]")))))
print(sorted(map(str, quotient_set({t}, t))))

# %% [markdown]
# The derivative of an expression with negation and a starred substitution.

# %%
e, alphabet = parse_expr("!(g[a]*a).af[f[a,a],a]")
for text in ("a", "f[a,a]", "f[f[a,a],a]"):
    print(f"{text:>12}  {d_tree(e, T(text))}")

# %% [markdown]
# The derivative denotes exactly the quotient. Compare the trees of height at
# most 2 on both sides for a small expression.

# %%
e, alphabet = parse_expr("f[a,b]+f[g[a],a]+g[a]*b")
probe = T("a")
lhs = enumerate_language(d_tree(e, probe), 2, alphabet).sorted()
rhs = sorted(quotient_by_contexts(e, probe, 2, alphabet), key=str)
print([str(x) for x in lhs])
print(set(lhs) == set(rhs))
