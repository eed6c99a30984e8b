"""
Stationary law on a finite window
=================================

Check detailed balance exactly, solve a small chain with rational
arithmetic, then compare a Gillespie run against the exact occupations.
"""

from fractions import Fraction

import numpy as np

from blockid.blocking import derive_params, model_table
from blockid.simulate import (
    build_window_chain, detailed_balance_verify, exact_occupation, exact_stationary,
    gillespie, mu_weight, proportional_to,
)
from blockid.standup import window_states

rates = model_table("two-exclusion", Fraction(1, 2))
params = derive_params(rates)
print("qtilde =", params.qtilde, " t^2 =", params.t_squared)

# Every move inside the window balances against the product weight.
res = detailed_balance_verify(rates, 0, window_states(2, -2, 3))
print("balanced:", bool(res), res.edges_checked, "edges")

# %%
# Exact stationary vector for one conserved component.
chain = build_window_chain(rates, -2, 3, 0)
pi = exact_stationary(chain)
print(len(chain.states), "states")
print(proportional_to(pi, [mu_weight(s, params) for s in chain.states], params.t_squared))

# %%
# Simulate and compare, site by site.
best = chain.states[int(np.argmax([float(p) for p in pi]))]
stats = gillespie(chain, best, max_jumps=200_000, seed=0)
exact = np.array(exact_occupation(chain, pi, stats.sites), dtype=float)
z = (stats.occupation - exact) / np.maximum(stats.standard_errors(), 1e-12)
print("largest |z|:", np.abs(z).max())
print(np.round(stats.occupation, 3))
