"""
Gap sequences and generalized Frobenius partitions
==================================================

A stood-up state (a sequence of gaps) maps to a two-rowed array whose
weight matches the gap weight.  Shifting the offset class and the
classical Frobenius correspondence sit alongside.
"""

from blockid import gfp as G
from blockid.standup import EtaState, OmegaState, conserved_n, lay_down, stand_up

# %%
# Start from particles on the line and stand them up.
eta = EtaState(2, -3, (1, 2, 0, 0, 2, 1, 1, 2, 2))
om = stand_up(eta)
print("n =", conserved_n(eta), "gaps:", om.prefix(12), "weight", om.weight())
print(lay_down(om, conserved_n(eta)) == eta)

# %%
# The gap sequence becomes an array with bounded repetition.
om = OmegaState(2, 0, (3, 0, 1, 2, 2, 0, 1, 1, 0, 1, 0))
g = G.psi(om)
print(g, "weight", g.weight, "distinct parts", G.distinct_parts(g))
print(G.psi_inverse(g) == om)

# Its point picture: rows slide right by steps of two.
print(G.to_diagram(g).render())

# %%
# Moving between offset classes costs a quadratic amount of weight.
for ell in range(-2, 3):
    h = G.phi(g, ell)
    print(ell, h, "weight", h.weight, "offset", h.offset)

# %%
# Distinct-part arrays and ordinary partitions.
f = G.frobenius((8, 8, 7, 3, 2, 1, 1))
print(f, G.frobenius_inverse(f))
print(G.wright(f, 4))

# How many arrays per weight, split by the number of distinct parts.
for n in range(1, 7):
    by_m = {}
    for a in G.enumerate_gfps(n, 0, 2):
        by_m[G.distinct_parts(a)] = by_m.get(G.distinct_parts(a), 0) + 1
    print(n, dict(sorted(by_m.items())))
