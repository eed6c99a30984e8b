"""
Normalizers and product expansions
==================================

Count stood-up states by weight, then read the same numbers off a
product by extracting one power of z.
"""

from blockid.identities import check_main, run_identity
from blockid.normalizers import s_even, s_odd
from blockid.series import coeff_z, family_k2, product_rhs

# The even normalizer as a table: rows are powers of q, columns powers of t.
even = s_even(8)
print("depth used:", even.depth_used, "stabilized:", even.stabilized)
for n in range(9):
    row = {m: c for (dq, m, _), c in even.series.items() if dq == n}
    print(f"q^{n}:", row)

# The same coefficients come out of the z^0 term of a two-sided product.
plus = product_rhs(family_k2(1), 8) + product_rhs(family_k2(-1), 8)
print(coeff_z(plus, 0) == even.series * 2)

# The odd class at t = 1 is a plain q-series.
print(s_odd(10).series.at_t(1).q_coeffs())

# Full checks, with a report per comparison.
rep = check_main(10, 6)
print(rep.identity, rep.equal, len(rep.checks), "comparisons")
print(run_identity("k-exclusion:3", 8, 4).equal)
