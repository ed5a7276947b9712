"""
Inclusion divergence between Erdos-Renyi graphs
===============================================

For G(n, p) against G(n, q) the minimizing class of graphs is an edge-count
cutoff, so the divergence is a one-dimensional scan over g.
"""

import math

from spherical_rgg import idiv_er

r = idiv_er(2, 0.1, 0.2)
print("n=2, p=0.1, q=0.2:", r.value, "at g =", r.argmin_g)

# equal densities are indistinguishable
print("p == q:", idiv_er(50, 0.05, 0.05).value)

# a density ratio of 2 stays far from zero at every size
for n in (10, 30, 100, 300):
    q = 4 / n**2
    print(f"n={n:>3}  p=2q: {idiv_er(n, 2 * q, q).value:.4f}"
          f"   p=q(1+1/log n): {idiv_er(n, q * (1 + 1 / math.log(n)), q).value:.4f}")

# once n^2 q grows and |p - q| n^2 -> 0 the divergence does vanish
for n in (30, 100, 300, 1000, 3000):
    q = 1 / n
    p = q + n**-2.5
    print(f"n={n:>4}  q=1/n, p=q+n^-2.5: {idiv_er(n, p, q).value:.4f}")
