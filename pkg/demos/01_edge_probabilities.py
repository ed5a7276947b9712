"""
Edge probabilities on the sphere
================================

Two independent uniform points on the sphere in R^d are joined when their
inner product is at least t.  This walks through the threshold for a given
edge probability and how close the Gaussian surrogate p0 gets.
"""

import numpy as np

from spherical_rgg import edge_prob_exact, gaussian_edge_prob, pp0_ratio, sample_rgg, threshold

# the threshold t_{p,d} shrinks like 1/sqrt(d)
for d in (10, 100, 10_000, 10**8):
    t = threshold(0.05, d)
    print(f"d={d:>9}  t={t:.6g}  sqrt(d) t={np.sqrt(d) * t:.5f}")

# in d = 3 the inner product is uniform on [-1, 1]
print("t_{0.25,3} =", threshold(0.25, 3))

# p0 = 1 - Phi(sqrt(d) t) slightly overestimates p
for d in (10**4, 10**6, 10**8):
    t, p0, predicted, actual = pp0_ratio(0.01, d)
    print(f"d={d:.0e}  p/p0 - 1 = {actual - 1:.3e}   -d t^4/4 = {predicted - 1:.3e}")

# an empirical check on a sampled graph
d, p, n = 50, 0.1, 200
t = threshold(p, d)
g = sample_rgg(n, d, t, rng=1)
print(f"sampled {g.num_edges} edges, expected {p * n * (n - 1) / 2:.0f}")
print("exact tail at t:", edge_prob_exact(t, d), " surrogate:", float(gaussian_edge_prob(t, d)))
