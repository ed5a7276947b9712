"""
The inversion contour and the tilted density
============================================

Deforming the Fourier inversion integral onto gamma(x) = d t (x - i y(x))
turns the Gaussian integrand into a probability density in x.  The curve
comes from a first-order ODE integrated backward from x_max.
"""

import numpy as np
from scipy import integrate

from spherical_rgg import gaussian_edge_prob, sample_tilted, solve_contour, tilted_density

d, t = 100, 0.3
curve = solve_contour(d, t)
print(f"d t^2 = {curve.dt2:.2f}, x_max = {curve.x_max:.4f}, truncated mass <= {curve.tail_mass:.1e}")
print("y(0) =", float(curve.y(0.0)), " band [1, %.4f]" % (1 + 1 / curve.dt2))

# a few rows of the tabulated curve
for x in np.linspace(0, curve.x_max, 5):
    print(f"x={x:.3f}  y={float(curve.y(x)):.6f}  y'={float(curve.dy(x)):+.6f}")

p0 = float(gaussian_edge_prob(t, d))
total, _ = integrate.quad(lambda x: tilted_density(curve, x, p0), -curve.x_max, curve.x_max, points=[0])
print("integral of the tilted density:", total)

stats = {}
x = sample_tilted(curve, p0, rng=5, size=20_000, stats=stats)
print(f"sample sd {x.std():.4f}, acceptance {stats['accepted'] / stats['proposed']:.3f}")
