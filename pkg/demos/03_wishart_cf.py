"""
Characteristic function of the spherical Wishart matrix
=======================================================

V is the Gram matrix of n uniform sphere points with its diagonal removed.
Its characteristic function is estimated by a steepest-descent
representation and checked against direct simulation, and for a single pair
against the one-dimensional Fourier transform of the inner-product density.
"""

import math

from scipy import integrate

from spherical_rgg import (
    gaussian_cf,
    hollow_matrix,
    phi_v_modulus_bound,
    spherical_wishart_cf,
    spherical_wishart_cf_direct,
    surface_density,
)

d = 20
for theta in (0.5, 2.0, 5.0, 10.0):
    m = hollow_matrix(2, [(0, 1)], [theta])
    sd = spherical_wishart_cf(m, d, 50_000, rng=1)
    dr = spherical_wishart_cf_direct(m, d, 50_000, rng=2)
    quad, _ = integrate.quad(lambda v: math.cos(theta * v) * surface_density(v, d), -1, 1)
    print(f"theta={theta:>4}: steepest {sd.real:.4f}+-{sd.stderr_re:.4f}  "
          f"direct {dr.real:.4f}+-{dr.stderr_re:.4f}  quadrature {quad:.4f}  "
          f"gaussian {gaussian_cf(m, d).real:.4f}  bound {phi_v_modulus_bound(m, d):.3g}")

# three vertices with a complex Theta
m = hollow_matrix(3, [(0, 1), (1, 2), (0, 2)], [3.0 - 1.0j, -2.0, 1.5j])
est = spherical_wishart_cf(m, 40, 100_000, rng=3)
print("triangle Theta:", complex(est.mean), "+-", est.stderr)

# outside ||Theta|| < d the contour is scaled automatically
m = hollow_matrix(2, [(0, 1)], [10.0])
est = spherical_wishart_cf(m, 5, 100_000, rng=4)
print("theta=10, d=5:", est.real, "+-", est.stderr_re)
