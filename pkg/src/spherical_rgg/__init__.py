"""Numerics for sparse spherical random geometric graphs.

Exact spherical edge probabilities and thresholds, the inclusion divergence
between Erdos-Renyi laws, characteristic functions of spherical Wishart
matrices, and graph inclusion probabilities by contour-deformed Fourier
inversion, each with an independent Monte Carlo or quadrature oracle.
"""

__version__ = "0.1.0"

from .contour import (
    ContourCurve,
    contour_deriv,
    contour_point,
    initial_y0,
    sample_tilted,
    solve_contour,
    tilted_density,
    tilted_envelope,
)
from .divergence import IdivResult, binom_tail, idiv_er
from .estimate import McEstimate
from .exceptions import ContourError, DiagnosticError, DomainError
from .graphs import (
    Graph,
    GraphStats,
    class_membership,
    contains,
    graph_stats,
    sample_er,
    sample_gram,
    sample_rgg,
    sample_sphere_points,
)
from .inclusion import (
    ConditionReport,
    InclusionEstimate,
    inclusion_estimate_gaussian,
    inclusion_prob_fourier,
    inclusion_prob_gaussian,
    inclusion_prob_mc,
    mainmain_report,
    ratio_experiment,
)
from .specialfns import (
    ModelParams,
    edge_prob_exact,
    gaussian_edge_prob,
    normal_quantile,
    log_gaussian_edge_prob,
    pp0_prediction,
    pp0_ratio,
    surface_density,
    threshold,
)
from .wishart import (
    beta_point,
    beta_prime,
    eta_density,
    gaussian_cf,
    hollow_matrix,
    is_hollow,
    log_eta_density,
    op_norm,
    pairing,
    phi_v_modulus_bound,
    sample_eta,
    spherical_wishart_cf,
    spherical_wishart_cf_direct,
    wishart_cf,
)
