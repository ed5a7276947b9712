"""Labeled inclusion probabilities ``Pr[G(n, p, d) contains G]``.

Three engines:

* ``exact_gaussian``: the Gaussian surrogate ``G(n, p0)``, where the answer is
  ``p0^sigma``.
* ``monte_carlo``: frequency of the event ``V_jk >= t`` on every edge, with
  exact Gram matrices of sphere points.
* ``fourier``: contour-deformed Fourier inversion.  Drawing every edge
  coordinate ``T_e`` from the tilted density and setting
  ``Theta = gamma(T)`` on the edges gives

      Pr = p0^sigma * Re E_T[phi_V(Theta) / phi_M(Theta)],

  and ``phi_V`` is itself estimated by the steepest-descent representation.
  The nested estimator is unbiased because the ratio is linear in
  ``phi_V``.

Isolated vertices never matter and are stripped before any computation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import solve_contour, sample_tilted, contour_point
from .estimate import MIN_BATCHES, McEstimate, as_seed_sequence, run_batches, split_budget
from .exceptions import DiagnosticError, DomainError
from .graphs import class_membership, graph_stats, sample_er, sample_gram
from .specialfns import ModelParams, log_gaussian_edge_prob
from .wishart import auto_scale, sample_eta, steepest_descent_values

METHODS = ("exact_gaussian", "fourier", "monte_carlo")
MAX_VIOLATION_RATE = 1e-3
IMAG_SIGMAS = 4.0
_OUTER_CHUNK = 64


@dataclass(frozen=True)
class InclusionEstimate:
    """Inclusion probability with its provenance.

    Attributes
    ----------
    value, stderr : float
    method : str
        One of ``exact_gaussian``, ``fourier``, ``monte_carlo``.
    log_p0_power : float
        ``sigma * log p0``.
    ratio : McEstimate or None
        Estimate of ``E[phi_V / phi_M]`` for the Fourier engine.
    diagnostics : dict
    """

    value: float
    stderr: float
    method: str
    log_p0_power: float
    ratio: McEstimate = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        """JSON-ready summary."""
        r = self.ratio
        return {
            "method": self.method,
            "value": self.value,
            "stderr": self.stderr,
            "log_p0_power": self.log_p0_power,
            "ratio_mean": None if r is None else r.real,
            "ratio_stderr": None if r is None else r.stderr_re,
            "diagnostics": dict(self.diagnostics),
        }


@dataclass(frozen=True)
class ConditionReport:
    """Size ratios whose smallness makes the Gaussian approximation accurate."""

    r1: float
    r2: float
    r3: float
    satisfied: bool


def _stripped(g):
    core, _ = g.strip_isolated()
    return core


def inclusion_prob_gaussian(g, p0=None, *, log_p0=None):
    """``p0^sigma``, the inclusion probability in ``G(n, p0)``."""
    if log_p0 is None:
        if not 0 < p0 < 1:
            raise DomainError(f"p0 must lie in (0, 1), got {p0}")
        log_p0 = math.log(p0)
    sigma = g.num_edges
    return math.exp(sigma * log_p0) if sigma else 1.0


def inclusion_estimate_gaussian(g, params):
    """:func:`inclusion_prob_gaussian` wrapped as an :class:`InclusionEstimate`."""
    power = g.num_edges * params.log_p0
    return InclusionEstimate(math.exp(power), 0.0, "exact_gaussian", power)


def inclusion_prob_mc(g, n, d, t, draws, rng, *, batches=MIN_BATCHES, workers=1):
    """Monte Carlo frequency of the inclusion event.

    Gram matrices of the pattern's vertices are drawn exactly (Bartlett
    decomposition), which has the same law as the corresponding entries of
    a sampled ``G(n, p, d)`` but costs nothing per dimension.

    Returns
    -------
    InclusionEstimate
        With the binomial standard error ``sqrt(v (1 - v) / draws)``.
    """
    core = _stripped(g)
    if core.n > n:
        raise DomainError(f"the pattern has {core.n} nonisolated vertices but n = {n}")
    log_p0 = float(log_gaussian_edge_prob(t, d))
    power = core.num_edges * log_p0
    if core.num_edges == 0 or t <= -1.0:
        return InclusionEstimate(1.0, 0.0, "monte_carlo", power, diagnostics={"draws": 0})
    rows = np.array([e[0] for e in core.edges])
    cols = np.array([e[1] for e in core.edges])
    mu = core.n

    def batch(gen, size):
        hits = np.empty(size)
        step = 1 << 16
        for start in range(0, size, step):
            m = min(step, size - start)
            v = sample_gram(mu, d, m, gen)[:, rows, cols]
            hits[start:start + m] = np.all(v >= t, axis=1)
        return hits

    est = run_batches(batch, int(draws), rng, batches=batches, workers=workers)
    v = est.real
    return InclusionEstimate(
        v, math.sqrt(max(v * (1.0 - v), 0.0) / est.samples), "monte_carlo", power,
        diagnostics={"draws": est.samples, "batch_stderr": est.stderr_re},
    )


def _fourier_outer(core, params, curve, size, inner, gen, counts):
    """Per-outer-draw estimates of ``phi_V(Theta) / phi_M(Theta)``."""
    d = params.d
    mu = core.n
    rows = np.array([e[0] for e in core.edges])
    cols = np.array([e[1] for e in core.edges])
    sigma = rows.size
    out = np.empty(size, dtype=complex)
    for start in range(0, size, _OUTER_CHUNK):
        m = min(_OUTER_CHUNK, size - start)
        x = sample_tilted(curve, rng=gen, size=(m, sigma), log_p0=params.log_p0)
        gam = contour_point(curve, x)
        theta = np.zeros((m, mu, mu), dtype=complex)
        theta[:, rows, cols] = gam
        theta[:, cols, rows] = gam
        norms = np.linalg.norm(theta, 2, axis=(1, 2))
        scale = np.array([auto_scale(s, d) for s in norms])
        counts["opnorm_violations"] += int(np.sum(norms >= d))
        counts["scaled_contour"] += int(np.sum(scale > 1.0))
        # tr(Theta^2) / (4d) = sum over edges of gamma^2 / (2d)
        log_offset = np.sum(gam * gam, axis=1) / (2.0 * d)
        u = sample_eta(d, gen, (m, inner, mu))
        vals = steepest_descent_values(theta, d, u, scale, log_offset)
        out[start:start + m] = vals.mean(axis=1)
    return out


def inclusion_prob_fourier(
    g, params, curve=None, outer_draws=16384, inner_draws=64, rng=None, *,
    batches=MIN_BATCHES, workers=1, ratio_mode="spherical", max_edges=10,
):
    """Fourier-inversion estimate of the inclusion probability.

    Parameters
    ----------
    g : Graph
    params : ModelParams
    curve : ContourCurve, optional
        Contour for ``(params.d, params.t)``; solved if omitted.
    outer_draws, inner_draws : int
        Draws of ``T`` and, per ``T``, of the steepest-descent variable.  The
        spread of the ratio across ``T`` dominates the variance, so the
        default budget favors outer draws.
    rng : int, SeedSequence or Generator
    batches, workers : int
    ratio_mode : {"spherical", "gaussian"}
        ``"gaussian"`` replaces ``phi_V`` by ``phi_M`` so the ratio is
        identically 1 and the engine returns ``p0^sigma`` exactly.
    max_edges : int
        Largest edge count accepted.

    Returns
    -------
    InclusionEstimate
        ``diagnostics`` holds the count of outer draws with
        ``||Theta||_op >= d`` (evaluated on a scaled contour), and the
        imaginary part of the ratio with its standard error.

    Raises
    ------
    DiagnosticError
        If more than 0.1% of the outer draws leave ``||Theta||_op < d`` or
        the imaginary residual exceeds four standard errors.
    """
    core = _stripped(g)
    sigma = core.num_edges
    power = sigma * params.log_p0
    if sigma == 0:
        return InclusionEstimate(1.0, 0.0, "fourier", 0.0, McEstimate(1.0, 0.0, 0.0, 1))
    if sigma > max_edges:
        raise DomainError(f"the Fourier engine accepts at most {max_edges} edges, got {sigma}")
    if ratio_mode == "gaussian":
        ratio = McEstimate(1.0, 0.0, 0.0, int(outer_draws))
        return InclusionEstimate(math.exp(power), 0.0, "fourier", power, ratio,
                                 {"opnorm_violations": 0, "imag_residual": 0.0})
    if ratio_mode != "spherical":
        raise DomainError(f"unknown ratio mode {ratio_mode!r}")
    if curve is None:
        curve = solve_contour(params.d, params.t)
    elif not (curve.d == params.d and math.isclose(curve.t, params.t, rel_tol=1e-12)):
        raise DomainError("the contour was built for different (d, t)")

    sizes = split_budget(outer_draws, batches)
    children = as_seed_sequence(rng).spawn(batches)

    def one(i):
        counts = {"opnorm_violations": 0, "scaled_contour": 0}
        vals = _fourier_outer(core, params, curve, sizes[i], int(inner_draws),
                              np.random.default_rng(children[i]), counts)
        return vals.mean(), counts

    if workers <= 1:
        results = [one(i) for i in range(batches)]
    else:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=int(workers)) as pool:
            results = list(pool.map(one, range(batches)))
    ratio = McEstimate.from_batches(np.array([r[0] for r in results]), sizes)
    violations = sum(r[1]["opnorm_violations"] for r in results)
    scaled = sum(r[1]["scaled_contour"] for r in results)
    diagnostics = {
        "opnorm_violations": violations,
        "scaled_contour_draws": scaled,
        "imag_residual": ratio.imag,
        "imag_stderr": ratio.stderr_im,
        "outer_draws": int(outer_draws),
        "inner_draws": int(inner_draws),
        "tail_mass": curve.tail_mass,
    }
    if violations > MAX_VIOLATION_RATE * outer_draws:
        raise DiagnosticError(
            f"{violations} of {outer_draws} outer draws had ||Theta||_op >= d", diagnostics)
    if abs(ratio.imag) >= IMAG_SIGMAS * ratio.stderr_im and ratio.stderr_im > 0:
        raise DiagnosticError("imaginary residual exceeds four standard errors", diagnostics)
    scale = math.exp(power)
    return InclusionEstimate(scale * ratio.real, scale * ratio.stderr_re, "fourier", power,
                             ratio, diagnostics)


def mainmain_report(stats, d, p, threshold):
    """Ratios measuring how far ``(stats, d, p)`` is inside the accurate regime.

    With ``L = log(1/p)``:

    * ``r1 = (sigma delta^2 + mu log(mu) delta^2) L^2 / d``
    * ``r2 = tau^2 sigma L^3 / d``
    * ``r3 = mu delta^4 L^2 / (sigma d log d)``

    ``satisfied`` is ``max(r1, r2, r3) < threshold``.
    """
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if d < 3:
        raise DomainError(f"d must be at least 3, got {d}")
    if stats.sigma < 1:
        raise DomainError("the report needs at least one edge")
    big_l = math.log(1.0 / p)
    mu, sigma, delta, tau = stats.mu, stats.sigma, stats.delta, stats.tau
    mu_log_mu = mu * math.log(mu) if mu > 0 else 0.0
    r1 = (sigma * delta**2 + mu_log_mu * delta**2) * big_l**2 / d
    r2 = tau**2 * sigma * big_l**3 / d
    r3 = mu * delta**4 * big_l**2 / (sigma * d * math.log(d))
    return ConditionReport(r1, r2, r3, bool(max(r1, r2, r3) < threshold))


def ratio_experiment(
    n, d, p, K, sampled_graphs, rng, *, engine="fourier", outer_draws=16384, inner_draws=64,
    batches=MIN_BATCHES, workers=1, max_vertices=6, max_edges=10, max_engine_calls=None,
):
    """Finite-size comparison of ``G(n, p, d)`` and ``G(n, p0)`` on sampled graphs.

    Graphs are drawn from ``G(n, p0)``; those outside the well-behaved class
    count as rejections.  For every distinct kept graph the relative error
    ``Pr_fourier / Pr_gaussian - 1 = Re E[phi_V / phi_M] - 1`` is estimated.

    Parameters
    ----------
    n, d : int
    p : float
        Spherical edge probability; ``t`` and ``p0`` follow from it.
    K : float
        Edge-count constant of the class.
    sampled_graphs : int
    rng : int or SeedSequence
    engine : {"fourier", "exact_gaussian"}
        ``"exact_gaussian"`` compares the surrogate with itself.
    outer_draws, inner_draws, batches, workers
        Passed to :func:`inclusion_prob_fourier`.
    max_vertices, max_edges : int
        Kept graphs beyond these sizes are tallied as ``skipped``.
    max_engine_calls : int, optional
        Stop after this many engine evaluations and flag the record
        ``incomplete``.

    Returns
    -------
    dict
    """
    if engine not in ("fourier", "exact_gaussian"):
        raise DomainError(f"unknown engine {engine!r}")
    params = ModelParams.from_p(n, d, p)
    root = as_seed_sequence(rng)
    er_seq, engine_seq = root.spawn(2)
    er_gen = np.random.default_rng(er_seq)
    curve = solve_contour(d, params.t) if engine == "fourier" else None

    cache = {}
    per_graph = []
    rejected = skipped = calls = 0
    incomplete = False
    for _ in range(int(sampled_graphs)):
        g = sample_er(n, params.p0, er_gen)
        st = graph_stats(g)
        if not class_membership(st, n, K):
            rejected += 1
            continue
        key = g.edges
        if key not in cache:
            core = _stripped(g)
            if core.num_edges == 0 or engine == "exact_gaussian":
                cache[key] = (0.0, 0.0)
            elif core.n > max_vertices or core.num_edges > max_edges:
                cache[key] = None
            else:
                if max_engine_calls is not None and calls >= max_engine_calls:
                    incomplete = True
                    break
                est = inclusion_prob_fourier(
                    core, params, curve, outer_draws, inner_draws, engine_seq.spawn(1)[0],
                    batches=batches, workers=workers,
                )
                calls += 1
                cache[key] = (est.ratio.real - 1.0, est.ratio.stderr_re)
        if cache[key] is None:
            skipped += 1
            continue
        per_graph.append(key)

    kept = len(per_graph) + skipped
    total = kept + rejected
    distinct = {}
    for key in per_graph:
        r, se = cache[key]
        entry = distinct.setdefault(key, {"edges": [list(e) for e in key], "ratio": r,
                                          "stderr": se, "count": 0})
        entry["count"] += 1
    ratios = [abs(v["ratio"]) for v in distinct.values()]
    rejection_rate = rejected / total if total else 0.0
    max_ratio = max(ratios, default=0.0)
    return {
        "n": n, "d": d, "p": p, "t": params.t, "p0": params.p0, "K": K,
        "engine": engine,
        "sampled_graphs": total,
        "rejected": rejected,
        "skipped": skipped,
        "rejection_rate": rejection_rate,
        "engine_calls": calls,
        "graphs": list(distinct.values()),
        "max_abs_ratio": max_ratio,
        "bound": max_ratio + rejection_rate,
        "incomplete": incomplete,
        "budgets": {"outer_draws": outer_draws, "inner_draws": inner_draws, "batches": batches},
    }
