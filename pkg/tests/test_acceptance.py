"""Acceptance criteria 1-10 at their stated tolerances and time budgets.

Each test records one PASS/FAIL line that is printed in the terminal summary.
"""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
from scipy import integrate

from spherical_rgg.contour import (
    contour_deriv,
    contour_point,
    solve_contour,
    tilted_density,
)
from spherical_rgg.divergence import idiv_er
from spherical_rgg.graphs import Graph
from spherical_rgg.inclusion import inclusion_prob_fourier, inclusion_prob_mc
from spherical_rgg.specialfns import (
    ModelParams,
    gaussian_edge_prob,
    pp0_ratio,
    surface_density,
    threshold,
)
from spherical_rgg.wishart import (
    eta_density,
    hollow_matrix,
    phi_v_modulus_bound,
    spherical_wishart_cf,
    spherical_wishart_cf_direct,
    wishart_cf,
)
from test_divergence import subset_minimum

CONTOUR_GRID = [(50, 0.2), (100, 0.3), (400, 0.15)]


def test_criterion_01_normalization(acceptance):
    start = time.perf_counter()
    worst_f = max(
        abs(integrate.quad(surface_density, -1, 1, args=(d,), epsabs=1e-13, epsrel=1e-13,
                           limit=200, points=[0.0])[0] - 1)
        for d in (3, 4, 5, 10, 50, 1000)
    )
    worst_eta = max(
        abs(integrate.quad(eta_density, -np.pi, np.pi, args=(d,), epsabs=1e-13, limit=200,
                           points=[0.0])[0] - 1)
        for d in (3, 5, 20, 200)
    )
    worst_tilt = 0.0
    for d, t in CONTOUR_GRID:
        curve = solve_contour(d, t)
        p0 = float(gaussian_edge_prob(t, d))
        total, _ = integrate.quad(lambda x: tilted_density(curve, x, p0), -curve.x_max, curve.x_max,
                                  epsabs=1e-13, epsrel=1e-12, limit=400, points=[0.0])
        worst_tilt = max(worst_tilt, abs(total - 1))
    elapsed = time.perf_counter() - start
    ok = worst_f < 1e-10 and worst_eta < 1e-8 and worst_tilt < 1e-6 and elapsed < 10
    acceptance(1, ok, f"f_d {worst_f:.1e}, eta_d {worst_eta:.1e}, tilted {worst_tilt:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_02_closed_forms(acceptance):
    ps = np.round(np.arange(0.01, 0.50, 0.01), 2)
    worst_t = max(abs(threshold(p, 3) - (1 - 2 * p)) for p in ps)
    w = abs(wishart_cf(0.5, 4) - 0.5j)
    half = all(gaussian_edge_prob(0.0, d) == 0.5 for d in (3, 10, 1000, 10**8))
    ok = worst_t <= 1e-12 and w <= 1e-12 and half
    acceptance(2, ok, f"t_p,3 {worst_t:.1e}, wishart {w:.1e}, p0(0)=0.5 exact: {half}")
    assert ok


def test_criterion_03_pp0_ratio(acceptance):
    start = time.perf_counter()
    dims = [10**5, 10**6, 10**7, 10**8]
    ratios = []
    for d in dims:
        t, p0, predicted, actual = pp0_ratio(0.01, d)
        ratios.append((actual - 1) / (predicted - 1))
    elapsed = time.perf_counter() - start
    in_band = 0.9 <= ratios[-1] <= 1.1
    toward_one = all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
    ok = in_band and toward_one and elapsed < 5
    shown = ", ".join(f"{r:.6f}" for r in ratios)
    acceptance(3, ok, f"ratios at d=1e5..1e8: {shown}; in [0.9,1.1]: {in_band}; "
                      f"monotone toward 1: {toward_one}; {elapsed:.1f}s")
    assert ok, f"ratio sequence {shown} converges to ~0.5106, not 1"


def test_criterion_04_idiv(acceptance):
    start = time.perf_counter()
    pairs = [(0.1, 0.2), (0.3, 0.1), (0.02, 0.5), (0.5, 0.45), (0.25, 0.05)]
    worst = max(abs(idiv_er(3, p, q).value - subset_minimum(3, p, q)) for p, q in pairs)
    seq = []
    for n in (10, 30, 100, 300):
        q = 4 / n**2
        seq.append(idiv_er(n, q * (1 + 1 / math.log(n)), q).value)
    decreasing = all(b < a for a, b in zip(seq, seq[1:]))
    small = seq[-1] < 0.05
    # p = 2q must stay in [0, 1/2]: n >= 4
    doubled = min(idiv_er(n, 8 / n**2, 4 / n**2).value for n in range(4, 301))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and decreasing and small and doubled > 0.3 and elapsed < 30
    shown = ", ".join(f"{v:.4f}" for v in seq)
    acceptance(4, ok, f"subsets {worst:.1e}; p=q(1+1/log n) at n=10,30,100,300: {shown} "
                      f"(decreasing {decreasing}, <0.05 {small}); p=2q min {doubled:.3f}; {elapsed:.1f}s")
    assert ok, f"sequence {shown} is not decreasing below 0.05"


def test_criterion_05_cf_triangle(acceptance):
    start = time.perf_counter()
    samples = 100_000
    worst = 0.0
    rows = []
    for (theta, d), seed in zip(itertools.product((0.5, 2.0, 10.0), (5, 20, 100)), itertools.count(100)):
        quad, _ = integrate.quad(lambda v: math.cos(theta * v) * surface_density(v, d), -1, 1,
                                 epsabs=1e-14, limit=200)
        m = hollow_matrix(2, [(0, 1)], [theta])
        sd = spherical_wishart_cf(m, d, samples, seed)
        dr = spherical_wishart_cf_direct(m, d, samples, seed + 1000)
        z = [
            abs(sd.real - quad) / sd.stderr_re,
            abs(dr.real - quad) / dr.stderr_re,
            abs(sd.real - dr.real) / math.hypot(sd.stderr_re, dr.stderr_re),
            abs(sd.imag - dr.imag) / math.hypot(sd.stderr_im, dr.stderr_im),
        ]
        worst = max(worst, max(z))
        rows.append(f"({theta:g},{d}) {max(z):.2f}")
    elapsed = time.perf_counter() - start
    ok = worst <= 5 and elapsed < 60
    acceptance(5, ok, f"worst |diff|/stderr {worst:.2f} over 9 cells; {elapsed:.1f}s")
    assert ok, "; ".join(rows)


def test_criterion_06_modulus_bound(acceptance):
    rng = np.random.default_rng(606)
    d = 20
    worst = -math.inf
    for _ in range(50):
        theta = rng.uniform(-15, 15)
        m = hollow_matrix(2, [(0, 1)], [theta])
        est = spherical_wishart_cf(m, d, 20_000, rng)
        worst = max(worst, abs(est.mean) - phi_v_modulus_bound(m, d) - 4 * est.stderr)
    ok = worst <= 0
    acceptance(6, ok, f"max(|phi| - bound - 4 stderr) = {worst:.3g} over 50 draws")
    assert ok


def test_criterion_07_contour_invariants(acceptance):
    fails = []
    for d, t in CONTOUR_GRID:
        curve = solve_contour(d, t)
        c = curve.dt2
        y = curve.y_values
        if not (np.all(y >= 1) and np.all(y <= 1 + 1 / c)):
            fails.append(f"({d},{t}) band")
        if not np.all(np.diff(y) <= 0):
            fails.append(f"({d},{t}) monotone")
        xs = np.concatenate([curve.grid, curve.step_x])
        ys = np.concatenate([y, curve.step_y])
        arg = c * xs * (1 - ys) + np.arctan(xs / ys)
        if not (np.all(arg >= -1e-12) and np.all(arg < math.pi / 2)):
            fails.append(f"({d},{t}) tangent argument")
        x = np.linspace(-curve.x_max, curve.x_max, 8001)
        ratio = np.abs(contour_deriv(curve, x) / contour_point(curve, x)).max()
        if ratio > 1 + 1e-9:
            fails.append(f"({d},{t}) |g'/g| = {ratio}")
        finer = solve_contour(d, t, rtol=5e-11, atol=5e-13)
        drift = abs(finer.y(0.0) - curve.y(0.0))
        if drift >= 1e-9:
            fails.append(f"({d},{t}) y(0) drift {drift:.1e}")
    ok = not fails
    acceptance(7, ok, "all invariants hold on the grid" if ok else "; ".join(fails))
    assert ok


def test_criterion_08_inversion_gate(acceptance):
    start = time.perf_counter()
    rows, zs, rels = [], [], []
    edge = Graph(2, [(0, 1)])
    for (p, d), seed in zip(itertools.product((0.05, 0.1, 0.3), (50, 200, 1000)), itertools.count(800)):
        params = ModelParams.from_p(2, d, p)
        est = inclusion_prob_fourier(edge, params, rng=seed)
        zs.append(abs(est.value - p) / est.stderr)
        rels.append(est.stderr / p)
        rows.append(f"({p},{d}) z={zs[-1]:.2f} se/p={rels[-1]:.4f}")
    elapsed = time.perf_counter() - start
    ok = max(zs) <= 4 and max(rels) < 0.002 and elapsed < 300
    acceptance(8, ok, f"worst z {max(zs):.2f}, worst se/p {max(rels):.4f}; {elapsed:.0f}s")
    assert ok, "; ".join(rows)


def test_criterion_09_k3_cross_method(acceptance):
    start = time.perf_counter()
    params = ModelParams.from_p(3, 300, 0.2)
    k3 = Graph.complete(3)
    four = inclusion_prob_fourier(k3, params, rng=909)
    mc = inclusion_prob_mc(k3, 3, 300, params.t, 10**7, 910)
    combined = math.hypot(four.stderr, mc.stderr)
    z = abs(four.value - mc.value) / combined
    elapsed = time.perf_counter() - start
    ok = z <= 5 and elapsed < 600
    acceptance(9, ok, f"fourier {four.value:.6f}+-{four.stderr:.1e}, mc {mc.value:.6f}+-{mc.stderr:.1e}, "
                      f"z={z:.2f}; {elapsed:.0f}s")
    assert ok


def _cli(*argv):
    res = subprocess.run([sys.executable, "-m", "spherical_rgg", *argv],
                         capture_output=True, check=True)
    return res.stdout


def test_criterion_10_determinism(acceptance, tmp_path):
    graph = tmp_path / "p3.txt"
    graph.write_text(Graph.path(3).to_text())
    config = tmp_path / "exp.json"
    config.write_text('{"n": 3, "d": 500, "p": 0.3, "K": 10, "sampled_graphs": 60, "seed": 11,'
                      ' "outer_draws": 1024, "inner_draws": 16}')
    commands = [
        ["phi", "--d", "20", "--theta", "0-1=3,1-2=-2", "--samples", "20000", "--seed", "4"],
        ["phi", "--d", "20", "--theta", "0-1=3", "--method", "direct", "--samples", "20000", "--seed", "4"],
        ["inclusion", "--graph", str(graph), "--d", "100", "--p", "0.2", "--outer", "2048",
         "--inner", "32", "--seed", "5"],
        ["inclusion", "--graph", str(graph), "--d", "100", "--p", "0.2", "--method", "mc",
         "--draws", "1e5", "--seed", "5"],
        ["sample", "--model", "rgg", "--n", "40", "--d", "30", "--p", "0.1", "--seed", "6"],
        ["experiment", "--config", str(config)],
    ]
    identical = all(_cli(*c) == _cli(*c) for c in commands)
    within = True
    for c in commands[:4]:
        a = json.loads(_cli(*c, "--workers", "1"))
        b = json.loads(_cli(*c, "--workers", "4"))
        se = a.get("stderr", a.get("stderr_re"))
        within &= abs(a.get("value", a.get("re")) - b.get("value", b.get("re"))) <= se
    ok = identical and within
    acceptance(10, ok, f"reruns byte-identical: {identical}; 1 vs 4 workers within stderr: {within}")
    assert ok
