"""The Fourier-inversion contour and its tilted density.

Write ``c = d t^2``.  The curve ``gamma(x) = d t (x - i y(x))`` with

    y'(x) = -tan(c x (1 - y) + arctan(x / y))

makes the Gaussian inversion integrand

    exp(-gamma^2 / (2d) - i t gamma) gamma' / (2 pi i p0 gamma)

real and nonnegative, so it is a probability density in ``x`` (the *tilted
density*).  The curve is built by integrating backward from a large
``x_max``, where ``y`` starts on the zero set of the tangent argument, and is
extended to negative ``x`` by evenness.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.special import log_ndtr

from .estimate import as_generator
from .exceptions import ContourError, DomainError

MIN_DT2 = 0.1
# standard deviations of the Gaussian envelope covered by the default x_max
SPAN_SIGMAS = 8.0
_ARG_SLACK = 1e-12
_IMAG_TOL = 1e-8


def _rhs(x, y, c):
    return -np.tan(c * x * (1.0 - y) + np.arctan(x / y))


def _tangent_arg(x, y, c):
    return c * x * (1.0 - y) + np.arctan(x / y)


def initial_y0(x0, d, t):
    """Solve ``d t^2 x0 (1 - y) + arctan(x0 / y) = 0`` for ``y`` in ``(1, 1 + 1/(d t^2)]``.

    The left side is positive at ``y = 1`` and negative at ``y = 1 + 1/(d t^2)``
    and is decreasing in between, so bisection converges to the unique root.
    """
    c = d * t * t
    if not c > 0:
        raise DomainError(f"need d t^2 > 0, got {c}")
    if not x0 > 0:
        raise DomainError(f"need x0 > 0, got {x0}")
    lo, hi = 1.0, 1.0 + 1.0 / c
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _tangent_arg(x0, mid, c) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15 * hi:
            break
    return 0.5 * (lo + hi)


def default_x_max(d, t):
    """``SPAN_SIGMAS / (t sqrt(d))``, eight envelope standard deviations."""
    return SPAN_SIGMAS / (abs(t) * math.sqrt(d))


@dataclass(frozen=True)
class ContourCurve:
    """Tabulated solution ``y(x)`` on ``[0, x_max]`` with Hermite interpolation.

    Attributes
    ----------
    d, t : float
    x_max : float
    grid, y_values, dy_values : ndarray
        Abscissas, ``y`` and ``y'`` (from the ODE right-hand side).
    tail_mass : float
        Upper bound on the tilted-density mass outside ``[-x_max, x_max]``.
    step_x, step_y : ndarray
        Points accepted by the integrator, from ``x_max`` down to 0.
    """

    d: float
    t: float
    x_max: float
    grid: np.ndarray
    y_values: np.ndarray
    dy_values: np.ndarray
    tail_mass: float
    step_x: np.ndarray
    step_y: np.ndarray
    _spline: CubicHermiteSpline = field(repr=False, compare=False)

    @property
    def dt2(self):
        return self.d * self.t * self.t

    def _check_range(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(np.abs(x) > self.x_max * (1 + 1e-12)):
            raise DomainError(f"|x| exceeds x_max = {self.x_max}")
        return x

    def y(self, x):
        """``y(|x|)``; even in ``x``."""
        x = self._check_range(x)
        return self._spline(np.abs(x))

    def dy(self, x):
        """``y'(x)`` from the ODE right-hand side; odd in ``x``."""
        x = self._check_range(x)
        ax = np.abs(x)
        return np.sign(x) * _rhs(ax, self._spline(ax), self.dt2)

    def to_csv(self):
        """``x,y,dy`` rows over the grid, with a header line."""
        rows = ["x,y,dy"]
        rows.extend(f"{x!r},{y!r},{dy!r}" for x, y, dy in zip(
            self.grid.tolist(), self.y_values.tolist(), self.dy_values.tolist()))
        return "\n".join(rows) + "\n"


def _tail_mass(c, x_max, log_p0):
    # envelope K exp(-c x^2 / 2) integrated over |x| > x_max
    log_k = 0.5 / c - 0.5 * c - math.log(2.0 * math.pi) - log_p0
    return math.exp(log_k + 0.5 * math.log(2.0 * math.pi / c) + math.log(2.0) + float(log_ndtr(-math.sqrt(c) * x_max)))


def _check_invariants(x, y, c):
    """Raise ContourError at the first abscissa violating the analytic bounds."""
    arg = _tangent_arg(x, y, c)
    bad = (y < 1.0 - 1e-12) | (arg < -_ARG_SLACK) | (arg >= np.arctan(x) + _ARG_SLACK * (x > 0))
    bad &= x > 0
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ContourError(
            f"contour left its bounds at x={x[i]:.6g} (y={y[i]:.6g}, tangent argument {arg[i]:.3g})",
            x=float(x[i]),
        )


def solve_contour(d, t, x_max=None, *, rtol=1e-10, atol=1e-12, grid_points=2001):
    """Integrate the contour ODE backward from ``x_max`` to 0.

    Parameters
    ----------
    d : float
        Dimension.
    t : float
        Threshold, ``t > 0`` with ``d t^2 >= 0.1``.
    x_max : float, optional
        Right end of the curve; at least ``8 / (t sqrt(d))``, which is also the
        default.
    rtol, atol : float
        Tolerances of the DOP853 integrator.
    grid_points : int
        Size of the uniform output grid on ``[0, x_max]``.

    Returns
    -------
    ContourCurve
    """
    if not t > 0:
        raise DomainError(f"the contour needs t > 0, got {t}")
    c = d * t * t
    if c < MIN_DT2:
        raise DomainError(f"d t^2 = {c:.4g} is below {MIN_DT2}; the contour is too stiff")
    floor = default_x_max(d, t)
    if x_max is None:
        x_max = floor
    elif x_max < floor * (1 - 1e-12):
        raise DomainError(f"x_max = {x_max} is below 8/(t sqrt(d)) = {floor:.6g}")
    x_max = float(x_max)

    y0 = initial_y0(x_max, d, t)
    sol = solve_ivp(
        lambda x, y: _rhs(x, y, c), (x_max, 0.0), [y0],
        method="DOP853", rtol=rtol, atol=atol, dense_output=True,
    )
    if not sol.success:
        raise ContourError(f"integrator failed: {sol.message}")
    _check_invariants(sol.t, sol.y[0], c)

    grid = np.linspace(0.0, x_max, int(grid_points))
    y = sol.sol(grid)[0]
    y[-1] = y0
    _check_invariants(grid, y, c)
    if np.any(np.diff(y) > 1e-13):
        i = int(np.argmax(np.diff(y) > 1e-13))
        raise ContourError(f"y is not nonincreasing near x={grid[i]:.6g}", x=float(grid[i]))
    dy = _rhs(grid, y, c) + 0.0  # no signed zero at x = 0
    # log p0 for the truncated-mass report
    log_p0 = float(log_ndtr(-math.sqrt(c)))
    spline = CubicHermiteSpline(grid, y, dy)
    return ContourCurve(d, t, x_max, grid, y, dy, _tail_mass(c, x_max, log_p0),
                        sol.t.copy(), sol.y[0].copy(), spline)


def contour_point(curve, x):
    """``gamma(x) = d t (x - i y(x))``."""
    return curve.d * curve.t * (np.asarray(x) - 1j * curve.y(x))


def contour_deriv(curve, x):
    """``gamma'(x) = d t (1 - i y'(x))``."""
    return curve.d * curve.t * (1.0 - 1j * curve.dy(x))


def _log_p0(p0, log_p0):
    if log_p0 is not None:
        return float(log_p0)
    if not 0 < p0 < 1:
        raise DomainError(f"p0 must lie in (0, 1), got {p0}")
    return math.log(p0)


def tilted_density(curve, x, p0=None, *, log_p0=None, check=True):
    """The tilted density ``exp(-gamma^2/(2d) - i t gamma) gamma' / (2 pi i p0 gamma)``.

    The complex value is formed and its imaginary part is checked to be below
    ``1e-8`` of the real part before it is discarded.

    Parameters
    ----------
    curve : ContourCurve
    x : float or ndarray
        Points with ``|x| <= x_max``.
    p0 : float
        Gaussian edge probability at the curve's ``(d, t)``.
    log_p0 : float, optional
        ``log p0``, used instead of ``p0`` when given.
    """
    lp = _log_p0(p0, log_p0)
    d, t = curve.d, curve.t
    g = contour_point(curve, x)
    gp = contour_deriv(curve, x)
    val = np.exp(-g * g / (2.0 * d) - 1j * t * g - lp - math.log(2.0 * math.pi)) * gp / (1j * g)
    if check:
        bad = np.abs(val.imag) > _IMAG_TOL * np.abs(val.real) + 1e-300
        if np.any(bad):
            xb = np.atleast_1d(np.asarray(x, dtype=float))[np.atleast_1d(bad)][0]
            raise ContourError(f"tilted density has an imaginary residual at x={xb:.6g}", x=float(xb))
    return val.real if np.ndim(val) else float(val.real)


def tilted_envelope(curve, x, p0=None, *, log_p0=None):
    """Gaussian bound ``exp(1/(2c) - c/2 - c x^2/2) / (2 pi p0)`` on the tilted density."""
    lp = _log_p0(p0, log_p0)
    c = curve.dt2
    return np.exp(0.5 / c - 0.5 * c - 0.5 * c * np.asarray(x) ** 2 - math.log(2.0 * math.pi) - lp)


def sample_tilted(curve, p0=None, rng=None, size=None, *, log_p0=None, stats=None):
    """Draw from the tilted density by rejection from ``N(0, 1/(d t^2))``.

    Proposals outside ``[-x_max, x_max]`` are rejected; the mass there is
    ``curve.tail_mass``.  If ``stats`` is a dict, the proposal and acceptance
    counts are added to it.
    """
    lp = _log_p0(p0, log_p0)
    gen = as_generator(rng)
    want = 1 if size is None else int(np.prod(size))
    c = curve.dt2
    sd = 1.0 / math.sqrt(c)
    log_k = 0.5 / c - 0.5 * c - math.log(2.0 * math.pi) - lp
    out = np.empty(want)
    filled = proposed = accepted = 0
    while filled < want:
        m = max(16, int(1.8 * (want - filled)) + 8)
        x = sd * gen.standard_normal(m)
        v = gen.random(m)
        proposed += m
        ok = np.abs(x) <= curve.x_max
        x, v = x[ok], v[ok]
        dens = tilted_density(curve, x, log_p0=lp, check=False)
        keep = v * np.exp(log_k - 0.5 * c * x * x) < dens
        accepted += int(keep.sum())
        take = x[keep][: want - filled]
        out[filled:filled + take.size] = take
        filled += take.size
    if stats is not None:
        stats["proposed"] = stats.get("proposed", 0) + proposed
        stats["accepted"] = stats.get("accepted", 0) + accepted
    return float(out[0]) if size is None else out.reshape(size)
