"""Analytic optimal J and J' for single-mode Gaussian states.

In the frame rotated 45 degrees from the squeeze axis the Wigner
exponent takes the form -x'^2 - y'^2 + k x' y' with k = 2 tanh 2r, and
the optimum of the four-point functional over point sets reduces to a
single root-finding problem in the vertex-ratio parameter c; the
three-point functional has a closed form.  Purity enters only as an
overall factor.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Tuple

from .errors import NumericError, ValidationError
from .functionals import CLASSICAL_UPPER, TRIANGLE_CLASSICAL
from .states import GaussianSpec

logger = logging.getLogger(__name__)

_K_ZERO = 1e-8
_K_SATURATED = 2.0 - 1e-6


@dataclass(frozen=True)
class GaussianOptimum:
    """Optimal functional value for a Gaussian state and where it occurs.

    points is the absolute vertex tuple (x0, y0, x1, y1) in the frame
    theta = phi + pi/4; z0/z1 are the centered offsets in units of
    kappa = sqrt((2 nbar + 1) / (2 cosh 2r)).
    """

    value: float
    k: float
    z0: float
    z1: float
    kappa: float
    theta: float
    points: Tuple[float, float, float, float]
    branch: str


def k_param(r, delta):
    """Cross-term coefficient of the rotated Gaussian Wigner exponent.

    delta is the angle between the evaluation frame and the squeeze
    axis; |k| <= 2 tanh 2r, saturated at delta = +-pi/4.
    """
    if r < 0:
        raise ValidationError(f"squeeze strength must be >= 0, got {r}")
    t = math.tanh(2.0 * r)
    s2 = math.sin(2.0 * delta)
    c2 = math.cos(2.0 * delta)
    return 2.0 * t * s2 / math.sqrt(1.0 - t * t * c2 * c2)


def _vertex_ratio_residual(c, k):
    # stationarity condition linking the two vertex scales at t = -1
    return ((1.0 + k) * c * c + k * c - 1.0) * math.log((k * c - 2.0) / (k + 2.0)) - (
        1.0 + c
    ) * (1.0 - c + k) * math.log((2.0 * c - k) / (c * (k + 2.0)))


def _solve_vertex_ratio(c_lo, c_hi, k):
    """Bisect the stationarity residual; scans for multiple sign changes."""
    n_scan = 256
    prev_c = c_lo
    prev_v = _vertex_ratio_residual(c_lo, k)
    brackets = []
    for i in range(1, n_scan + 1):
        c = c_lo + (c_hi - c_lo) * i / n_scan
        v = _vertex_ratio_residual(c, k)
        if prev_v == 0.0:
            brackets.append((prev_c, prev_c))
        elif v == 0.0 or (v > 0) != (prev_v > 0):
            brackets.append((prev_c, c))
        prev_c, prev_v = c, v
    if not brackets:
        raise NumericError(
            f"no sign change for the vertex-ratio equation: k={k}, bracket=({c_lo}, {c_hi})"
        )
    if len(brackets) > 1:
        logger.warning("vertex-ratio equation has %d sign changes at k=%g: %s", len(brackets), k, brackets)
    lo, hi = brackets[0]
    f_lo = _vertex_ratio_residual(lo, k)
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        f_mid = _vertex_ratio_residual(mid, k)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _four_point_value(y, c, k):
    # F at (x0, y0, x1, y1) = (-y, y, cy, -cy); the vertex pair (x0, y1)
    # and (x1, y0) share one exponent because the aspect parameter is -1
    y2 = y * y
    a = 2.0 + k
    b = c * c + 1.0 - k * c
    return math.exp(-a * y2) + 2.0 * math.exp(-b * y2) - math.exp(-a * c * c * y2)


def rectangle_value_vs_k(k):
    """Max four-point value F_k for a pure state with cross term k in [0, 2].

    Returns (value, z0, z1) with the optimizing offsets in rescaled
    coordinates (z1/z0 is the vertex ratio).
    """
    if not 0.0 <= k <= 2.0:
        raise ValidationError(f"k must lie in [0, 2], got {k}")
    if k < _K_ZERO:
        return CLASSICAL_UPPER, 0.0, 0.0
    if k > _K_SATURATED:
        y = 0.25 * math.sqrt(math.log(3.0) / 2.0)
        return 8.0 * 3.0 ** (-9.0 / 8.0), y, 3.0 * y
    # the root sits just above 1 + 4/k; the upper end grows accordingly
    c_lo = 1.0 + 4.0 / k + 1e-12
    c_hi = max(64.0, 8.0 / k + 8.0)
    c = _solve_vertex_ratio(c_lo, c_hi, k)
    y2 = math.log((k * c - 2.0) / (k + 2.0)) / ((1.0 + c) * (c - 1.0 - k))
    y = math.sqrt(y2)
    return _four_point_value(y, c, k), y, c * y


def triangle_value_vs_k(k):
    """Max three-point value H_k for a pure state: closed form, in [1, 2]."""
    if not 0.0 <= k <= 2.0:
        raise ValidationError(f"k must lie in [0, 2], got {k}")
    if k < _K_ZERO:
        return TRIANGLE_CLASSICAL, 0.0, 0.0
    k = min(k, 2.0 - 1e-12)
    value = 2.0 ** (-4.0 / (2.0 + k)) * (2.0 - k) ** ((2.0 - k) / (2.0 + k)) * (2.0 + k)
    y2 = math.log(1.0 / (1.0 - 0.5 * k)) / (1.0 + 2.0 / k) ** 2
    y = math.sqrt(y2)
    return value, y, (2.0 / k) * y


def _frame_center(spec, theta):
    a = spec.alpha * complex(math.cos(theta), -math.sin(theta))
    return a.real, a.imag


def _optimum(spec, branch):
    k = 2.0 * math.tanh(2.0 * spec.r)
    kappa = math.sqrt((2.0 * spec.nbar + 1.0) / (2.0 * math.cosh(2.0 * spec.r)))
    theta = spec.phi + math.pi / 4.0
    if branch == "rectangle":
        f, z0, z1 = rectangle_value_vs_k(k)
    else:
        f, z0, z1 = triangle_value_vs_k(k)
    ax, ay = _frame_center(spec, theta)
    points = (ax + z0 * kappa, ay - z0 * kappa, ax - z1 * kappa, ay + z1 * kappa)
    return GaussianOptimum(
        value=spec.purity * f,
        k=k,
        z0=z0,
        z1=z1,
        kappa=kappa,
        theta=theta,
        points=points,
        branch=branch,
    )


def optimal_rectangle_gaussian(spec):
    """Best four-point value mu * F_k for a GaussianSpec, with the points.

    The optimizing rectangle lives in the frame theta = phi + pi/4 and
    satisfies x0*x1 = y0*y1 around the distribution center.
    """
    if not isinstance(spec, GaussianSpec):
        raise ValidationError(f"expected a GaussianSpec, got {spec!r}")
    return _optimum(spec, "rectangle")


def optimal_triangle_gaussian(spec):
    """Best three-point value mu * H_k for a GaussianSpec (closed form)."""
    if not isinstance(spec, GaussianSpec):
        raise ValidationError(f"expected a GaussianSpec, got {spec!r}")
    return _optimum(spec, "triangle")


def _bisect_threshold(pure_value, bound):
    # optimal value is linear in purity: mu* solves mu * pure_value = bound
    if pure_value <= bound:
        return float("nan")
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if mid * pure_value > bound:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def detection_map(mu_values, xi_values, threads=1):
    """Optimal values and detection flags over a purity x squeezing grid.

    Returns (rows, thresholds): rows are (mu, xi, j_rect, j_tri,
    detect_rect, detect_tri) ordered by (mu, xi); thresholds are
    (xi, mu_star_rect, mu_star_tri) with NaN when no purity detects.
    """
    xi_values = [float(x) for x in xi_values]
    mu_values = [float(m) for m in mu_values]
    for xi in xi_values:
        if not 0.0 <= xi < 2.0:
            raise ValidationError(f"squeezing coordinate xi must lie in [0, 2), got {xi}")
    for mu in mu_values:
        if not 0.0 < mu <= 1.0:
            raise ValidationError(f"purity must lie in (0, 1], got {mu}")

    def column(xi):
        f, _, _ = rectangle_value_vs_k(xi)
        h, _, _ = triangle_value_vs_k(xi)
        return f, h

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            columns = list(pool.map(column, xi_values))
    else:
        columns = [column(xi) for xi in xi_values]

    rows = []
    for mu in mu_values:
        for xi, (f, h) in zip(xi_values, columns):
            j_rect = mu * f
            j_tri = mu * h
            rows.append(
                (mu, xi, j_rect, j_tri, j_rect > CLASSICAL_UPPER, j_tri > TRIANGLE_CLASSICAL)
            )
    thresholds = [
        (xi, _bisect_threshold(f, CLASSICAL_UPPER), _bisect_threshold(h, TRIANGLE_CLASSICAL))
        for xi, (f, h) in zip(xi_values, columns)
    ]
    return rows, thresholds
