"""Independent reference implementations used only as test oracles.

These deliberately avoid the package's evaluation path: parities come
from truncated Fock-basis expansions, Laguerre values from explicit
polynomials, and optima from grid searches with local refinement.
"""

import math

import numpy as np


def fock_parity(n, x, y):
    """(pi/2) W of |n> from the explicit Laguerre polynomial (n <= 2)."""
    s = x * x + y * y
    z = 4.0 * s
    table = {0: 1.0, 1: 1.0 - z, 2: 1.0 - 2.0 * z + 0.5 * z * z}
    return (-1.0) ** n * math.exp(-2.0 * s) * table[n]


def fock_basis_parity(amplitudes, alpha, n_cut=60):
    """Parity of a coherent superposition via a truncated Fock expansion.

    amplitudes: list of (coefficient, gamma); the state is displaced by
    -alpha and the photon-number distribution is summed with signs.
    """
    alpha = complex(alpha)
    amps = np.zeros(n_cut + 1, dtype=complex)
    norm = 0.0
    for n in range(n_cut + 1):
        total = 0j
        for c, g in amplitudes:
            g = complex(g)
            beta = g - alpha
            phase = np.exp((-alpha * np.conj(g) + np.conj(alpha) * g) / 2.0)
            total += c * phase * np.exp(-abs(beta) ** 2 / 2.0) * beta**n / math.sqrt(
                math.factorial(n)
            )
        amps[n] = total
        norm += abs(total) ** 2
    signs = np.where(np.arange(n_cut + 1) % 2, -1.0, 1.0)
    return float(np.sum(signs * np.abs(amps) ** 2) / norm)


def fock_series_parity(n_state, x, y, n_cut=60):
    """Parity of |n_state> at (x, y) via displaced-Fock overlaps."""
    alpha = complex(x, y)
    z = abs(alpha) ** 2
    total = 0.0
    for n in range(n_cut + 1):
        lo, hi = min(n, n_state), max(n, n_state)
        a = hi - lo
        lag = _genlaguerre(lo, a, z)
        prob = math.exp(-z) * z**a * lag * lag
        for j in range(lo + 1, hi + 1):
            prob /= j
        total += (-1.0) ** n * prob
    return total


def _genlaguerre(n, a, x):
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 + a - x
    for k in range(1, n):
        prev, cur = cur, ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0)
    return cur


def refine(f, x0, steps, n_rounds=60, step0=0.05):
    """Coordinate-descent maximization used to sharpen grid optima."""
    x = np.array(x0, dtype=float)
    fx = f(x)
    step = float(step0)
    for _ in range(n_rounds):
        improved = True
        while improved:
            improved = False
            for i in range(len(x)):
                for sgn in (1.0, -1.0):
                    cand = x.copy()
                    cand[i] += sgn * step
                    fc = f(cand)
                    if fc > fx:
                        x, fx = cand, fc
                        improved = True
        step *= 0.5
        if step < 1e-10:
            break
    return fx, x


def gaussian_rectangle_optimum(k, grid=41):
    """Grid + refine search of the rescaled four-point objective."""

    def value(v):
        y, c, t = v
        if y <= 0:
            return -9.0
        x0, y0, x1, y1 = t * y, y, c * y, t * c * y
        e = lambda a, b: math.exp(-a * a - b * b + k * a * b)
        return e(x0, y0) + e(x0, y1) + e(x1, y0) - e(x1, y1)

    best, arg = -9.0, None
    for t in np.linspace(-4.0, 4.0, grid):
        for c in np.linspace(-4.0, 4.0, grid * 2):
            ys = np.linspace(0.01, 3.0, 200)
            x0, y0 = t * ys, ys
            x1, y1 = c * ys, t * c * ys
            vals = (
                np.exp(-x0**2 - y0**2 + k * x0 * y0)
                + np.exp(-x0**2 - y1**2 + k * x0 * y1)
                + np.exp(-x1**2 - y0**2 + k * x1 * y0)
                - np.exp(-x1**2 - y1**2 + k * x1 * y1)
            )
            i = int(np.argmax(vals))
            if vals[i] > best:
                best, arg = float(vals[i]), (float(ys[i]), c, t)
    return refine(value, arg, 3)[0]


def gaussian_triangle_optimum(k, grid=161):
    """Grid + refine search of the rescaled three-point objective."""

    def value(v):
        y, t = v
        if y <= 0:
            return -9.0
        a = 4.0 / (k * k) - 1.0
        return (
            math.exp(-a * y * y)
            + math.exp(-t * t * a * y * y)
            - math.exp(-(t * t - k * t + 1.0) * (4.0 / (k * k)) * y * y)
        )

    best, arg = -9.0, None
    for t in np.linspace(-4.0, 4.0, grid):
        ys = np.linspace(0.005, 3.0, 400)
        a = 4.0 / (k * k) - 1.0
        vals = (
            np.exp(-a * ys**2)
            + np.exp(-t * t * a * ys**2)
            - np.exp(-(t * t - k * t + 1.0) * (4.0 / (k * k)) * ys**2)
        )
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, arg = float(vals[i]), (float(ys[i]), t)
    return refine(value, arg, 2)[0]


def shoelace_area(points):
    """Polygon area for the squeeze-map invariance check."""
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:] + points[:1]):
        area += x0 * y1 - x1 * y0
    return abs(area) / 2.0
