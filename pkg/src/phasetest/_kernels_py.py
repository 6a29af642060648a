"""Pure-Python evaluation backend.

Implements the same contract as the compiled extension ``_kernels``:
scaled Wigner values (displaced parities) and the four/three-point
functionals, evaluated on the flattened state representation built by
``states.compile_state``.  Selected automatically when the extension is
unavailable; also used to cross-check the compiled backend.

Component encoding (see ``kernels.StateData``):
  kind 0 -> Gaussian, row of ``gauss`` holds (cx, cy, i11, i12, i22, mu)
            with i** the inverse covariance in the lab frame;
  kind 1 -> number state, ``fock_n`` holds n;
  kind 2 -> coherent-state superposition, terms in
            ``sp_coeff/sp_gamma[sp_offset[k]:sp_offset[k+1]]`` with
            coefficients normalized so <psi|psi> = 1.
"""

import math

import numpy as np

COMPILED = False


def _laguerre_scalar(n, z):
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
    return cur


def _laguerre_array(n, z):
    if n == 0:
        return np.ones_like(z)
    prev = np.ones_like(z)
    cur = 1.0 - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
    return cur


def _superposition_parity(coeff, gamma, alpha):
    # <psi| D(a) (-1)^n D^dag(a) |psi> via the reflection identity on
    # coherent states; exponents combined before exp so the pair sum
    # stays finite for well-separated amplitudes.
    g2 = np.abs(gamma) ** 2
    e = (
        -np.conj(gamma)[:, None] * gamma[None, :]
        - 0.5 * (g2[:, None] + g2[None, :])
        + 2.0 * np.conj(alpha) * gamma[None, :]
        + 2.0 * alpha * np.conj(gamma)[:, None]
        - 2.0 * (alpha.real**2 + alpha.imag**2)
    )
    pair = np.conj(coeff)[:, None] * coeff[None, :]
    return float(np.sum((pair * np.exp(e)).real))


def parity_point(data, x, y, theta):
    """Scaled Wigner value (pi/2)W at one point of the theta-rotated frame."""
    ct = math.cos(theta)
    st = math.sin(theta)
    q = ct * x - st * y
    p = st * x + ct * y
    total = 0.0
    for k in range(data.kind.shape[0]):
        kind = data.kind[k]
        if kind == 0:
            cx, cy, i11, i12, i22, mu = data.gauss[k]
            d1 = q - cx
            d2 = p - cy
            val = mu * math.exp(-0.5 * (i11 * d1 * d1 + 2.0 * i12 * d1 * d2 + i22 * d2 * d2))
        elif kind == 1:
            n = int(data.fock_n[k])
            s = q * q + p * p
            val = (-1.0 if n % 2 else 1.0) * math.exp(-2.0 * s) * _laguerre_scalar(n, 4.0 * s)
        else:
            lo, hi = data.sp_offset[k], data.sp_offset[k + 1]
            val = _superposition_parity(data.sp_coeff[lo:hi], data.sp_gamma[lo:hi], q + 1j * p)
        total += data.weight[k] * val
    return total


def parity_grid(data, xs, ys, theta):
    """Vectorized ``parity_point`` over paired coordinate arrays."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ct = math.cos(theta)
    st = math.sin(theta)
    qs = ct * xs - st * ys
    ps = st * xs + ct * ys
    total = np.zeros_like(qs)
    for k in range(data.kind.shape[0]):
        kind = data.kind[k]
        if kind == 0:
            cx, cy, i11, i12, i22, mu = data.gauss[k]
            d1 = qs - cx
            d2 = ps - cy
            val = mu * np.exp(-0.5 * (i11 * d1 * d1 + 2.0 * i12 * d1 * d2 + i22 * d2 * d2))
        elif kind == 1:
            n = int(data.fock_n[k])
            s = qs * qs + ps * ps
            sign = -1.0 if n % 2 else 1.0
            val = sign * np.exp(-2.0 * s) * _laguerre_array(n, 4.0 * s)
        else:
            lo, hi = data.sp_offset[k], data.sp_offset[k + 1]
            coeff = data.sp_coeff[lo:hi]
            gamma = data.sp_gamma[lo:hi]
            flat_q = qs.ravel()
            flat_p = ps.ravel()
            val = np.array(
                [
                    _superposition_parity(coeff, gamma, complex(qq, pp))
                    for qq, pp in zip(flat_q, flat_p)
                ]
            ).reshape(qs.shape)
        total = total + data.weight[k] * val
    return total


def _squeeze_entries(r, phi):
    ch = math.cosh(r)
    sh = math.sinh(r)
    c2 = math.cos(2.0 * phi)
    s2 = math.sin(2.0 * phi)
    return ch + sh * c2, sh * s2, ch - sh * c2


def j_rectangle(data, theta, x0, x1, y0, y1, r=0.0, phi=0.0):
    """Four-point functional on the (optionally squeeze-mapped) rectangle.

    Vertices (x_j, y_k) are mapped through the unimodular squeeze matrix
    before evaluation; the (1,1) vertex carries the minus sign.
    """
    s11, s12, s22 = _squeeze_entries(r, phi)
    val = 0.0
    for j, k, sign in ((x0, y0, 1.0), (x0, y1, 1.0), (x1, y0, 1.0), (x1, y1, -1.0)):
        val += sign * parity_point(data, s11 * j + s12 * k, s12 * j + s22 * k, theta)
    return val


def j_triangle(data, theta, x0, x1, y0, y1, r=0.0, phi=0.0):
    """Three-point functional: +(x1,y0) +(x0,y1) -(x1,y1), squeeze-mapped."""
    s11, s12, s22 = _squeeze_entries(r, phi)
    val = 0.0
    for j, k, sign in ((x1, y0, 1.0), (x0, y1, 1.0), (x1, y1, -1.0)):
        val += sign * parity_point(data, s11 * j + s12 * k, s12 * j + s22 * k, theta)
    return val


def j_rectangle_batch(data, params):
    """Rows of ``params`` are (theta, x0, x1, y0, y1, r, phi)."""
    params = np.asarray(params, dtype=float)
    return np.array([j_rectangle(data, *row) for row in params])


def j_triangle_batch(data, params):
    params = np.asarray(params, dtype=float)
    return np.array([j_triangle(data, *row) for row in params])
