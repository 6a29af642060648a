# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation backend.

Twin of ``_kernels_py`` with identical semantics; see that module for
the component encoding.  The hot loops (Laguerre recurrence, Gaussian
exponent, superposition pair sum) run as plain C on the flattened state
arrays.
"""

import numpy as np

from libc.math cimport cos, sin, cosh, sinh, exp

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)

COMPILED = True


cdef double _laguerre(long n, double z) nogil:
    cdef double prev = 1.0
    cdef double cur = 1.0 - z
    cdef double nxt
    cdef long k
    if n == 0:
        return 1.0
    for k in range(1, n):
        nxt = ((2.0 * k + 1.0 - z) * cur - k * prev) / (k + 1.0)
        prev = cur
        cur = nxt
    return cur


cdef double _superposition_parity(const double complex[::1] coeff,
                                  const double complex[::1] gamma,
                                  Py_ssize_t lo, Py_ssize_t hi,
                                  double complex alpha) nogil:
    # Hermitian pair sum: diagonal terms are real, off-diagonal pairs
    # contribute twice their real part.  Exponents are combined before
    # exp so the real part never overflows.
    cdef double total = 0.0
    cdef double a2 = creal(alpha) * creal(alpha) + cimag(alpha) * cimag(alpha)
    cdef Py_ssize_t i, j
    cdef double complex gi, gj, e, term
    cdef double gi2, gj2
    for i in range(lo, hi):
        gi = gamma[i]
        gi2 = creal(gi) * creal(gi) + cimag(gi) * cimag(gi)
        e = -conj(gi) * gi - gi2 + 2.0 * conj(alpha) * gi + 2.0 * alpha * conj(gi) - 2.0 * a2
        term = conj(coeff[i]) * coeff[i] * cexp(e)
        total += creal(term)
        for j in range(i + 1, hi):
            gj = gamma[j]
            gj2 = creal(gj) * creal(gj) + cimag(gj) * cimag(gj)
            e = (-conj(gj) * gi - 0.5 * (gi2 + gj2)
                 + 2.0 * conj(alpha) * gi + 2.0 * alpha * conj(gj) - 2.0 * a2)
            term = conj(coeff[j]) * coeff[i] * cexp(e)
            total += 2.0 * creal(term)
    return total


cdef double _parity_qp(const int[::1] kind, const double[::1] weight,
                       const double[:, ::1] gauss, const int[::1] fock_n,
                       const long long[::1] sp_offset,
                       const double complex[::1] sp_coeff,
                       const double complex[::1] sp_gamma,
                       double q, double p) nogil:
    cdef double total = 0.0
    cdef double d1, d2, s, val
    cdef Py_ssize_t k
    cdef long n
    for k in range(kind.shape[0]):
        if kind[k] == 0:
            d1 = q - gauss[k, 0]
            d2 = p - gauss[k, 1]
            val = gauss[k, 5] * exp(
                -0.5 * (gauss[k, 2] * d1 * d1 + 2.0 * gauss[k, 3] * d1 * d2 + gauss[k, 4] * d2 * d2)
            )
        elif kind[k] == 1:
            n = fock_n[k]
            s = q * q + p * p
            val = exp(-2.0 * s) * _laguerre(n, 4.0 * s)
            if n % 2:
                val = -val
        else:
            val = _superposition_parity(
                sp_coeff, sp_gamma, sp_offset[k], sp_offset[k + 1], q + 1j * p
            )
        total += weight[k] * val
    return total


def parity_point(data, double x, double y, double theta):
    """Scaled Wigner value (pi/2)W at one point of the theta-rotated frame."""
    cdef const int[::1] kind = data.kind
    cdef const double[::1] weight = data.weight
    cdef const double[:, ::1] gauss = data.gauss
    cdef const int[::1] fock_n = data.fock_n
    cdef const long long[::1] sp_offset = data.sp_offset
    cdef const double complex[::1] sp_coeff = data.sp_coeff
    cdef const double complex[::1] sp_gamma = data.sp_gamma
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    return _parity_qp(kind, weight, gauss, fock_n, sp_offset, sp_coeff, sp_gamma,
                      ct * x - st * y, st * x + ct * y)


def parity_grid(data, xs, ys, double theta):
    """Vectorized ``parity_point`` over paired coordinate arrays."""
    xs_arr = np.ascontiguousarray(xs, dtype=np.float64)
    shape = xs_arr.shape
    cdef double[::1] xv = xs_arr.ravel()
    cdef double[::1] yv = np.ascontiguousarray(ys, dtype=np.float64).ravel()
    if xv.shape[0] != yv.shape[0]:
        raise ValueError("xs and ys must have the same length")
    cdef const int[::1] kind = data.kind
    cdef const double[::1] weight = data.weight
    cdef const double[:, ::1] gauss = data.gauss
    cdef const int[::1] fock_n = data.fock_n
    cdef const long long[::1] sp_offset = data.sp_offset
    cdef const double complex[::1] sp_coeff = data.sp_coeff
    cdef const double complex[::1] sp_gamma = data.sp_gamma
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _parity_qp(kind, weight, gauss, fock_n, sp_offset, sp_coeff, sp_gamma,
                               ct * xv[i] - st * yv[i], st * xv[i] + ct * yv[i])
    return out.reshape(shape)


cdef double _j_value(const int[::1] kind, const double[::1] weight,
                     const double[:, ::1] gauss, const int[::1] fock_n,
                     const long long[::1] sp_offset,
                     const double complex[::1] sp_coeff,
                     const double complex[::1] sp_gamma,
                     double theta, double x0, double x1, double y0, double y1,
                     double r, double phi, bint triangle) nogil:
    cdef double ch = cosh(r)
    cdef double sh = sinh(r)
    cdef double c2 = cos(2.0 * phi)
    cdef double s2 = sin(2.0 * phi)
    cdef double s11 = ch + sh * c2
    cdef double s12 = sh * s2
    cdef double s22 = ch - sh * c2
    cdef double ct = cos(theta)
    cdef double st = sin(theta)
    cdef double val = 0.0
    cdef double px, py, q, p
    cdef double xs[4]
    cdef double ys[4]
    cdef double sg[4]
    cdef Py_ssize_t i, n_pts
    if triangle:
        xs[0] = x1; ys[0] = y0; sg[0] = 1.0
        xs[1] = x0; ys[1] = y1; sg[1] = 1.0
        xs[2] = x1; ys[2] = y1; sg[2] = -1.0
        n_pts = 3
    else:
        xs[0] = x0; ys[0] = y0; sg[0] = 1.0
        xs[1] = x0; ys[1] = y1; sg[1] = 1.0
        xs[2] = x1; ys[2] = y0; sg[2] = 1.0
        xs[3] = x1; ys[3] = y1; sg[3] = -1.0
        n_pts = 4
    for i in range(n_pts):
        px = s11 * xs[i] + s12 * ys[i]
        py = s12 * xs[i] + s22 * ys[i]
        q = ct * px - st * py
        p = st * px + ct * py
        val += sg[i] * _parity_qp(kind, weight, gauss, fock_n, sp_offset, sp_coeff, sp_gamma, q, p)
    return val


def j_rectangle(data, double theta, double x0, double x1, double y0, double y1,
                double r=0.0, double phi=0.0):
    """Four-point functional on the (optionally squeeze-mapped) rectangle."""
    return _j_value(data.kind, data.weight, data.gauss, data.fock_n, data.sp_offset,
                    data.sp_coeff, data.sp_gamma, theta, x0, x1, y0, y1, r, phi, False)


def j_triangle(data, double theta, double x0, double x1, double y0, double y1,
               double r=0.0, double phi=0.0):
    """Three-point functional: +(x1,y0) +(x0,y1) -(x1,y1), squeeze-mapped."""
    return _j_value(data.kind, data.weight, data.gauss, data.fock_n, data.sp_offset,
                    data.sp_coeff, data.sp_gamma, theta, x0, x1, y0, y1, r, phi, True)


def _j_batch(data, params, bint triangle):
    p_arr = np.ascontiguousarray(params, dtype=np.float64)
    if p_arr.ndim != 2 or p_arr.shape[1] != 7:
        raise ValueError("params must have shape (n, 7)")
    cdef double[:, ::1] pv = p_arr
    cdef const int[::1] kind = data.kind
    cdef const double[::1] weight = data.weight
    cdef const double[:, ::1] gauss = data.gauss
    cdef const int[::1] fock_n = data.fock_n
    cdef const long long[::1] sp_offset = data.sp_offset
    cdef const double complex[::1] sp_coeff = data.sp_coeff
    cdef const double complex[::1] sp_gamma = data.sp_gamma
    out = np.empty(pv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(pv.shape[0]):
            ov[i] = _j_value(kind, weight, gauss, fock_n, sp_offset, sp_coeff, sp_gamma,
                             pv[i, 0], pv[i, 1], pv[i, 2], pv[i, 3], pv[i, 4],
                             pv[i, 5], pv[i, 6], triangle)
    return out


def j_rectangle_batch(data, params):
    """Rows of ``params`` are (theta, x0, x1, y0, y1, r, phi)."""
    return _j_batch(data, params, False)


def j_triangle_batch(data, params):
    return _j_batch(data, params, True)
