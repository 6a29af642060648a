"""Maximal J by lattice superpositions of coherent states.

The four-point operator (sum of displaced parities with the CHSH sign
pattern at (0,0), (0,d), (d,0), (d,d)) acts on coherent states by
reflection, which closes on the lattice 2d(n + im) and yields a
recurrence for the superposition coefficients.  Truncating indices to
|n|, |m| <= N gives an ordinary eigenproblem whose top eigenvalue
approaches 4; the variational quotient of the eigenvector, evaluated
with exact overlaps, is the J actually achieved by the state.
"""

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .errors import DomainError, NumericError, ValidationError
from . import kernels
from .states import CoherentSuperpositionSpec, compile_state

_DENSE_LIMIT = 1681  # (2*20+1)^2


@dataclass(frozen=True)
class LatticeProblem:
    """Truncated lattice: indices (n, m) in [-N, N]^2, points at 2d(n+im).

    The natural spacing family is d^2 = R*pi/2 + pi/4 for integer R >= 0
    (phases in the recurrence collapse to signs there), but any d > 0 is
    accepted.
    """

    N: int
    d: float

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or self.N < 1:
            raise ValidationError(f"N must be an integer >= 1, got {self.N!r}")
        if self.N > 40:
            raise ValidationError(f"N={self.N} exceeds the dimension guard (N <= 40)")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "d", float(self.d))
        if not (math.isfinite(self.d) and self.d > 0):
            raise ValidationError(f"lattice half-spacing d must be > 0, got {self.d}")

    @classmethod
    def from_spacing_index(cls, N, R=0):
        """Problem with d^2 = R*pi/2 + pi/4."""
        if R < 0:
            raise ValidationError(f"spacing index R must be >= 0, got {R}")
        return cls(N=N, d=math.sqrt(R * math.pi / 2.0 + math.pi / 4.0))

    @property
    def dimension(self):
        return (2 * self.N + 1) ** 2

    @property
    def d_squared(self):
        return self.d * self.d

    def index(self, n, m):
        side = 2 * self.N + 1
        return (n + self.N) * side + (m + self.N)


@dataclass(frozen=True)
class LatticeState:
    """Complex coefficients C_{n,m} over the truncated lattice."""

    problem: LatticeProblem
    coeffs: Tuple[complex, ...]

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(coeffs) != self.problem.dimension:
            raise ValidationError(
                f"need {self.problem.dimension} coefficients, got {len(coeffs)}"
            )
        if not any(c != 0 for c in coeffs):
            raise DomainError("lattice state is identically zero")
        object.__setattr__(self, "coeffs", coeffs)

    def amplitude_grid(self):
        """(coefficient, lattice point 2d(n+im)) pairs, row-major in (n, m)."""
        p = self.problem
        out = []
        for n in range(-p.N, p.N + 1):
            for m in range(-p.N, p.N + 1):
                out.append((self.coeffs[p.index(n, m)], 2.0 * p.d * (n + 1j * m)))
        return out

    def to_superposition(self):
        """Normalized CoherentSuperpositionSpec over the lattice points."""
        return CoherentSuperpositionSpec([(c, g) for c, g in self.amplitude_grid()])

    def to_rows(self):
        """(n, m, re, im) rows for export."""
        p = self.problem
        return [
            (n, m, self.coeffs[p.index(n, m)].real, self.coeffs[p.index(n, m)].imag)
            for n in range(-p.N, p.N + 1)
            for m in range(-p.N, p.N + 1)
        ]


def build_matrix(problem):
    """Recurrence matrix of the four-point operator on the truncated lattice.

    Row (n, m) couples to (-n, -m), (-n+1, -m), (-n, -m+1) and
    (-n+1, -m+1) with unit-modulus phases; targets outside the lattice
    are dropped.
    """
    N = problem.N
    dim = problem.dimension
    d2 = problem.d_squared
    h = np.zeros((dim, dim), dtype=complex)
    for n in range(-N, N + 1):
        for m in range(-N, N + 1):
            row = problem.index(n, m)
            targets = (
                (-n, -m, 1.0 + 0j),
                (-n + 1, -m, cmath.exp(-4j * d2 * m)),
                (-n, -m + 1, cmath.exp(4j * d2 * n)),
                (-n + 1, -m + 1, -cmath.exp(-4j * d2 * (m - n))),
            )
            for tn, tm, phase in targets:
                if -N <= tn <= N and -N <= tm <= N:
                    h[row, problem.index(tn, tm)] += phase
    return h


@dataclass(frozen=True)
class EigenResult:
    """Top of the truncated spectrum plus the variational cross-check.

    lambda_N is the largest-real-part eigenvalue (the truncation is not
    Hermitian, so the largest-modulus value is reported alongside); mu
    is the exact quotient of the eigenvector and is the J the
    reconstructed state really achieves.  gap = |lambda_N - mu|.
    """

    lambda_N: float
    lambda_abs: float
    mu: float
    state: LatticeState

    @property
    def gap(self):
        return abs(self.lambda_N - self.mu)


def max_eigen(problem):
    """Largest-real-part eigenpair of the truncated recurrence matrix."""
    if problem.dimension <= _DENSE_LIMIT:
        h = build_matrix(problem)
        try:
            vals, vecs = scipy.linalg.eig(h)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NumericError(
                f"dense eigensolver failed for dimension {problem.dimension}: {exc}; "
                f"matrix norm {np.linalg.norm(h):.3e}"
            ) from exc
        idx = int(np.argmax(vals.real))
        lam = vals[idx]
        lam_abs = float(np.max(np.abs(vals)))
        vec = vecs[:, idx]
    else:
        h = scipy.sparse.csr_matrix(build_matrix(problem))
        try:
            vals, vecs = scipy.sparse.linalg.eigs(h, k=1, which="LR")
            lam = vals[0]
            lam_abs = float(
                np.abs(scipy.sparse.linalg.eigs(h, k=1, which="LM", return_eigenvectors=False)[0])
            )
            vec = vecs[:, 0]
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise NumericError(
                f"iterative eigensolver did not converge for dimension {problem.dimension}; "
                f"nnz={h.nnz}, matrix 1-norm {scipy.sparse.linalg.norm(h, 1):.3e}"
            ) from exc
    state = LatticeState(problem=problem, coeffs=tuple(vec))
    return EigenResult(
        lambda_N=float(lam.real),
        lambda_abs=lam_abs,
        mu=rayleigh_J(state),
        state=state,
    )


def rayleigh_J(state):
    """Exact J of the (normalized) lattice state on its defining rectangle.

    Evaluates the displaced parities at (0,0), (0,d), (d,0), (d,d) with
    the minus sign on (d,d), using exact coherent overlaps; equal to the
    quotient <psi|H|psi>/<psi|psi> and invariant under rescaling of the
    coefficients.
    """
    d = state.problem.d
    data = compile_state(state.to_superposition())
    val = 0.0
    for x, y, sign in ((0.0, 0.0, 1.0), (0.0, d, 1.0), (d, 0.0, 1.0), (d, d, -1.0)):
        val += sign * kernels.parity_point(data, x, y, 0.0)
    return val


def n_scan(n_values, d_squared=math.pi / 4.0):
    """(N, d_squared, lambda_N, lambda_abs, mu_N) rows over truncation sizes."""
    rows = []
    for n in n_values:
        problem = LatticeProblem(N=int(n), d=math.sqrt(d_squared))
        res = max_eigen(problem)
        rows.append((int(n), d_squared, res.lambda_N, res.lambda_abs, res.mu))
    return rows
