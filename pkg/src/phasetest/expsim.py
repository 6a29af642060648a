"""Sideband parity-measurement pipeline: simulate, fit, estimate J.

Reading a motional state works in three steps: displace, drive the
blue-sideband transition, and fit the spin-up signal

    P_up(t) = 1/2 * sum_n Q_n (1 - A_b exp(-lambda_b t) cos(Omega_n t)),

with Omega_n = sqrt(n+1) * eta*Omega, to recover the displaced
phonon-number distribution Q_n.  The parity sum_n (-1)^n Q_n equals the
scaled Wigner value at the displacement point, and four such parities
with the CHSH sign pattern give J.

The imperfection parameters A_b and lambda_b have no authoritative
values; the defaults here (A_b = 1, lambda_b = 5e3 / s, i.e. 0.005 per
microsecond) are plain artifact choices.  Shot noise is the only noise
source modeled; slow drifts are out of scope.
"""

import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.optimize

from .errors import DomainError, NumericError, ValidationError
from .states import FockSpec, MixtureSpec, displaced_parity

DEFAULT_ETA_OMEGA = 4.2e5  # rad/s; ~7.5 us pi time on the n=0 sideband


@dataclass(frozen=True)
class PhononDistribution:
    """Probabilities Q_n for n = 0..n_max; tail mass may be missing."""

    q: Tuple[float, ...]

    def __post_init__(self):
        q = tuple(float(v) for v in self.q)
        if not q:
            raise ValidationError("phonon distribution needs at least one entry")
        for v in q:
            if not math.isfinite(v) or v < -1e-12:
                raise ValidationError(f"probabilities must be >= 0, got {v}")
        q = tuple(max(v, 0.0) for v in q)
        if sum(q) > 1.0 + 1e-9:
            raise ValidationError(f"probabilities sum to {sum(q)} > 1")
        object.__setattr__(self, "q", q)

    @property
    def n_max(self):
        return len(self.q) - 1

    def total_mass(self):
        return sum(self.q)

    def parity(self):
        """sum_n (-1)^n Q_n, the scaled Wigner value at the probe point."""
        return sum((-1.0 if n % 2 else 1.0) * v for n, v in enumerate(self.q))


@dataclass(frozen=True)
class RabiModel:
    """Sideband response model; rates grow as sqrt(n+1) * eta_omega."""

    eta_omega: float = DEFAULT_ETA_OMEGA
    A_b: float = 1.0
    lambda_b: float = 5e3
    n_max: int = 10

    def __post_init__(self):
        if not (math.isfinite(self.eta_omega) and self.eta_omega > 0):
            raise ValidationError(f"eta_omega must be > 0, got {self.eta_omega}")
        if not (math.isfinite(self.A_b) and math.isfinite(self.lambda_b)):
            raise ValidationError("A_b and lambda_b must be finite")
        if self.lambda_b < 0:
            raise ValidationError(f"lambda_b must be >= 0, got {self.lambda_b}")
        if self.n_max < 0:
            raise ValidationError(f"n_max must be >= 0, got {self.n_max}")

    def rates(self):
        """Omega_{n,n+1} for n = 0..n_max (strictly increasing)."""
        return np.sqrt(np.arange(1, self.n_max + 2)) * self.eta_omega


@dataclass(frozen=True)
class TimeSeries:
    """Sampled spin-up probabilities with the per-point shot count."""

    times: Tuple[float, ...]
    p_up: Tuple[float, ...]
    shots: int

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        p_up = tuple(float(p) for p in self.p_up)
        if len(times) != len(p_up):
            raise ValidationError("times and p_up must have equal length")
        if not times:
            raise ValidationError("time series is empty")
        if any(b >= a for a, b in zip(times[1:], times)):
            raise ValidationError("times must be strictly increasing")
        if any(not 0.0 <= p <= 1.0 for p in p_up):
            raise ValidationError("p_up values must lie in [0, 1]")
        if self.shots < 1:
            raise ValidationError("shots must be >= 1")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "p_up", p_up)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["t_us", "p_up", "shots"])
        for t, p in zip(self.times, self.p_up):
            writer.writerow([f"{t * 1e6:.6f}", f"{p:.9f}", self.shots])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t_us", "p_up", "shots"]:
            raise ValidationError("time-series CSV must start with header t_us,p_up,shots")
        times, p_up, shots = [], [], None
        for row in reader:
            if not row:
                continue
            times.append(float(row[0]) * 1e-6)
            p_up.append(float(row[1]))
            shots = int(row[2])
        return cls(times=tuple(times), p_up=tuple(p_up), shots=shots or 1)


def _displaced_fock_prob(n, m, x):
    # |<n|D(alpha)|m>|^2 with x = |alpha|^2: generalized Laguerre of the
    # lower index at order |n - m|, weighted by the factorial ratio
    lo, hi = (m, n) if n >= m else (n, m)
    a = hi - lo
    prev = 1.0
    cur = 1.0 + a - x
    if lo == 0:
        lag = prev
    elif lo == 1:
        lag = cur
    else:
        for k in range(1, lo):
            prev, cur = cur, ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0)
        lag = cur
    return math.exp(-x) * x**a * _fact_ratio(lo, hi) * lag * lag


def _fact_ratio(lo, hi):
    # lo! / hi!
    out = 1.0
    for j in range(lo + 1, hi + 1):
        out /= j
    return out


def _fock_weights(state):
    if isinstance(state, FockSpec):
        return [(1.0, state.n)]
    if isinstance(state, MixtureSpec) and all(
        isinstance(s, FockSpec) for _, s in state.components
    ):
        return [(w, s.n) for w, s in state.components]
    raise ValidationError(
        "displaced distributions are defined for number states and their mixtures"
    )


def displaced_distribution(state, alpha, n_max, guard=10):
    """Phonon distribution Q_n(alpha) of the displaced state, n = 0..n_max.

    Requires n_max >= (largest Fock index) + guard; warns when the
    retained mass falls short of 1 by more than 1e-6.
    """
    weights = _fock_weights(state)
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise DomainError(f"displacement must be finite, got {alpha!r}")
    top = max(n for _, n in weights)
    if n_max < top + guard:
        raise ValidationError(
            f"n_max={n_max} too small for Fock index {top} (needs >= {top + guard})"
        )
    x = abs(alpha) ** 2
    q = [0.0] * (n_max + 1)
    for w, m in weights:
        if w == 0.0:
            continue
        for n in range(n_max + 1):
            q[n] += w * _displaced_fock_prob(n, m, x)
    tail = 1.0 - sum(q)
    if tail > 1e-6:
        warnings.warn(
            f"displaced distribution keeps {sum(q):.8f} of the mass "
            f"(tail estimate {tail:.2e}); increase n_max",
            stacklevel=2,
        )
    return PhononDistribution(q=tuple(q))


def ideal_signal(q, model, times):
    """Noise-free P_up(t) for a distribution under the sideband model.

    All levels of ``q`` contribute (rates extend past model.n_max, which
    only limits the fitting stage).
    """
    times = np.asarray(times, dtype=float)
    qv = np.asarray(q.q)
    rates = np.sqrt(np.arange(1, len(qv) + 1)) * model.eta_omega
    envelope = model.A_b * np.exp(-model.lambda_b * times)
    p = 0.5 * (
        qv.sum() - (qv[None, :] * np.cos(np.outer(times, rates))).sum(axis=1) * envelope
    )
    return np.clip(p, 0.0, 1.0)


def simulate_signal(q, model, times, shots=100, seed=None, ideal=False):
    """Binomial-sampled sideband signal; ``ideal`` skips the sampling."""
    p = ideal_signal(q, model, times)
    if ideal:
        return TimeSeries(times=tuple(times), p_up=tuple(p), shots=shots)
    rng = np.random.default_rng(seed)
    counts = rng.binomial(shots, p)
    return TimeSeries(times=tuple(times), p_up=tuple(counts / shots), shots=shots)


def paper_protocol_times(duration=150e-6, step=1e-6):
    """Sampling grid of the reference protocol: 1 us steps over 150 us."""
    n = int(round(duration / step))
    return tuple(step * (i + 1) for i in range(n))


@dataclass(frozen=True)
class FitDiagnostics:
    residual_norm: float
    q_sum: float
    mass_deficient: bool
    cov_diag: Tuple[float, ...]
    A_b: float
    lambda_b: float


def _design_matrix(times, model):
    times = np.asarray(times)
    rates = model.rates()
    envelope = model.A_b * np.exp(-model.lambda_b * times)
    return 0.5 * (1.0 - envelope[:, None] * np.cos(np.outer(times, rates)))


def fit_distribution(ts, model, refine_imperfections=False, mass_tol=0.01):
    """Constrained least-squares recovery of Q_n from a sideband signal.

    The model is linear in Q_n once (A_b, lambda_b) are fixed; the fit
    enforces Q_n >= 0 and sum Q <= 1.  With ``refine_imperfections`` an
    outer simplex search adjusts (A_b, lambda_b) as well.  Returns the
    distribution and diagnostics (residual norm, covariance diagonal,
    mass-deficiency flag for signals whose population leaks past n_max).
    """
    times = np.asarray(ts.times)
    y = np.asarray(ts.p_up)
    n_q = model.n_max + 1
    if len(times) < n_q + 2:
        raise NumericError(
            f"{len(times)} samples cannot identify {n_q} populations; extend the series"
        )
    span = times[-1] - times[0]
    if span * model.eta_omega < 2.0 * math.pi:
        raise NumericError(
            "series shorter than one sideband period; populations are not identifiable"
        )

    def solve_linear(m):
        design = _design_matrix(times, m)
        q, _ = scipy.optimize.nnls(design, y)
        if q.sum() > 1.0:
            res = scipy.optimize.minimize(
                lambda v: np.sum((design @ v - y) ** 2),
                np.clip(q / q.sum(), 0, 1),
                jac=lambda v: 2.0 * design.T @ (design @ v - y),
                bounds=[(0.0, 1.0)] * n_q,
                constraints=[{"type": "ineq", "fun": lambda v: 1.0 - v.sum()}],
                method="SLSQP",
            )
            if not res.success:
                raise NumericError(f"constrained fit failed: {res.message}")
            q = np.clip(res.x, 0.0, None)
        resid = design @ q - y
        return q, design, float(np.linalg.norm(resid))

    if refine_imperfections:
        def outer(v):
            m = RabiModel(
                eta_omega=model.eta_omega,
                A_b=min(max(v[0], 0.0), 1.2),
                lambda_b=max(v[1], 0.0),
                n_max=model.n_max,
            )
            return solve_linear(m)[2]

        res = scipy.optimize.minimize(
            outer, [model.A_b, model.lambda_b], method="Nelder-Mead",
            options={"xatol": 1e-3, "fatol": 1e-9},
        )
        model = RabiModel(
            eta_omega=model.eta_omega,
            A_b=min(max(res.x[0], 0.0), 1.2),
            lambda_b=max(res.x[1], 0.0),
            n_max=model.n_max,
        )

    q, design, rnorm = solve_linear(model)

    # Gauss-Markov covariance on the active set
    active = q > 1e-12
    cov_diag = np.zeros(n_q)
    dof = max(len(times) - int(active.sum()), 1)
    sigma2 = rnorm**2 / dof
    if active.any():
        gram = design[:, active].T @ design[:, active]
        try:
            cov_diag[active] = sigma2 * np.diag(np.linalg.pinv(gram))
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"singular design matrix in covariance estimate: {exc}") from exc

    dist = PhononDistribution(q=tuple(q))
    diags = FitDiagnostics(
        residual_norm=rnorm,
        q_sum=float(q.sum()),
        mass_deficient=bool(q.sum() < 1.0 - mass_tol),
        cov_diag=tuple(cov_diag),
        A_b=model.A_b,
        lambda_b=model.lambda_b,
    )
    return dist, diags


def estimate_J(parities, repeats=1):
    """Combine four (mean, sigma) parity estimates into (J, sigma_J).

    The (1,1)-labeled entry (last) carries the minus sign; sigmas add in
    quadrature assuming independent measurements, divided by
    sqrt(repeats) when each estimate is a per-repeat scatter.
    """
    if len(parities) != 4:
        raise ValidationError(f"need exactly 4 parity estimates, got {len(parities)}")
    if repeats < 1:
        raise ValidationError("repeats must be >= 1")
    means = [float(m) for m, _ in parities]
    sigmas = [float(s) for _, s in parities]
    value = means[0] + means[1] + means[2] - means[3]
    sigma = math.sqrt(sum(s * s for s in sigmas) / repeats)
    return value, sigma


def mixture_J(j_a, j_b, f):
    """Weighted combination f * j_a + (1-f) * j_b with quadrature sigma."""
    f = float(f)
    if not 0.0 <= f <= 1.0:
        raise DomainError(f"mixing fraction must lie in [0, 1], got {f}")
    va, sa = j_a
    vb, sb = j_b
    return f * va + (1.0 - f) * vb, math.sqrt((f * sa) ** 2 + ((1.0 - f) * sb) ** 2)


def run_parity_pipeline(state, alpha, model, times, shots, seed):
    """One simulated measurement of the parity at displacement ``alpha``.

    The signal is synthesized from the full displaced distribution; the
    fit recovers populations up to model.n_max only.
    """
    top = max(n for _, n in _fock_weights(state))
    q = displaced_distribution(state, alpha, max(model.n_max, top + 10))
    ts = simulate_signal(q, model, times, shots=shots, seed=seed)
    fitted, diags = fit_distribution(ts, model)
    return fitted.parity(), diags


def measure_J_pipeline(state, points, model=None, times=None, shots=100, repeats=10,
                       seed=0, theta=0.0, threads=1):
    """Monte Carlo J estimate at four phase-space points.

    Each repeat simulates and fits all four displacements with seeds
    spawned deterministically from the master seed; returns
    (J, sigma_J, per-point (mean, sigma) list).
    """
    if len(points) != 4:
        raise ValidationError(f"need exactly 4 points, got {len(points)}")
    model = model or RabiModel()
    times = times or paper_protocol_times()
    if repeats < 2:
        raise ValidationError("repeats must be >= 2 to estimate scatter")
    rot = complex(math.cos(theta), math.sin(theta))
    alphas = [complex(x, y) * rot for x, y in points]
    seeds = np.random.SeedSequence(seed).spawn(repeats * 4)

    def one(task):
        rep, i = task
        return run_parity_pipeline(
            state, alphas[i], model, times, shots, seeds[rep * 4 + i]
        )[0]

    tasks = [(rep, i) for rep in range(repeats) for i in range(4)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            flat = list(pool.map(one, tasks))
    else:
        flat = [one(t) for t in tasks]
    samples = np.array(flat).reshape(repeats, 4)
    means = samples.mean(axis=0)
    scatter = samples.std(axis=0, ddof=1)
    point_estimates = [(float(m), float(s)) for m, s in zip(means, scatter)]
    value, sigma = estimate_J(point_estimates, repeats=repeats)
    return value, sigma, point_estimates


def theory_parities(state, points, theta=0.0):
    """Exact displaced parities at the four points (reference values)."""
    return [displaced_parity(state, x, y, theta) for x, y in points]
