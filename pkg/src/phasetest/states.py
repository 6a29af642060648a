"""Closed-form single-mode state families and exact displaced parities.

Quadrature convention: q = (a + a^dag)/2, p = (a - a^dag)/(2i), so the
vacuum variance is 1/4 and a coherent state's scaled Wigner function is
exp(-2(x-ax)^2) * exp(-2(y-ay)^2).  Every scalar reported by this module
is the scaled value (pi/2) W, which lives in [-1, 1] and equals the
number parity of the state displaced to that phase-space point.

Point coordinates (x, y) are understood in a frame rotated by ``theta``
from (q, p): (x, y)^T = R(theta) (q, p)^T.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple, Union

import numpy as np

from .errors import DomainError, ValidationError
from .kernels import StateData
from . import kernels

__all__ = [
    "GaussianSpec",
    "FockSpec",
    "CoherentSuperpositionSpec",
    "MixtureSpec",
    "StateSpec",
    "coherent",
    "displaced_parity",
    "laguerre",
    "coherent_overlap",
    "make_cat",
    "make_cat_vacuum_mixture",
    "compile_state",
    "state_to_dict",
    "state_from_dict",
]


def _require_finite(name, *values):
    for v in values:
        if isinstance(v, complex):
            ok = math.isfinite(v.real) and math.isfinite(v.imag)
        else:
            ok = math.isfinite(v)
        if not ok:
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class GaussianSpec:
    """Displaced squeezed thermal state.

    Parameters
    ----------
    alpha : complex
        Displacement amplitude (center of the Wigner distribution).
    r : float
        Squeeze strength, >= 0.
    phi : float
        Squeeze-axis angle in radians.
    nbar : float
        Thermal mean occupation, >= 0.  Purity is 1/(2*nbar + 1).
    """

    alpha: complex = 0j
    r: float = 0.0
    phi: float = 0.0
    nbar: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "nbar", float(self.nbar))
        _require_finite("GaussianSpec parameters", self.alpha, self.r, self.phi, self.nbar)
        if self.r < 0:
            raise ValidationError(f"squeeze strength r must be >= 0, got {self.r}")
        if self.nbar < 0:
            raise ValidationError(f"thermal occupation nbar must be >= 0, got {self.nbar}")

    @property
    def purity(self):
        return 1.0 / (2.0 * self.nbar + 1.0)

    def covariance(self):
        """2x2 covariance matrix of (q, p); det = ((nbar + 1/2)/2)^2."""
        half = 0.5 * (self.nbar + 0.5)
        ch = math.cosh(2.0 * self.r)
        sh = math.sinh(2.0 * self.r)
        c2 = math.cos(2.0 * self.phi)
        s2 = math.sin(2.0 * self.phi)
        return np.array(
            [
                [half * (ch - sh * c2), -half * sh * s2],
                [-half * sh * s2, half * (ch + sh * c2)],
            ]
        )


def coherent(alpha):
    """Coherent state |alpha> as a GaussianSpec."""
    return GaussianSpec(alpha=alpha)


@dataclass(frozen=True)
class FockSpec:
    """Number state |n>."""

    n: int

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ValidationError(f"Fock index must be an integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if self.n < 0:
            raise ValidationError(f"Fock index must be >= 0, got {self.n}")


@dataclass(frozen=True)
class CoherentSuperpositionSpec:
    """Pure superposition sum_i c_i |gamma_i>.

    Coefficients are rescaled on construction so <psi|psi> = 1; the
    normalization integral uses exact coherent overlaps.
    """

    terms: Tuple[Tuple[complex, complex], ...]

    def __init__(self, terms):
        terms = tuple((complex(c), complex(g)) for c, g in terms)
        if not terms:
            raise ValidationError("superposition needs at least one term")
        for c, g in terms:
            _require_finite("superposition term", c, g)
        coeff = np.array([c for c, _ in terms])
        gamma = np.array([g for _, g in terms])
        gram = _overlap_gram(gamma)
        norm2 = complex(np.conj(coeff) @ gram @ coeff)
        if abs(norm2.imag) > 1e-9 * (1.0 + abs(norm2.real)) or norm2.real <= 1e-12:
            raise ValidationError(f"superposition norm <psi|psi> = {norm2} is not a usable positive number")
        coeff = coeff / math.sqrt(norm2.real)
        object.__setattr__(self, "terms", tuple(zip(map(complex, coeff), map(complex, gamma))))

    def norm_squared(self):
        """<psi|psi> of the stored (already normalized) terms."""
        coeff = np.array([c for c, _ in self.terms])
        gamma = np.array([g for _, g in self.terms])
        return float((np.conj(coeff) @ _overlap_gram(gamma) @ coeff).real)


@dataclass(frozen=True)
class MixtureSpec:
    """Convex mixture of non-mixture specs.

    Nested mixtures are flattened on construction, so the stored nesting
    depth is at most one.  Weights must be >= 0 and sum to 1 within 1e-9
    (they are renormalized to machine precision); anything else is
    rejected.
    """

    components: Tuple[Tuple[float, "StateSpec"], ...]

    def __init__(self, components):
        flat = []
        for w, spec in components:
            w = float(w)
            _require_finite("mixture weight", w)
            if w < 0:
                raise ValidationError(f"mixture weight must be >= 0, got {w}")
            if isinstance(spec, MixtureSpec):
                flat.extend((w * wi, si) for wi, si in spec.components)
            elif isinstance(spec, (GaussianSpec, FockSpec, CoherentSuperpositionSpec)):
                flat.append((w, spec))
            else:
                raise ValidationError(f"unsupported mixture component {spec!r}")
        if not flat:
            raise ValidationError("mixture needs at least one component")
        total = sum(w for w, _ in flat)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"mixture weights sum to {total}, expected 1 within 1e-9")
        object.__setattr__(self, "components", tuple((w / total, s) for w, s in flat))


StateSpec = Union[GaussianSpec, FockSpec, CoherentSuperpositionSpec, MixtureSpec]


def laguerre(n, z):
    """Laguerre polynomial L_n(z) by the three-term recurrence."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValidationError(f"Laguerre order must be a nonnegative integer, got {n!r}")
    _require_finite("Laguerre argument", float(z))
    if n == 0:
        return 1.0
    prev, cur = 1.0, 1.0 - z
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 - z) * cur - k * prev) / (k + 1)
    return cur


def coherent_overlap(beta, gamma):
    """<beta|gamma> = exp(-|beta|^2/2 - |gamma|^2/2 + conj(beta)*gamma)."""
    beta = complex(beta)
    gamma = complex(gamma)
    _require_finite("coherent_overlap arguments", beta, gamma)
    return cmath.exp(
        -0.5 * (beta.real**2 + beta.imag**2)
        - 0.5 * (gamma.real**2 + gamma.imag**2)
        + beta.conjugate() * gamma
    )


def _overlap_gram(gamma):
    g2 = np.abs(gamma) ** 2
    return np.exp(
        -0.5 * (g2[:, None] + g2[None, :]) + np.conj(gamma)[:, None] * gamma[None, :]
    )


def make_cat(gamma):
    """Even cat state: N(|gamma> + |-gamma>) for real gamma."""
    gamma = float(gamma)
    _require_finite("cat amplitude", gamma)
    n = 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * gamma * gamma)))
    return CoherentSuperpositionSpec([(n, gamma), (n, -gamma)])


def make_cat_vacuum_mixture(gamma):
    """Phase-diffused cat: exp(-g^2) * (sinh g^2 |0><0| + cosh g^2 |cat><cat|)."""
    gamma = float(gamma)
    _require_finite("cat amplitude", gamma)
    g2 = gamma * gamma
    w_vac = math.exp(-g2) * math.sinh(g2)
    w_cat = math.exp(-g2) * math.cosh(g2)
    return MixtureSpec([(w_vac, GaussianSpec()), (w_cat, make_cat(gamma))])


def _primitive_components(spec):
    if isinstance(spec, MixtureSpec):
        return list(spec.components)
    if isinstance(spec, (GaussianSpec, FockSpec, CoherentSuperpositionSpec)):
        return [(1.0, spec)]
    raise ValidationError(f"not a state spec: {spec!r}")


@lru_cache(maxsize=512)
def compile_state(spec):
    """Flatten a StateSpec into the array form consumed by the kernels."""
    comps = _primitive_components(spec)
    n = len(comps)
    kind = np.zeros(n, dtype=np.int32)
    weight = np.zeros(n)
    gauss = np.zeros((n, 6))
    fock_n = np.zeros(n, dtype=np.int32)
    sp_offset = np.zeros(n + 1, dtype=np.int64)
    sp_coeff = []
    sp_gamma = []
    for k, (w, s) in enumerate(comps):
        weight[k] = w
        if isinstance(s, GaussianSpec):
            cov = s.covariance()
            det = cov[0, 0] * cov[1, 1] - cov[0, 1] ** 2
            gauss[k] = (
                s.alpha.real,
                s.alpha.imag,
                cov[1, 1] / det,
                -cov[0, 1] / det,
                cov[0, 0] / det,
                s.purity,
            )
        elif isinstance(s, FockSpec):
            kind[k] = 1
            fock_n[k] = s.n
        else:
            kind[k] = 2
            sp_coeff.extend(c for c, _ in s.terms)
            sp_gamma.extend(g for _, g in s.terms)
        sp_offset[k + 1] = len(sp_coeff)
    return StateData(
        kind=kind,
        weight=weight,
        gauss=gauss,
        fock_n=fock_n,
        sp_offset=sp_offset,
        sp_coeff=np.array(sp_coeff, dtype=complex),
        sp_gamma=np.array(sp_gamma, dtype=complex),
    )


def displaced_parity(state, x, y, theta=0.0):
    """Scaled Wigner value (pi/2) W_rho at (x, y) in the theta-rotated frame.

    Equals the expectation of the number parity after displacing the
    state by -(q + ip); always in [-1, 1].
    """
    x = float(x)
    y = float(y)
    theta = float(theta)
    _require_finite("phase-space point", x, y, theta)
    return kernels.parity_point(compile_state(state), x, y, theta)


def _complex_to_json(z):
    return [z.real, z.imag]


def _complex_from_json(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValidationError(f"complex value needs [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(float(v))


def state_to_dict(spec):
    """JSON-shaped dict for a StateSpec (complex values as [re, im])."""
    if isinstance(spec, GaussianSpec):
        return {
            "type": "gaussian",
            "alpha": _complex_to_json(spec.alpha),
            "r": spec.r,
            "phi": spec.phi,
            "nbar": spec.nbar,
        }
    if isinstance(spec, FockSpec):
        return {"type": "fock", "n": spec.n}
    if isinstance(spec, CoherentSuperpositionSpec):
        return {
            "type": "superposition",
            "terms": [
                {"coefficient": _complex_to_json(c), "amplitude": _complex_to_json(g)}
                for c, g in spec.terms
            ],
        }
    if isinstance(spec, MixtureSpec):
        return {
            "type": "mixture",
            "components": [
                {"weight": w, "spec": state_to_dict(s)} for w, s in spec.components
            ],
        }
    raise ValidationError(f"not a state spec: {spec!r}")


def state_from_dict(doc):
    """Inverse of ``state_to_dict``."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValidationError("state document must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "gaussian":
            return GaussianSpec(
                alpha=_complex_from_json(doc.get("alpha", 0.0)),
                r=float(doc.get("r", 0.0)),
                phi=float(doc.get("phi", 0.0)),
                nbar=float(doc.get("nbar", 0.0)),
            )
        if kind == "fock":
            return FockSpec(n=int(doc["n"]))
        if kind == "superposition":
            return CoherentSuperpositionSpec(
                [
                    (_complex_from_json(t["coefficient"]), _complex_from_json(t["amplitude"]))
                    for t in doc["terms"]
                ]
            )
        if kind == "mixture":
            return MixtureSpec(
                [(float(c["weight"]), state_from_dict(c["spec"])) for c in doc["components"]]
            )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed {kind} state document: {exc}") from exc
    raise ValidationError(f"unknown state type {kind!r}")
