"""Point-set geometry and the four/three-point phase-space functionals.

The four-point functional J sums scaled Wigner values over the vertices
of a rectangle (or its squeeze-mapped parallelogram image) with the sign
pattern (-1)^{jk}; classical states obey -1 <= J <= 2 and mixtures of
Gaussian states obey J <= 8/3^(9/8).  The three-point functional J'
drops the (x0, y0) vertex; its bounds are 1 (classical) and 2 (Gaussian).
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError, ValidationError
from . import kernels
from .states import compile_state, state_from_dict, state_to_dict

CLASSICAL_LOWER = -1.0
CLASSICAL_UPPER = 2.0
GAUSSIAN_BOUND = 8.0 * 3.0 ** (-9.0 / 8.0)
TRIANGLE_CLASSICAL = 1.0
TRIANGLE_GAUSSIAN = 2.0
# CHSH-style correlation ceiling, kept for reference only; J is not
# subject to it and can reach 4.
TSIRELSON = 2.0 * math.sqrt(2.0)


def _check_finite(name, *vals):
    for v in vals:
        if not math.isfinite(v):
            raise DomainError(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class RectangleSpec:
    """Axis-aligned rectangle in the theta-rotated frame.

    Vertices are (x_j, y_k) for j, k in {0, 1}; degenerate rectangles
    (equal coordinates) are legal.
    """

    theta: float
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        for f in ("theta", "x0", "x1", "y0", "y1"):
            object.__setattr__(self, f, float(getattr(self, f)))
        _check_finite("rectangle", self.theta, self.x0, self.x1, self.y0, self.y1)


@dataclass(frozen=True)
class TriangleSpec:
    """Right triangle: evaluation uses (x1,y0), (x0,y1), (x1,y1) only."""

    theta: float
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        for f in ("theta", "x0", "x1", "y0", "y1"):
            object.__setattr__(self, f, float(getattr(self, f)))
        _check_finite("triangle", self.theta, self.x0, self.x1, self.y0, self.y1)


@dataclass(frozen=True)
class SqueezeMap:
    """Unimodular symmetric coordinate map of a squeezing operation.

    S(r, phi) = cosh(r) I + sinh(r) (cos(2 phi) sigma_z + sin(2 phi) sigma_x),
    with det S = 1.  phi is measured in the same rotated frame as the
    rectangle the map is applied to.
    """

    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "phi", float(self.phi))
        _check_finite("squeeze map", self.r, self.phi)
        if self.r < 0:
            raise ValidationError(f"squeeze map strength must be >= 0, got {self.r}")

    def matrix(self):
        ch, sh = math.cosh(self.r), math.sinh(self.r)
        c2, s2 = math.cos(2.0 * self.phi), math.sin(2.0 * self.phi)
        return np.array([[ch + sh * c2, sh * s2], [sh * s2, ch - sh * c2]])


@dataclass(frozen=True)
class PointSet4:
    """Four labeled points p_jk, ordered (0,0), (0,1), (1,0), (1,1).

    The sign pattern is fixed: (1,1) carries the minus sign.  Raw point
    sets must satisfy p00 + p11 = p01 + p10 (a linear image of some
    rectangle), otherwise the Gaussian-mixture bound would not apply to
    the evaluated value.
    """

    points: Tuple[Tuple[float, float], ...]
    theta: float = 0.0

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.points)
        if len(pts) != 4:
            raise ValidationError(f"point set needs exactly 4 points, got {len(pts)}")
        for a, b in pts:
            _check_finite("point set", a, b)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "theta", float(self.theta))
        _check_finite("point set", self.theta)
        scale = 1.0 + max(abs(c) for pt in pts for c in pt)
        for i in range(2):
            gap = pts[0][i] + pts[3][i] - pts[1][i] - pts[2][i]
            if abs(gap) > 1e-9 * scale:
                raise ValidationError(
                    "points are not a parallelogram (p00 + p11 != p01 + p10); "
                    "such sets are not images of a rectangle under a linear map"
                )

    @property
    def signs(self):
        return (1.0, 1.0, 1.0, -1.0)

    def is_rectangle(self, tol=1e-12):
        """True when the points are axis-aligned in their own frame."""
        p00, p01, p10, p11 = self.points
        scale = 1.0 + max(abs(c) for pt in self.points for c in pt)
        return abs(p01[0] - p00[0]) <= tol * scale and abs(p10[1] - p00[1]) <= tol * scale


def squeeze_points(rect, smap):
    """Map the rectangle vertices through S(r, phi); r = 0 is the identity."""
    s = smap.matrix()
    pts = []
    for xj, yk in (
        (rect.x0, rect.y0),
        (rect.x0, rect.y1),
        (rect.x1, rect.y0),
        (rect.x1, rect.y1),
    ):
        pts.append((s[0, 0] * xj + s[0, 1] * yk, s[1, 0] * xj + s[1, 1] * yk))
    return PointSet4(points=tuple(pts), theta=rect.theta)


@dataclass(frozen=True)
class TestResult:
    """Outcome of a J or J' evaluation with bound verdicts.

    Verdict thresholds are (-1, 2, 8/3^(9/8)) for rectangle and
    parallelogram kinds and (none, 1, 2) for triangles; comparisons are
    strict with zero slack.
    """

    value: float
    kind: str
    violates_lower_bound: bool
    exceeds_classical: bool
    exceeds_gaussian: bool
    parities: Tuple[float, ...]

    def to_dict(self):
        return {
            "value": self.value,
            "kind": self.kind,
            "verdicts": {
                "violates_lower_bound": self.violates_lower_bound,
                "exceeds_classical": self.exceeds_classical,
                "exceeds_gaussian": self.exceeds_gaussian,
            },
            "parities": list(self.parities),
        }


def eval_J(state, points):
    """Four-point functional of ``state`` on a PointSet4 (or RectangleSpec).

    value = sum_{jk} (-1)^{jk} * displaced_parity(state, x_jk, y_jk, theta)
    """
    if isinstance(points, RectangleSpec):
        points = squeeze_points(points, SqueezeMap())
    data = compile_state(state)
    parities = tuple(
        kernels.parity_point(data, px, py, points.theta) for px, py in points.points
    )
    value = parities[0] + parities[1] + parities[2] - parities[3]
    kind = "rectangle" if points.is_rectangle() else "parallelogram"
    return TestResult(
        value=value,
        kind=kind,
        violates_lower_bound=value < CLASSICAL_LOWER,
        exceeds_classical=value > CLASSICAL_UPPER,
        exceeds_gaussian=value > GAUSSIAN_BOUND,
        parities=parities,
    )


def eval_Jprime(state, tri, smap=None):
    """Three-point functional on a TriangleSpec.

    value = parity(x1, y0) + parity(x0, y1) - parity(x1, y1).  An
    optional squeeze map is applied to the three points directly.
    """
    s = (smap or SqueezeMap()).matrix()
    data = compile_state(state)
    parities = []
    for xj, yk in ((tri.x1, tri.y0), (tri.x0, tri.y1), (tri.x1, tri.y1)):
        px = s[0, 0] * xj + s[0, 1] * yk
        py = s[1, 0] * xj + s[1, 1] * yk
        parities.append(kernels.parity_point(data, px, py, tri.theta))
    value = parities[0] + parities[1] - parities[2]
    return TestResult(
        value=value,
        kind="triangle",
        violates_lower_bound=False,
        exceeds_classical=value > TRIANGLE_CLASSICAL,
        exceeds_gaussian=value > TRIANGLE_GAUSSIAN,
        parities=tuple(parities),
    )


def witness_prime(value):
    """Triangle non-Gaussianity witness: positive iff value beats the bound 2."""
    return value - TRIANGLE_GAUSSIAN


def pointset_to_dict(obj):
    if isinstance(obj, RectangleSpec):
        return {
            "type": "rectangle",
            "theta": obj.theta,
            "x0": obj.x0,
            "x1": obj.x1,
            "y0": obj.y0,
            "y1": obj.y1,
        }
    if isinstance(obj, TriangleSpec):
        return {
            "type": "triangle",
            "theta": obj.theta,
            "x0": obj.x0,
            "x1": obj.x1,
            "y0": obj.y0,
            "y1": obj.y1,
        }
    if isinstance(obj, SqueezeMap):
        return {"type": "squeeze", "r": obj.r, "phi": obj.phi}
    if isinstance(obj, PointSet4):
        return {
            "type": "pointset4",
            "theta": obj.theta,
            "points": [list(p) for p in obj.points],
        }
    raise ValidationError(f"not a point-set object: {obj!r}")


def pointset_from_dict(doc):
    """Parse a rectangle / triangle / pointset4 / squeeze document."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise ValidationError("point-set document must be an object with a 'type' field")
    kind = doc["type"]
    try:
        if kind == "rectangle":
            return RectangleSpec(
                theta=float(doc.get("theta", 0.0)),
                x0=float(doc["x0"]),
                x1=float(doc["x1"]),
                y0=float(doc["y0"]),
                y1=float(doc["y1"]),
            )
        if kind == "triangle":
            return TriangleSpec(
                theta=float(doc.get("theta", 0.0)),
                x0=float(doc["x0"]),
                x1=float(doc["x1"]),
                y0=float(doc["y0"]),
                y1=float(doc["y1"]),
            )
        if kind == "squeeze":
            return SqueezeMap(r=float(doc.get("r", 0.0)), phi=float(doc.get("phi", 0.0)))
        if kind == "pointset4":
            return PointSet4(
                points=tuple((float(p[0]), float(p[1])) for p in doc["points"]),
                theta=float(doc.get("theta", 0.0)),
            )
    except (KeyError, TypeError, IndexError) as exc:
        raise ValidationError(f"malformed {kind} document: {exc}") from exc
    raise ValidationError(f"unknown point-set type {kind!r}")


# re-exported for CLI fixtures that bundle states and point sets together
__all__ = [
    "CLASSICAL_LOWER",
    "CLASSICAL_UPPER",
    "GAUSSIAN_BOUND",
    "TRIANGLE_CLASSICAL",
    "TRIANGLE_GAUSSIAN",
    "RectangleSpec",
    "TriangleSpec",
    "SqueezeMap",
    "PointSet4",
    "TestResult",
    "squeeze_points",
    "eval_J",
    "eval_Jprime",
    "witness_prime",
    "pointset_to_dict",
    "pointset_from_dict",
    "state_to_dict",
    "state_from_dict",
]
