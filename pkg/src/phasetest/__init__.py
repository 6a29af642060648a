"""Phase-space tests of nonclassicality and genuine quantum non-Gaussianity.

Evaluates scaled Wigner functions (displaced parities) for closed-form
state families, the four-point functional J on rectangles and
parallelograms and the three-point functional J', optimizes them
analytically for Gaussian states and numerically for arbitrary states,
solves the lattice-superposition eigenproblem for maximal J, and
simulates the sideband parity-measurement pipeline.
"""

__version__ = "0.1.0"

from .errors import DomainError, NumericError, PhasetestError, ValidationError
from .states import (
    CoherentSuperpositionSpec,
    FockSpec,
    GaussianSpec,
    MixtureSpec,
    coherent,
    coherent_overlap,
    displaced_parity,
    laguerre,
    make_cat,
    make_cat_vacuum_mixture,
)
from .functionals import (
    CLASSICAL_LOWER,
    CLASSICAL_UPPER,
    GAUSSIAN_BOUND,
    TRIANGLE_CLASSICAL,
    TRIANGLE_GAUSSIAN,
    PointSet4,
    RectangleSpec,
    SqueezeMap,
    TestResult,
    TriangleSpec,
    eval_J,
    eval_Jprime,
    squeeze_points,
    witness_prime,
)
from .gaussian import (
    GaussianOptimum,
    detection_map,
    k_param,
    optimal_rectangle_gaussian,
    optimal_triangle_gaussian,
)
from .kernels import backend_name

__all__ = [
    "__version__",
    "backend_name",
    "PhasetestError",
    "ValidationError",
    "DomainError",
    "NumericError",
    "GaussianSpec",
    "FockSpec",
    "CoherentSuperpositionSpec",
    "MixtureSpec",
    "coherent",
    "displaced_parity",
    "laguerre",
    "coherent_overlap",
    "make_cat",
    "make_cat_vacuum_mixture",
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
    "eval_J",
    "eval_Jprime",
    "squeeze_points",
    "witness_prime",
    "GaussianOptimum",
    "k_param",
    "optimal_rectangle_gaussian",
    "optimal_triangle_gaussian",
    "detection_map",
]
