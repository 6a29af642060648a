"""Evaluation-backend selection.

The hot kernels (displaced parities and the point functionals, called
millions of times by the derivative-free optimizer and the scans) exist
twice: a Cython extension ``_kernels`` and a pure-Python twin
``_kernels_py`` with identical semantics.  The compiled one is picked
when importable; ``PHASETEST_BACKEND=python|compiled`` forces a choice.
"""

import os
from typing import NamedTuple

import numpy as np

from .errors import ValidationError


class StateData(NamedTuple):
    """Flattened mixture of primitive components, as consumed by the kernels.

    kind:      int32[K], 0 = Gaussian, 1 = number state, 2 = superposition
    weight:    float64[K], convex weights
    gauss:     float64[K, 6], rows (cx, cy, i11, i12, i22, mu)
    fock_n:    int32[K]
    sp_offset: int64[K+1], term slices into sp_coeff / sp_gamma
    sp_coeff:  complex128[T], normalized superposition coefficients
    sp_gamma:  complex128[T], coherent amplitudes
    """

    kind: np.ndarray
    weight: np.ndarray
    gauss: np.ndarray
    fock_n: np.ndarray
    sp_offset: np.ndarray
    sp_coeff: np.ndarray
    sp_gamma: np.ndarray


def _load(name):
    if name == "compiled":
        from . import _kernels as impl
    elif name == "python":
        from . import _kernels_py as impl
    else:
        raise ValidationError(f"unknown kernel backend {name!r}")
    return impl


_forced = os.environ.get("PHASETEST_BACKEND")
if _forced:
    _impl = _load(_forced)
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl


def backend_name():
    """Name of the active backend: 'compiled' or 'python'."""
    return "compiled" if _impl.COMPILED else "python"


def get_backend(name):
    """Load a backend module by name (used by tests and the benchmark)."""
    return _load(name)


parity_point = _impl.parity_point
parity_grid = _impl.parity_grid
j_rectangle = _impl.j_rectangle
j_triangle = _impl.j_triangle
j_rectangle_batch = _impl.j_rectangle_batch
j_triangle_batch = _impl.j_triangle_batch
