"""The compiled kernel and the pure-Python twin must agree bit-for-bit
(well, to a few ulp) on every state family and entry point."""

import subprocess
import sys

import numpy as np
import pytest

from phasetest import FockSpec, GaussianSpec, MixtureSpec, make_cat
from phasetest.eigenmax import LatticeProblem, max_eigen
from phasetest.kernels import backend_name, get_backend
from phasetest.states import compile_state

python_backend = get_backend("python")
try:
    compiled_backend = get_backend("compiled")
    HAVE_COMPILED = True
except ImportError:  # pragma: no cover
    compiled_backend = None
    HAVE_COMPILED = False

needs_compiled = pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")

STATES = [
    GaussianSpec(),
    GaussianSpec(alpha=0.4 - 0.8j, r=1.1, phi=0.7, nbar=0.6),
    FockSpec(0),
    FockSpec(7),
    make_cat(1.4),
    MixtureSpec([(0.2, FockSpec(1)), (0.3, GaussianSpec(r=0.5)), (0.5, make_cat(0.7))]),
]


def test_backend_flags():
    assert python_backend.COMPILED is False
    if HAVE_COMPILED:
        assert compiled_backend.COMPILED is True
    assert backend_name() in ("python", "compiled")


@needs_compiled
@pytest.mark.parametrize("spec", STATES)
def test_parity_point_agreement(spec, rng):
    data = compile_state(spec)
    for _ in range(150):
        x, y, th = rng.normal(0, 1.8, 3)
        a = python_backend.parity_point(data, x, y, th)
        b = compiled_backend.parity_point(data, x, y, th)
        assert b == pytest.approx(a, abs=5e-15)


@needs_compiled
@pytest.mark.parametrize("spec", STATES)
def test_functional_agreement(spec, rng):
    data = compile_state(spec)
    params = rng.normal(0, 1.0, (40, 7))
    params[:, 5] = np.abs(params[:, 5])
    ra = python_backend.j_rectangle_batch(data, params)
    rb = compiled_backend.j_rectangle_batch(data, params)
    np.testing.assert_allclose(rb, ra, atol=2e-14)
    ta = python_backend.j_triangle_batch(data, params)
    tb = compiled_backend.j_triangle_batch(data, params)
    np.testing.assert_allclose(tb, ta, atol=2e-14)


@needs_compiled
def test_grid_agreement(rng):
    data = compile_state(make_cat(1.0))
    xs = rng.normal(0, 1.5, 300)
    ys = rng.normal(0, 1.5, 300)
    a = python_backend.parity_grid(data, xs, ys, 0.3)
    b = compiled_backend.parity_grid(data, xs, ys, 0.3)
    np.testing.assert_allclose(b, a, atol=5e-15)


@needs_compiled
def test_lattice_state_agreement():
    # large superposition exercises the pair-sum overflow guard
    state = max_eigen(LatticeProblem.from_spacing_index(2)).state.to_superposition()
    data = compile_state(state)
    for x, y in ((0.0, 0.0), (0.886, 0.886), (2.5, -1.5)):
        a = python_backend.parity_point(data, x, y, 0.0)
        b = compiled_backend.parity_point(data, x, y, 0.0)
        assert b == pytest.approx(a, abs=1e-12)
        assert abs(b) <= 1 + 1e-12


def test_scalar_vs_batch_consistency(rng):
    impl = get_backend(backend_name())
    data = compile_state(STATES[-1])
    params = rng.normal(0, 0.9, (10, 7))
    params[:, 5] = np.abs(params[:, 5])
    batch = impl.j_rectangle_batch(data, params)
    for row, expected in zip(params, batch):
        assert impl.j_rectangle(data, *row) == pytest.approx(expected, abs=1e-15)


def test_env_var_forces_python_backend():
    code = (
        "import phasetest; print(phasetest.backend_name())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True,
        text=True,
        env={"PHASETEST_BACKEND": "python", "PATH": "/usr/bin:/bin"},
        check=True,
    )
    assert out.stdout.strip() == "python"
