"""Build script: compiles the optional fast evaluation kernel.

The package works without the extension (a pure-Python backend is
selected at import time), so a failed cythonize/compile is downgraded
to a warning instead of aborting the install.
"""

import warnings

from setuptools import Extension, setup


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; building without the compiled kernel")
        return []
    ext = Extension(
        "phasetest._kernels",
        ["src/phasetest/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions())
