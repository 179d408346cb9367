"""Build hooks for the optional compiled kernels.

The package is fully functional without the extension; install falls back to
the NumPy implementations in ``normtransport._kernels._pure`` when Cython or a
C compiler is unavailable.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "normtransport._kernels._native",
                ["src/normtransport/_kernels/_native.pyx"],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
