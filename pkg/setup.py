"""Build script: compiles the Monte Carlo kernels as a C extension.

The package works without the extension (a numpy fallback is selected at
import time), but large-n policy simulation is an order of magnitude
faster compiled.  ``pip install -e . --no-build-isolation`` builds it.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "rankstop.kernels._fast",
                ["src/rankstop/kernels/_fast.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
