"""Build script for the optional compiled reachability kernel.

The package works without the extension (a numpy fallback is selected at
import time); building it just makes Monte Carlo trials faster.
"""
from setuptools import Extension, setup

extensions = []
try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "percopt._core._kernels",
                ["src/percopt/_core/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # no Cython (or no numpy) at build time: install pure-python only
    pass

setup(ext_modules=extensions)
