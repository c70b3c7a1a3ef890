"""Build script: compiles the hot demodulation kernels as a C extension.

The package works without the extension (a NumPy fallback is selected at
import time); building it makes Monte Carlo runs roughly an order of
magnitude faster.  See src/admlink/kernels.py for the dispatch logic.
"""

from setuptools import setup
from setuptools.extension import Extension

from Cython.Build import cythonize
import numpy

extensions = [
    Extension(
        "admlink._kernels",
        ["src/admlink/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

compiler_directives = {
    "language_level": 3,
    "embedsignature": True,
    "boundscheck": False,
    "wraparound": False,
    "cdivision": True,
    "nonecheck": False,
}

setup(ext_modules=cythonize(extensions, compiler_directives=compiler_directives))
