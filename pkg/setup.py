"""Build script for the optional compiled pair-scatter kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a missing compiler only costs speed, not functionality.
"""

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "gcfpbe._pair_scatter",
                ["src/gcfpbe/_pair_scatter.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=extensions)
