"""Build script for the optional compiled matching core.

The package is pure Python except for ``nmwpm.matching._core``, a Cython
port of the blossom matcher used on the hot decoding path.  If Cython or a
C compiler is unavailable the build simply omits the extension and the
package falls back to the pure-Python matcher at import time
(see ``nmwpm.matching``).
"""

import os

import numpy
from setuptools import Extension, setup

PYX = os.path.join("src", "nmwpm", "matching", "_core.pyx")

ext_modules = []
if os.path.exists(PYX):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "nmwpm.matching._core",
                    [PYX],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
                "cdivision": True,
            },
        )

setup(ext_modules=ext_modules)
