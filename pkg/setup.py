"""Build script for the compiled branch-and-bound decoder core.

The package works without the extension (a pure-Python fallback is selected
at import time); building it makes most-likely-error decoding roughly an
order of magnitude faster.  Compile in place with

    python setup.py build_ext --inplace
"""

import os

from setuptools import Extension, setup

_PYX = os.path.join("src", "lqsim", "_core", "_bnb.pyx")

try:
    from Cython.Build import cythonize
except ImportError:  # source dist without Cython: install pure-Python only
    ext_modules = []
else:
    if os.path.exists(_PYX):
        ext_modules = cythonize(
            [Extension("lqsim._core._bnb", [_PYX], language="c++")],
            language_level=3,
        )
    else:
        ext_modules = []

setup(ext_modules=ext_modules)
