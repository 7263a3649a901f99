"""Build script for the optional compiled kernels.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so any build failure here is non-fatal: set
CORRLAB_PURE_PYTHON=1 to skip the extension entirely.

-ffp-contract=off keeps the compiled kernels bit-identical to the numpy
fallback (no fused multiply-adds).
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("CORRLAB_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "corrlab.kernels._fast",
                    ["src/corrlab/kernels/_fast.pyx"],
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
