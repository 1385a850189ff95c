"""Build hook for the optional compiled pivoting kernel.

The package is fully functional without it; ``commitpay._kernels`` falls back
to the pure-Python implementation when the extension is missing.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("COMMITPAY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("commitpay._kernels_cy", ["src/commitpay/_kernels_cy.pyx"],
                       extra_compile_args=["-O3"], optional=True)],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
