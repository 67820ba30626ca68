"""Build script for the compiled integrator kernel.

The extension is optional at runtime: atomlight.kernels falls back to the
pure-Python implementation when the compiled module cannot be imported.
-ffp-contract=off keeps the compiled arithmetic bit-identical to the
pure-Python kernel (no fused multiply-add contraction).
"""

from setuptools import Extension, setup
from Cython.Build import cythonize

ext_modules = [
    Extension(
        "atomlight._kernels",
        sources=["src/atomlight/_kernels.pyx"],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
