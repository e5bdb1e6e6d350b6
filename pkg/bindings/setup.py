"""Compile the native shim when possible; the package works without it."""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("softpq_bindings._shim", ["src/softpq_bindings/_shim.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:
    print(f"softpq-bindings: skipping native shim ({exc}); pure-Python fallback will be used",
          file=sys.stderr)

setup(ext_modules=ext_modules)
