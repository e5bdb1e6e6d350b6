"""Build hook: compile the optional fast kernels if Cython and a C++ toolchain exist.

The package is fully functional without the extension (the numpy fallback in
``softpq._kernels._py`` implements the same contracts bit-for-bit), so any
build failure here downgrades to a pure-Python install instead of aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "softpq._kernels._core",
                ["src/softpq/_kernels/_core.pyx"],
                language="c++",
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3", "-std=c++11"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # Cython missing, no compiler, ...
    print(f"softpq: skipping compiled kernels ({exc}); pure-Python fallback will be used",
          file=sys.stderr)

setup(ext_modules=ext_modules)
