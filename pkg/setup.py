import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cooc._ckernels",
                sources=["src/cooc/_ckernels.pyx"],
                language="c++",
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # No Cython: the package still installs and falls back to the pure
    # Python kernels at import time.
    print("Cython not available, building without compiled kernels", file=sys.stderr)

setup(ext_modules=ext_modules)
