import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "fracops._core",
                ["src/fracops/_core.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Cython unavailable: install pure-Python only, fracops._backend falls
    # back to the numpy implementation at import time.
    ext_modules = []

setup(ext_modules=ext_modules)
