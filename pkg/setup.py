"""Build script for the optional compiled kernel.

The package is fully functional without it; ``bfrank._backend`` falls back
to the pure-Python kernels when the extension is absent.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "bfrank._core",
                ["src/bfrank/_core.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
