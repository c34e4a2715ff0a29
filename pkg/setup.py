"""Build hook for the optional GMP-backed kernel extension.

The package imports and runs without it; ``truncweil._backend`` falls back
to the pure-Python kernels whenever the compiled module is unavailable.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TRUNCWEIL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "truncweil._ckernels",
                    ["src/truncweil/_ckernels.pyx"],
                    libraries=["gmp"],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
