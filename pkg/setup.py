"""Build the optional compiled kernels; the package falls back to numpy without them."""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("SPACEGOF_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "spacegof._core",
                    ["src/spacegof/_core.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3", "-fno-math-errno"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
