import os

import numpy
from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SIPSTICKY_NO_EXT") != "1":
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sipsticky._mc_speed",
                ["src/sipsticky/_mc_speed.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
