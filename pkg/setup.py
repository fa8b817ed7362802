import os

from setuptools import Extension, setup

# The compiled kernels are optional: without them madlab falls back to the
# pure-numpy implementations in madlab._kernels._pykernels. Set MADLAB_NO_EXT=1
# to skip compilation entirely.
ext_modules = []
if os.environ.get("MADLAB_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "madlab._kernels._cykernels",
                    ["src/madlab/_kernels/_cykernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    # -ffp-contract=off forbids FMA contraction so the compiled
                    # kernels are bit-identical to the numpy fallback.
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={
                "language_level": 3,
                "boundscheck": False,
                "wraparound": False,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
