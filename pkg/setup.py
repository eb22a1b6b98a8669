import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

setup(
    ext_modules=cythonize(
        [
            Extension(
                "fermsim._kernels.core",
                ["src/fermsim/_kernels/core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # limited-range complex math: inline multiplies instead of
                # __muldc3 calls; amplitudes are finite so no recovery needed
                extra_compile_args=["-O3", "-fcx-limited-range"],
            )
        ],
        language_level=3,
    ),
)
