import numpy
from setuptools import Extension, setup
from Cython.Build import cythonize

# The compiled core is optional: if the build fails the package falls back
# to the pure-numpy kernels selected at import time.
ext = Extension(
    "lggm._kernels._core",
    sources=["src/lggm/_kernels/_core.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3"],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    optional=True,
)

setup(ext_modules=cythonize([ext], language_level=3))
