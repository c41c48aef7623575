"""Build script: compiles the Cython kernel extension when a C toolchain is
available. The package still works without it (pure-NumPy fallback)."""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/gasfeeg/kernels/_ckernels.pyx"],
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
    for ext in ext_modules:
        ext.include_dirs = include_dirs
        ext.define_macros = [("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")]
except ImportError:
    pass

setup(ext_modules=ext_modules)
