"""Build script: compiles the optional statevector kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a missing Cython or C compiler must not break the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qcra._kernels",
                ["src/qcra/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O2"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
