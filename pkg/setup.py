"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a NumPy-based kernel module is
selected at import time), so any failure here degrades to the fallback
instead of aborting the install.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "pdsketch.kernels._ckernels",
                ["src/pdsketch/kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
