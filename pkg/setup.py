import numpy as np
from setuptools import Extension, setup

# The compiled integrator core is optional: carrollkit.backend falls back to
# the pure-Python kernels when the extension is absent.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "carrollkit._rk4",
                ["src/carrollkit/_rk4.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
