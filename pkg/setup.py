import os

from setuptools import setup

# The compiled stepper is optional: the package falls back to a pure-Python
# implementation at import time if the extension is absent or fails to build.
ext_modules = []
if not os.environ.get("HYBRIDGIBBS_PURE_PYTHON"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "hybridgibbs._stepper",
                    ["src/hybridgibbs/_stepper.pyx"],
                    include_dirs=[numpy.get_include()],
                )
            ],
            language_level="3",
        )
    except Exception:
        ext_modules = []

setup(ext_modules=ext_modules)
