"""Build script: compiles the optional batched-kernel extension.

Set QMETRIC_NO_EXTENSION=1 to skip compilation and install the pure-Python
package; the numpy fallback kernels are selected automatically at import.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("QMETRIC_NO_EXTENSION") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "qmetric._kernels._core",
                    ["src/qmetric/_kernels/_core.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level="3",
        )
    except Exception as exc:  # pragma: no cover - build-environment dependent
        print(f"qmetric: skipping compiled kernels ({exc}); numpy fallback will be used")
        ext_modules = []

setup(ext_modules=ext_modules)
