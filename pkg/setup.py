"""Build script for the optional compiled kernel extension.

The package is fully functional without the extension (rllp._kernels falls
back to the pure-Python twins); the extension just makes the hot loops fast.
A failed compile therefore degrades to a warning instead of aborting the
install.
"""

import warnings

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    # -ffp-contract=off keeps the compiled kernels arithmetically in step
    # with the pure-Python twins (no FMA contraction).
    ext_modules = cythonize(
        [
            Extension(
                "rllp._speedups",
                ["src/rllp/_speedups.pyx"],
                extra_compile_args=["-O2", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    warnings.warn(f"Cython unavailable ({exc}); installing pure-Python kernels only")
    ext_modules = []

setup(ext_modules=ext_modules)
