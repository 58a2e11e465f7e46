"""Build script: compiles the optional evaluation kernel.

The package is pure Python; the Cython extension only accelerates the
float evaluator used by the enumeration solver.  If Cython or a C
compiler is missing the build falls back to the pure-Python evaluator
(selected at import in corecuts.evalcore), so the extension is marked
optional.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "corecuts._evalcore",
                ["src/corecuts/_evalcore.pyx"],
                optional=True,
            )
        ],
        language_level="3",
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
