"""Build script: compiles the optional Monte-Carlo kernel.

The package works without the extension (a pure-Python fallback is selected
at import time); the compiled kernel speeds up the statistical verification
suites.  Set FORESTCOLOR_NO_EXT=1 to skip compilation.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("FORESTCOLOR_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/forestcolor/_dm_kernel.pyx"],
            compiler_directives={"language_level": 3},
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
