"""Build script.

The package is pure Python except for an optional compiled kernel for
cyclic-word canonicalization (``loopcalc._wordcore``).  If Cython or a C
compiler is unavailable, or ``LOOPCALC_PURE=1`` is set, the build silently
skips the extension and the package falls back to ``loopcalc._wordpure``.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LOOPCALC_PURE") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("loopcalc._wordcore", ["src/loopcalc/_wordcore.pyx"])],
            language_level="3",
        )
    except Exception:
        ext_modules = []

setup(ext_modules=ext_modules)
