"""Builds the optional Cython sanitizer extension.

The package works without it: assistkit.runtime falls back to the pure-Python
kernels when the compiled module is absent (see runtime/sanitizers.py).
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "assistkit.runtime._sanitize_cy",
                ["src/assistkit/runtime/_sanitize_cy.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
