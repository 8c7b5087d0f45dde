"""Builds the optional compiled kernel; the package falls back to numpy if absent."""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext = Extension(
        "pairmix._kernels",
        sources=["src/pairmix/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    ext.optional = True  # install proceeds on build failure; runtime selects the fallback
    ext_modules = cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
