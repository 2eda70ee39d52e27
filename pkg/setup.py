"""Build script: compiles the optional Cython kernel extension.

The extension is a pure accelerator; if Cython or a C compiler is missing
the install proceeds and the package falls back to the numpy kernels.
Set BEAMLINK_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup
from setuptools.command.build_ext import build_ext


def _extensions():
    if os.environ.get("BEAMLINK_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "beamlink._core._kernels",
        sources=["src/beamlink/_core/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level="3")


class optional_build_ext(build_ext):
    """Degrade to the pure-python backend when compilation fails."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing or broken
            print(f"warning: skipping compiled kernels ({exc}); "
                  "falling back to numpy backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"warning: could not build {ext.name} ({exc}); "
                  "falling back to numpy backend")


setup(ext_modules=_extensions(), cmdclass={"build_ext": optional_build_ext})
