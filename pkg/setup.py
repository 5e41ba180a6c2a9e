"""Build the optional compiled kernel. Installation proceeds without it if
Cython or a C++ compiler is unavailable; the pure-Python kernel is used then."""

import os
import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._skip(exc)

    def _skip(self, exc):
        if os.environ.get("WSPSOLVE_REQUIRE_EXT"):
            raise exc
        print(f"warning: compiled kernel not built ({exc}); using pure Python", file=sys.stderr)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    ext = Extension(
        "wspsolve._ckernel",
        ["src/wspsolve/_ckernel.pyx"],
        include_dirs=["src/wspsolve"],
        depends=["src/wspsolve/_engine.hpp"],
        language="c++",
        extra_compile_args=["-O3", "-std=c++17"],
    )
    try:
        return cythonize([ext], compiler_directives={"language_level": "3"}, quiet=True)
    except Exception as exc:  # noqa: BLE001
        if os.environ.get("WSPSOLVE_REQUIRE_EXT"):
            raise
        print(f"warning: cython translation failed ({exc}); using pure Python", file=sys.stderr)
        return []


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
