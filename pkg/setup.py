"""Build the optional compiled kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only degrades speed, never installs a
broken package.
"""

import sys

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Swallow compiler failures and fall back to the pure install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001 - any build failure is non-fatal
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the scenerec._speedups extension failed; "
            "the numpy fallback kernels will be used.\n  reason: %s" % exc,
            file=sys.stderr,
        )


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        optional_build_ext._warn(exc)
        return []
    return cythonize(
        [
            Extension(
                "scenerec._speedups",
                ["src/scenerec/_speedups.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={"language_level": 3},
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
