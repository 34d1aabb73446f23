import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("JLM_NO_EXTENSION", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "jlm._speedups",
                    ["src/jlm/_speedups.pyx"],
                    # no FMA contraction: sweeps must match the NumPy fallback bitwise
                    extra_compile_args=["-O2", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
