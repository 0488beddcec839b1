from setuptools import Extension, setup
from Cython.Build import cythonize

# Compiled stepping kernels. The package falls back to the pure-Python
# reference implementation when this extension is unavailable.
setup(
    ext_modules=cythonize(
        [
            Extension(
                "adiabloch._kernels._fast",
                ["src/adiabloch/_kernels/_fast.pyx"],
                # contraction off keeps the compiled arithmetic bit-identical
                # to the pure-Python reference (parity tests rely on it)
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
)
