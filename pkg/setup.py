from setuptools import Extension, setup
from Cython.Build import cythonize

# -ffp-contract=off keeps the compiled kernel bit-identical to the numpy
# fallback (no fused multiply-adds).
ext_modules = cythonize(
    [
        Extension(
            "onebitprec._greedy_cy",
            ["src/onebitprec/_greedy_cy.pyx"],
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
    ],
    language_level="3",
)

setup(ext_modules=ext_modules)
