from setuptools import setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/neurocycles/_kernel.pyx"],
        language_level="3",
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    # Without Cython the package still installs; the pure-Python kernel
    # twin is selected automatically at import.
    ext_modules = []

setup(ext_modules=ext_modules)
