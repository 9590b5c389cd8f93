from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback is used at runtime
    ext_modules = []
else:
    ext_modules = cythonize(
        ["src/nikmon/kernels/_perm.pyx"],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
