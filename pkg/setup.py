from setuptools import setup, Extension

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; wittkit.kernels falls back
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("wittkit._kernels", ["src/wittkit/_kernels.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
