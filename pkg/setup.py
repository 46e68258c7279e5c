from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:  # the numpy fallback kernel is used instead
    pass
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("mupb._match_ext", ["src/mupb/_match_ext.pyx"], extra_compile_args=["-O3", "-ffp-contract=off"])],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
