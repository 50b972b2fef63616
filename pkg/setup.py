import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "mist._kernels._morph_c",
        ["src/mist/_kernels/_morph_c.pyx"],
        include_dirs=[numpy.get_include()],
    ),
    Extension(
        "mist._kernels._maxflow_c",
        ["src/mist/_kernels/_maxflow_c.pyx"],
        include_dirs=[numpy.get_include()],
    ),
]

setup(ext_modules=cythonize(extensions, language_level=3))
