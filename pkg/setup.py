from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("e2tc._kernels", ["src/e2tc/_kernels.pyx"], include_dirs=[np.get_include()])],
        language_level=3,
    )
except ImportError:
    # numpy fallback kernels are used at import time
    ext_modules = []

setup(ext_modules=ext_modules)
