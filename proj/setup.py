import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "subpress._core",
    sorted(glob.glob("src/*.cpp")) + ["bindings/module.cpp"],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    define_macros=[("SUBPRESS_VERSION", '"0.1.0"')],
)

setup(
    packages=["subpress"],
    package_dir={"": "python"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
