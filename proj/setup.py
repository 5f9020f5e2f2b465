from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

ext = Pybind11Extension(
    "annotex._annotex",
    sources=[
        "python/annotex_module.cpp",
        "src/graph.cpp",
        "src/evidence.cpp",
        "src/annotations.cpp",
        "src/builders.cpp",
        "src/predict.cpp",
        "src/formats.cpp",
    ],
    include_dirs=["include", "vendor"],
    libraries=["crypto"],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
