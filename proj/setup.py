"""CMake-driven extension build: compiles the C++ core and the pybind11
module out of the same CMake tree the CLI and tests use."""

import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        prefix = Path(self.build_lib).resolve()
        cfg = "Debug" if self.debug else "Release"
        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                f"-DCMAKE_BUILD_TYPE={cfg}",
                "-DSKBUILD=ON",  # library + bindings only, install into qfound/
                "-DQFOUND_BUILD_PYTHON=ON",
                f"-DPython_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_core", "-j"],
            check=True,
        )
        subprocess.run(
            ["cmake", "--install", str(build_dir), "--prefix", str(prefix)],
            check=True,
        )


setup(
    packages=["qfound"],
    package_dir={"qfound": "python/qfound"},
    ext_modules=[CMakeExtension("qfound._core")],
    cmdclass={"build_ext": CMakeBuild},
    zip_safe=False,
)
