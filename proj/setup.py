import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    """Drive the CMake build of the _qhist module only."""

    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPython3_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_qhist",
             "-j", str(os.cpu_count() or 1)],
            check=True,
        )

        built = sorted((build_dir / "python" / "qhist").glob("_qhist*.so"))
        if not built:
            raise RuntimeError("cmake did not produce the _qhist module")
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        self.copy_file(str(built[-1]), str(dest))


setup(
    ext_modules=[CMakeExtension("qhist._qhist")],
    cmdclass={"build_ext": CMakeBuild},
)
