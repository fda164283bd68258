"""Builds the native extension with cargo and places it in the package."""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

ROOT = Path(__file__).parent.resolve()


class CargoExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CargoBuildExt(build_ext):
    def build_extension(self, ext):
        subprocess.run(
            ["cargo", "build", "--release", "-p", "utt-py"],
            cwd=ROOT,
            check=True,
        )
        if sys.platform == "darwin":
            built = ROOT / "target" / "release" / "libutt_py.dylib"
        elif sys.platform == "win32":
            built = ROOT / "target" / "release" / "utt_py.dll"
        else:
            built = ROOT / "target" / "release" / "libutt_py.so"
        dest = Path(self.get_ext_fullpath(ext.name))
        dest.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(built, dest)


setup(
    ext_modules=[CargoExtension("utt_py.utt_py")],
    cmdclass={"build_ext": CargoBuildExt},
)
