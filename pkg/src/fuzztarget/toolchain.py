"""Thin wrappers around ``rustc`` for building fixture crates and targets."""

from __future__ import annotations

import shutil
import subprocess
from dataclasses import dataclass
from pathlib import Path

EDITION = "2021"


@dataclass
class CompileResult:
    ok: bool
    output: Path
    stderr: str


def find_rustc() -> str | None:
    return shutil.which("rustc")


def compile_library(source: Path, crate_name: str, out_dir: Path) -> CompileResult:
    out = out_dir / f"lib{crate_name}.rlib"
    proc = subprocess.run(
        ["rustc", "--edition", EDITION, "--crate-type", "rlib", "--crate-name", crate_name,
         "-C", "debug-assertions=on", "-C", "overflow-checks=on", str(source), "-o", str(out)],
        capture_output=True, text=True,
    )
    return CompileResult(proc.returncode == 0, out, proc.stderr)


def compile_target(source: Path, crate_name: str, rlib: Path, out_dir: Path) -> CompileResult:
    out = out_dir / source.stem
    proc = subprocess.run(
        ["rustc", "--edition", EDITION, "-C", "overflow-checks=on", str(source),
         "--extern", f"{crate_name}={rlib}", "-L", str(rlib.parent), "-o", str(out)],
        capture_output=True, text=True,
    )
    return CompileResult(proc.returncode == 0, out, proc.stderr)
