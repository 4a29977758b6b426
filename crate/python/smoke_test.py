#!/usr/bin/env python3
"""Smoke test for the moebiuslab_py extension module.

Builds the cdylib if needed, copies it next to this script under the
importable name, and exercises the four exported functions.

Usage: python3 python/smoke_test.py [--release]
"""

import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def build_and_copy(release: bool) -> Path:
    profile = "release" if release else "debug"
    cmd = ["cargo", "build", "-p", "moebiuslab-py"]
    if release:
        cmd.append("--release")
    subprocess.run(cmd, cwd=ROOT, check=True)
    built = ROOT / "target" / profile / "libmoebiuslab_py.so"
    dest = Path(__file__).resolve().parent / "moebiuslab_py.so"
    shutil.copyfile(built, dest)
    return dest


def main() -> None:
    release = "--release" in sys.argv[1:]
    dest = build_and_copy(release)
    sys.path.insert(0, str(dest.parent))
    import moebiuslab_py as ml

    entries = ml.catalog_entries()
    names = [e["name"] for e in entries]
    assert "cone-clifford" in names and "rot-hypcyl" in names, names
    print(f"catalog: {len(entries)} entries")

    pt = ml.analyze_point("cone-clifford", [0.3, -0.8, 1.1, 0.2])
    assert max(pt["residuals"].values()) < 1e-6, pt["residuals"]
    assert abs(sum(pt["lambda_bar"])) < 1e-10
    print(f"analyze_point: lambda_bar={[round(v, 4) for v in pt['lambda_bar']]}")

    rep = ml.verify("torus", samples=8, seed=3)
    assert rep["passed"], rep["checks"]
    print(f"verify: {len(rep['checks'])} checks passed")

    cls = ml.classify("rot-hypcyl", samples=8, seed=42)
    assert cls["branch"] == "ThreeCurv-RotHypCylinder", cls["branch"]
    neg = ml.classify("graph", samples=8, seed=42)
    assert neg["branch"] == "NotSemiParallel", neg["branch"]
    print(f"classify: {cls['branch']} / {neg['branch']}")

    try:
        ml.classify("not-a-surface")
    except ValueError as exc:
        print(f"error mapping: {exc}")
    else:
        raise AssertionError("unknown entry should raise ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
