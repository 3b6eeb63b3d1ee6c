#!/usr/bin/env python3
"""Smoke test for the rsfade_py extension module.

Builds nothing itself: run `cargo build -p rsfade-python --release` first.
The script locates the compiled cdylib, exposes it as `rsfade_py`, and
exercises the main types and operations.
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("librsfade_py.so", "rsfade_py.so", "librsfade_py.dylib")
    ]
    built = next((p for p in candidates if p.is_file()), None)
    if built is None:
        sys.exit("build the extension first: cargo build -p rsfade-python --release")
    stage = Path(tempfile.mkdtemp(prefix="rsfade_py_"))
    shutil.copy2(built, stage / "rsfade_py.so")
    sys.path.insert(0, str(stage))
    import rsfade_py

    return rsfade_py


def approx(a, b, tol=1e-12):
    assert abs(a - b) <= tol * max(1.0, abs(a), abs(b)), f"{a} != {b}"


def main():
    m = load_module()

    # Correction weights and centered-difference coefficients.
    assert m.rho_coefficients(2.0) == (-1.0 / 12.0, 7.0 / 6.0, -1.0 / 12.0)
    w = m.omega_coefficients(2.0, 4)
    approx(w[0], 2.0, 1e-14)
    approx(w[1], -1.0, 1e-14)
    assert w[2] == w[3] == w[4] == 0.0
    try:
        m.rho_coefficients(1.0)
    except ValueError as e:
        assert "invalid fractional order" in str(e)
    else:
        sys.exit("order 1 must be rejected")
    print("ok coefficients")

    # Generating function against its closed form.
    val = m.generating_function(1.5, math.pi / 2, 20000)
    approx(val, 2.0 ** 0.75, 1e-9)
    print("ok generating function")

    # Riesz scale and closed-form derivatives.
    approx(m.kappa(2.0), -0.5)
    approx(m.riesz_derivative_poly1(2.0, 0.3), 2.0 - 12.0 * 0.3 + 12.0 * 0.09, 1e-12)
    approx(m.riesz_derivative_poly2(2.0, 1.0), -2.0, 1e-12)
    approx(m.phi(1.8, 0.5), -0.6895548205468362, 1e-12)
    print("ok closed forms")

    # Operator matrix: symmetric, SPD, classical limit.
    mat = m.assemble_riesz_matrix(2.0, 3, 1.0)
    approx(mat[0][0], 2.5, 1e-12)
    approx(mat[0][1], -4.0 / 3.0, 1e-12)
    assert mat == [list(row) for row in zip(*mat)], "matrix not symmetric"
    is_spd, min_eig = m.certify_spd_riesz(1.8, 16, 0.05)
    assert is_spd and min_eig > 0.0
    eigs = m.tridiag_toeplitz_eigenvalues(-1.0, 2.0, -1.0, 3)
    approx(eigs[0], 2.0 - math.sqrt(2.0), 1e-12)
    approx(eigs[2], 2.0 + math.sqrt(2.0), 1e-12)
    print("ok operators")

    # A small solve on the catalog problem.
    p = m.Problem.catalog("example1")
    assert p.orders == (1.8, 0.9, 1.6, 0.7)
    result = p.solve(h=0.1, dt=0.01)
    assert result.steps == 314 or result.steps == 315
    assert result.max_error is not None and 0.0 < result.max_error < 1e-3
    print(f"ok solve (max error {result.max_error:.3e} in {result.steps} steps)")

    # Stability of the PR iteration even for a huge time step.
    radius = p.pr_spectral_radius(h=0.1, dt=10.0)
    assert 0.0 < radius < 1.0
    print(f"ok spectral radius ({radius:.4f} < 1)")

    # A two-level refinement study with machine-readable output.
    study = p.study("space", [0.25, 0.125], 0.05)
    assert len(study.rates) == 1 and study.max_errors[1] < study.max_errors[0]
    report = json.loads(study.json)
    assert report["problem"] == "example1" and report["axis"] == "space"
    print(f"ok study (rate {study.rates[0]:.3f})")

    print("all smoke tests passed")


if __name__ == "__main__":
    main()
