#!/usr/bin/env python3
"""Smoke test for the lorkm3_py extension module.

Builds the cdylib with cargo if needed, loads it directly, and checks a
few known table values end to end. Run from anywhere:

    python3 python/smoke_test.py
"""

import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    so = ROOT / "target" / "debug" / "liblorkm3_py.so"
    if not so.exists():
        subprocess.run(
            ["cargo", "build", "-p", "lorkm3-py"], cwd=ROOT, check=True
        )
    tmp = pathlib.Path(tempfile.mkdtemp(prefix="lorkm3_py_"))
    shutil.copy(so, tmp / "lorkm3_py.so")
    sys.path.insert(0, str(tmp))
    import lorkm3_py

    return lorkm3_py


def main():
    m = load_module()

    assert m.discriminant(1, -1, 0, 1) == 4
    assert m.is_root(1, 0, 1, 0)
    assert not m.is_root(2, 0, 3, 0)

    tables = m.Tables()
    ts = tables.supported_t()
    assert ts == [1, 2, 3, 4, 8, 9, 12, 16, 36], ts

    basis = tables.basis(1)
    assert len(basis) == 2
    phi = basis[0]
    assert phi.weight2 == 0 and phi.index2 == 2
    # q^0 row of the first index-1 form: r + 10 + 1/r.
    assert phi.coeff(0, 0) == "10"
    assert phi.coeff(0, 1) == "1"
    assert phi.coeff(0, -1) == "1"
    ok, violations = phi.is_reflective()
    assert ok and not violations

    # Round trip through the record serialization.
    again = m.JacobiForm.from_records(phi.to_records())
    assert again.coeff(1, 2) == phi.coeff(1, 2)

    header = tables.lift_header(1, [1, 0])
    assert "weight=5" in header and "A=1/2" in header, header

    records = tables.classify(1)
    names = sorted(name for (_, name, _, _, _) in records)
    assert names == ["Delta_30", "Delta_35", "Delta_5"], names
    weights = {name: w for (_, name, w, _, _) in records}
    assert weights["Delta_35"] == "35"

    expansion = tables.expand(1, [1, 0], 2, 2)
    # Leading prefactor term q^(1/2) r^(1/2) s^(1/2) with coefficient +1.
    assert "1 2 1 2 1 2 1" in expansion.splitlines(), expansion

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
