"""Smoke test for the perc_range_py extension.

Build first:
    cargo build --release -p perc-range-py
then run:
    python3 python/smoke_test.py
The script loads target/release/libperc_range_py.so unless the module is
already importable (e.g. after a maturin install).
"""

import importlib.machinery
import importlib.util
import math
import pathlib
import sys


def load():
    try:
        import perc_range_py

        return perc_range_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for name in ("libperc_range_py.so", "libperc_range_py.dylib", "perc_range_py.dll"):
        lib = root / "target" / "release" / name
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("perc_range_py", str(lib))
            spec = importlib.util.spec_from_loader("perc_range_py", loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("extension not built; run `cargo build --release -p perc-range-py`")


def main():
    m = load()

    plane = m.Cluster.full(2, 3)
    assert len(plane) == 49 and plane.origin is not None

    # N_2 = 2 w.p. 1/4, else 3
    v = m.exact_laplace(plane, 0.5, 2)
    assert abs(v - (0.25 * 0.25 + 0.75 * 0.125)) < 1e-15

    lhs, rhs, gap = m.lamplighter_identity(m.Cluster.path(3), 0.4, 3)
    assert gap <= 1e-12, (lhs, rhs)

    c = m.Cluster.sample(2, 6, 0.7, 11)
    walk = m.simulate_walk(c, 20, 5) if len(c) > 1 else [c.origin]
    assert walk[0] == c.origin

    rows = m.mc_laplace(m.Cluster.full(2, 8), 0.8, [6], 100_000, 3)
    exact = m.exact_laplace(m.Cluster.full(2, 8), 0.8, 6)
    assert abs(rows[0][1] - exact) < 5 * rows[0][2]

    rep = m.killed_operator_report(m.Cluster.full(2, 3), 1, [2])
    assert abs(rep["lambda1"] - 0.5) < 1e-12

    kind, size = m.folner(m.Cluster.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], 0), 1.0, 4)
    assert (kind, size) == ("exact", 2)

    curve = m.nash_curve(2, 1000, 1e4, 10.0)
    assert curve[0] == (0.0, 0.0) and all(b[1] < a[1] for a, b in zip(curve, curve[1:]))
    assert math.isfinite(curve[-1][1])

    assert m.seed_manifest(7, 3)[:2] == m.seed_manifest(7, 2)

    report = m.run_recipe("nash-curve", "d_list = [2]\n")
    assert all(a["passed"] for a in report["assertions"])

    try:
        m.run_recipe("no-such-recipe")
    except ValueError:
        pass
    else:
        raise AssertionError("unknown recipe accepted")

    print("perc_range_py smoke test passed")


if __name__ == "__main__":
    main()
