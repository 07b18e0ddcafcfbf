"""Smoke test for the pyexpdyn extension.

Build and run from the repository root:

    cargo build -p expdyn-py --release --features extension-module
    python3 python/smoke_test.py

The script finds target/release/libpyexpdyn.so and imports it as pyexpdyn.
"""

import cmath
import importlib.machinery
import importlib.util
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    lib = ROOT / "target" / "release" / "libpyexpdyn.so"
    if not lib.exists():
        sys.exit(f"missing {lib}; build the extension first")
    loader = importlib.machinery.ExtensionFileLoader("pyexpdyn", str(lib))
    spec = importlib.util.spec_from_file_location("pyexpdyn", lib, loader=loader)
    module = importlib.util.module_from_spec(spec)
    loader.exec_module(module)
    return module


def main():
    ex = load()
    f = ex.ExpMap(0.0)

    tag, n, steps = f.orbit(1 + 0j, 10)
    assert (tag, n) == ("escaped", 3), (tag, n)
    assert abs(steps[1] - math.e) < 1e-15

    w = 2.5 + 1.0j
    for k in (-2, 0, 3):
        z = f.inv_strip(k, w)
        assert abs(cmath.exp(z) - w) < 1e-12
    try:
        ex.ExpMap(-2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("a <= -1 must need the override")
    assert ex.ExpMap(-2.0, override_a=True).a == -2.0

    assert ex.chordal_dist(0j, None) == 2.0
    assert sorted(map(sorted, ex.eps_components([0j, 1 + 0j, 2.5 + 0j], 1.2))) == [[0, 1], [2]]

    window = (-4.0, 4.0, -1.0, 4.0)
    g1 = ex.build_gamma(f, "+", 1, 0.01, window)
    assert all(abs(z.imag - math.pi) <= 1e-9 for z in g1 if z is not None)

    summary = ex.family_summary(f, "+", 4, 0.05, window)
    assert summary["real_ray"] and summary["pi_line"]

    entries, c = ex.connectivity_probe(g1, [0.05, 0.03], window, delta=0.01)
    assert [e[1] for e in entries] == [1, 1] and c == 3.0

    forest = ex.preimage_forest(f, [-1 + 0.3j], 1, 2, (-4.0, 4.0, -20.0, 20.0))
    assert forest[0] == (0, "", -1 + 0.3j) and len(forest) > 1

    ray = ex.trace_ray(f, "0|zeros", [0.5, 1.0, 2.0])
    assert all(abs(z - t) < 1e-12 for t, z, _, _ in ray)

    ppm = ex.render_ppm(f, (-1.0, 1.0, -1.0, 1.0), 3, 3, 10)
    assert bytes(ppm).startswith(b"P6\n3 3\n255\n") and len(ppm) == 11 + 27

    print("pyexpdyn smoke test passed")


if __name__ == "__main__":
    main()
