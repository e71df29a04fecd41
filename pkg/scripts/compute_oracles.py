#!/usr/bin/env python3
"""Print reference values from the independent oracles in tests/oracles.py.

These are the numbers frozen into the test-suite. Re-run after changing the
gallery to see what the oracles say before touching any expected value.

    python scripts/compute_oracles.py
"""

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402
from umbilix.surfexpr import builtin, sphere_inversion  # noqa: E402


def height_gradient_index(spec, a, radius=0.3, n=oracles.ORACLE_SAMPLES):
    """Winding of the coordinate gradient of h = (1 - <a, n>^2)/2, all by finite differences."""
    a = np.asarray(a, float) / np.linalg.norm(a)

    def h(u, v):
        _, Xu, Xv, *_ = oracles.fd_jet(spec, u, v)
        nrm = np.cross(Xu, Xv)
        nrm /= np.linalg.norm(nrm, axis=-1, keepdims=True)
        return 0.5 * (1 - (nrm @ a) ** 2)

    u, v = oracles.circle((0.0, 0.0), radius, n)
    hu, hv = oracles.fd_partials(h, u, v, 1e-3)
    return oracles.winding(np.stack([hu, hv], -1))


def main():
    print("principal-direction index at the origin, radius 0.3, N = 2^16")
    cases = [("monkey_saddle", builtin("monkey_saddle"))]
    cases += [(f"re_zk({k})", builtin("re_zk", [k])) for k in range(2, 9)]
    cases += [("saddle", builtin("saddle")), ("paraboloid", builtin("paraboloid")),
              ("catenoid", builtin("catenoid")),
              ("inv monkey c=(0,0,2) r=1", sphere_inversion(builtin("monkey_saddle"), (0, 0, 2), 1))]
    for name, spec in cases:
        print(f"  {name:28s} {oracles.principal_index(spec):+.6f}")
    spec = builtin("re_zk", [6])
    print(f"  re_zk(6) radius 0.5           {oracles.principal_index(spec, radius=0.5):+.6f}")

    monkey = builtin("monkey_saddle")
    K = oracles.gauss_curvature(monkey, np.array(0.3), np.array(0.1))
    print(f"monkey saddle K(0.3, 0.1) = {float(K):.10f}")

    u, v, disc = oracles.grid_argmin_anisotropy(monkey, 1001)
    print(f"monkey saddle anisotropy minimizer on 1001^2 grid: ({u:.3g}, {v:.3g}), disc {disc:.3g}")

    print("winding of grad h (FD), radius 0.3")
    for label, spec, a in [
        ("monkey a=(0.3,0.2,sqrt(.87))", monkey, (0.3, 0.2, np.sqrt(0.87))),
        ("re_zk(4) a tilted 30deg", builtin("re_zk", [4]), (0.5, 0.0, np.sqrt(0.75))),
        ("paraboloid a tilted 30deg", builtin("paraboloid"), (0.5, 0.0, np.sqrt(0.75))),
    ]:
        print(f"  {label:30s} {height_gradient_index(spec, a):+.6f}")

    print("B xi index, monkey saddle, constant xi = e_u (coordinate Weingarten route)")
    uu, vv = oracles.circle((0.0, 0.0), 0.3)
    W, _, _ = oracles.weingarten_coords(monkey, uu, vv)
    tr = 0.5 * (W[..., 0, 0] + W[..., 1, 1])
    B = W - tr[..., None, None] * np.eye(2)
    print(f"  j(B xi) = {oracles.line_index(B[..., :, 0]):+.6f}")


if __name__ == "__main__":
    main()
