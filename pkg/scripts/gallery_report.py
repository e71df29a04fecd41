#!/usr/bin/env python3
"""Tabulate the gallery: umbilics found by the scan, their indices, and the
curvature sign nearby. Also times each verification suite.

    python scripts/gallery_report.py [--seed K]
"""

import argparse
import time

import numpy as np

from umbilix import geomcore, suites
from umbilix.errors import NonIsolatedUmbilicError
from umbilix.fieldindex import LoopSpec, refine_until_stable
from umbilix.surfexpr import builtin, sphere_inversion

GALLERY = [
    ("paraboloid", ()), ("saddle", ()), ("monkey_saddle", ()), ("catenoid", ()),
    ("sphere_patch", (1.0,)), ("plane", ()),
] + [("re_zk", (k,)) for k in range(2, 9)]


def describe(spec):
    try:
        found = geomcore.umbilic_scan(spec)
    except NonIsolatedUmbilicError:
        return [(spec.label, "non-isolated umbilic locus", "", "")]
    if not found:
        return [(spec.label, "no umbilics", "", "")]
    out = []
    for um in found:
        loop = LoopSpec((um.u, um.v), um.isolation_radius / 2)
        j, n = refine_until_stable(geomcore.traceless_field(spec), loop, "tensor")
        t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        ring = geomcore.geometry(spec, um.u + loop.radius * np.cos(t),
                                 um.v + loop.radius * np.sin(t))[2].gauss_curvature
        sign = "K<0" if np.all(ring < 0) else "K>0" if np.all(ring > 0) else "mixed"
        out.append((spec.label, f"({um.u:.3g}, {um.v:.3g})", str(j), f"{sign}, N={n}"))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    specs = [builtin(n, p) for n, p in GALLERY]
    specs.append(sphere_inversion(builtin("monkey_saddle"), (0, 0, 2), 1.0))
    print(f"{'surface':22s} {'umbilic':18s} {'index':6s} notes")
    for spec in specs:
        for row in describe(spec):
            print(f"{row[0]:22s} {row[1]:18s} {row[2]:6s} {row[3]}")

    print()
    print(f"{'suite':10s} {'cases':>6s} {'fail':>5s} {'seconds':>8s}")
    for name in suites.SUITES:
        t0 = time.perf_counter()
        rows = suites.run_suite(name, args.seed)
        dt = time.perf_counter() - t0
        bad = sum(not r["holds"] for r in rows)
        print(f"{name:10s} {len(rows):6d} {bad:5d} {dt:8.2f}")


if __name__ == "__main__":
    main()
