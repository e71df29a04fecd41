"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Expected index values are the N = 2^16 outputs of the independent oracle in
oracles.py (see scripts/compute_oracles.py), frozen here.
"""

import numpy as np
import pytest

import numchecks
from conftest import ACCEPTANCE_LINES
from umbilix.errors import DegenerateLoopError, NonIsolatedUmbilicError
from umbilix.fieldindex import HalfIndex, LoopSpec, _winding_at, index_of_tensor
from umbilix.geomcore import traceless_field, umbilic_scan
from umbilix.heightlab import HeightData
from umbilix.suites import (
    SHARPNESS_SET,
    negative_curvature_gallery,
    run_eq8,
    run_lemma3,
    run_thm1,
    run_thm2,
)
from umbilix.surfexpr import builtin, sphere_inversion

ORIGIN = (0.0, 0.0)

# oracle values, principal-direction index at the origin, radius 0.3
ORACLE_INDEX = {
    "monkey_saddle": -0.5, "re_zk(3)": -0.5, "re_zk(4)": -1.0, "re_zk(5)": -1.5,
    "re_zk(6)": -2.0, "re_zk(7)": -2.5, "re_zk(8)": -3.0,
}


def report(n, title, ok, detail):
    line = f"criterion {n} {title}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_1_non_positive_index():
    got = {}
    for spec in negative_curvature_gallery():
        got[spec.label] = index_of_tensor(traceless_field(spec), LoopSpec(ORIGIN, 0.3))
    bad = [k for k, j in got.items()
           if j != HalfIndex.from_value(ORACLE_INDEX[k]) or j > HalfIndex(0)]
    k_ok = all(got[f"re_zk({k})"] == HalfIndex(2 - k) for k in range(3, 9))
    detail = ", ".join(f"{k}={j}" for k, j in got.items())
    report(1, "index at K<0 umbilics", not bad and k_ok, detail)


def test_criterion_2_sharpness():
    rows = run_thm1()
    (sharp,) = [r for r in rows if r["case_id"] == "thm1:~sharpness"]
    hit = {HalfIndex(r["index_num2"]) for r in rows if r["case_id"] != "thm1:~sharpness"}
    ok = sharp["holds"] and SHARPNESS_SET <= hit and all(r["holds"] for r in rows)
    report(2, "sharpness", ok, f"realized {sharp['index']}")


@pytest.mark.parametrize("seed", [0, 7])
def test_criterion_3_index_formula(seed):
    rows = run_thm2(seed)
    fails = [r["case_id"] for r in rows if not r["holds"]]
    ok = len(rows) >= 60 and not fails
    report(3, f"tensor index formula seed={seed}", ok, f"{len(rows)} cases, {len(fails)} failures")


def test_criterion_4_height_identity():
    rows = run_eq8()
    surfaces = {r["surface"] for r in rows}
    fails = [r["case_id"] for r in rows if not r["eq8_holds"]]
    per_surface = all(sum(r["surface"] == s for r in rows) == 3 for s in surfaces)
    ok = not fails and per_surface and len(surfaces) == len(negative_curvature_gallery())
    report(4, "height-function identity", ok,
           f"{len(surfaces)} umbilics x 3 directions, {len(fails)} failures")


def test_criterion_5_gradient_bound():
    rows = run_lemma3()
    idx = [r["index_num2"] for r in rows]
    ext = [r["extremum_class"] in ("min", "max") for r in rows]
    bound = all(i <= 2 for i in idx)
    iff = all((i == 2) == e for i, e in zip(idx, ext))
    ok = len(rows) == 20 and bound and iff and min(idx) == -8 and all(r["holds"] for r in rows)
    report(5, "gradient index bound", ok,
           f"{len(rows)} functions, indices {min(idx) / 2:g}..{max(idx) / 2:g}, "
           f"{sum(ext)} extrema")


def test_criterion_6_numerical_identities():
    rng = np.random.default_rng(2024)
    surfaces = negative_curvature_gallery() + [builtin("catenoid")]
    worst = {"hess": 0.0, "grad_h": 0.0, "ad": 0.0, "norm": 0.0}
    for spec in surfaces:
        hd = HeightData.default(spec, azimuth_deg=60)
        u, v = numchecks.admissible_points(spec, hd, rng, 500)
        worst["hess"] = max(worst["hess"], numchecks.hessian_error(spec, hd, u, v, rng))
        worst["grad_h"] = max(worst["grad_h"], numchecks.grad_h_error(spec, hd, u, v))
        worst["norm"] = max(worst["norm"], numchecks.norm_identity_error(spec, hd, u, v))
        worst["ad"] = max(worst["ad"], numchecks.ad_fd_error(spec, rng, 500))
    inv = sphere_inversion(builtin("monkey_saddle"), (0, 0, 2), 1.0)
    worst["ad"] = max(worst["ad"], numchecks.ad_fd_error(inv, rng, 500))
    ok = (worst["hess"] < 1e-4 and worst["grad_h"] < 1e-4 and worst["ad"] < 1e-5
          and worst["norm"] < 1e-12)
    report(6, "numerical identities", ok,
           f"hessian {worst['hess']:.1e}, grad h {worst['grad_h']:.1e}, "
           f"AD/FD {worst['ad']:.1e}, |grad f| {worst['norm']:.1e}")


def test_criterion_7_invariance():
    checks = {}
    for spec in negative_curvature_gallery():
        B = traceless_field(spec)
        ref = HalfIndex.from_value(ORACLE_INDEX[spec.label])
        checks[f"{spec.label}:radius"] = all(
            index_of_tensor(B, LoopSpec(ORIGIN, r)) == ref for r in (0.1, 0.2, 0.4))
        # fixed-resolution windings agree at every doubling from 2^10 up
        loop = LoopSpec(ORIGIN, 0.3)
        fixed = {_winding_at(B, loop, 2**k)[0] for k in range(10, 15)}
        checks[f"{spec.label}:doubling"] = fixed == {ref.twice_value}
        scaled = lambda u, v, c=7.5: c * B(u, v)
        tiny = lambda u, v: 1e-6 * B(u, v)
        checks[f"{spec.label}:scaling"] = (index_of_tensor(scaled, loop) == ref
                                           == index_of_tensor(tiny, loop))
    monkey = builtin("monkey_saddle")
    for center, rad in [((0, 0, 2), 1.0), ((0.5, -0.3, 1.5), 0.7), ((0, 0, -3), 2.0)]:
        inv = sphere_inversion(monkey, center, rad)
        checks[f"inversion{center}"] = (
            index_of_tensor(traceless_field(inv), LoopSpec(ORIGIN, 0.3)) == HalfIndex(-1))
    fails = [k for k, ok in checks.items() if not ok]
    report(7, "invariance", not fails, f"{len(checks)} checks, failing: {fails or 'none'}")


def test_criterion_8_degeneracy():
    outcomes = {}
    try:
        umbilic_scan(builtin("sphere_patch", [1.0]))
        outcomes["sphere scan"] = "no error"
    except NonIsolatedUmbilicError:
        outcomes["sphere scan"] = "non-isolated"
    try:
        index_of_tensor(traceless_field(builtin("sphere_patch", [1.0])), LoopSpec(ORIGIN, 0.2))
        outcomes["sphere loop"] = "silent index"
    except DegenerateLoopError:
        outcomes["sphere loop"] = "degenerate"
    for spec in (builtin("monkey_saddle"), builtin("re_zk", [5])):
        try:
            index_of_tensor(traceless_field(spec), LoopSpec((0.25, 0.0), 0.25))
            outcomes[f"{spec.label} through umbilic"] = "silent index"
        except DegenerateLoopError:
            outcomes[f"{spec.label} through umbilic"] = "degenerate"
    ok = (outcomes.pop("sphere scan") == "non-isolated"
          and all(o == "degenerate" for o in outcomes.values()))
    report(8, "degeneracy handling", ok, "sphere non-isolated, loops through umbilics degenerate")
