"""Verification suites over the surface gallery and seeded random cases.

Each suite returns a list of row dicts (one per case, sorted by case id)
whose ``holds`` entry says whether the checked identity or bound held.
"""

from __future__ import annotations

import numpy as np

from . import geomcore
from .fieldindex import HalfIndex, LoopSpec, index_of_tensor
from .heightlab import HeightData, extremum_probe, lemma3_check, verify_third_index
from .surfexpr import builtin, im_zk_source, re_zk_source
from .tensorlab import (
    RiemannianPatch,
    SymTensorField,
    TestLineField,
    homotopy_invertibility,
    verify_index_formula,
)

SUITES = ("thm1", "thm2", "eq8", "lemma3", "homotopy", "probe")
SHARPNESS_SET = frozenset(HalfIndex(-t) for t in range(0, 7))  # 0, -1/2, ..., -3


def negative_curvature_gallery():
    """Gallery surfaces with K < 0 away from an isolated umbilic at the origin."""
    return [builtin("monkey_saddle")] + [builtin("re_zk", [k]) for k in range(3, 9)]


def expected_re_zk_index(k: int) -> HalfIndex:
    return HalfIndex(2 - k)


def tensor_gallery():
    return negative_curvature_gallery() + [
        builtin("re_zk", [2]), builtin("saddle"), builtin("paraboloid"), builtin("catenoid")]


# --------------------------------------------------------------------------
# non-positive indices on the K < 0 gallery, and the realized index set


def run_thm1(seed: int = 0, radius: float = 0.3):
    rows = []
    cases = [(builtin("re_zk", [k]), expected_re_zk_index(k)) for k in range(2, 9)]
    cases += [(builtin("monkey_saddle"), HalfIndex(-1)), (builtin("saddle"), HalfIndex(0)),
              (builtin("catenoid"), HalfIndex(0))]
    for spec, expected in cases:
        j = index_of_tensor(geomcore.traceless_field(spec), LoopSpec((0.0, 0.0), radius))
        rows.append({
            "case_id": f"thm1:{spec.label}",
            "surface": spec.label,
            "radius": radius,
            "index": str(j),
            "index_num2": j.twice_value,
            "expected_num2": expected.twice_value,
            "holds": j == expected and j <= HalfIndex(0),
        })
    hit = {HalfIndex(r["index_num2"]) for r in rows}
    missing = sorted(SHARPNESS_SET - hit)
    rows.append({
        "case_id": "thm1:~sharpness",
        "surface": "gallery",
        "radius": radius,
        "index": " ".join(str(x) for x in sorted(hit & SHARPNESS_SET, reverse=True)),
        "index_num2": len(hit & SHARPNESS_SET),
        "expected_num2": len(SHARPNESS_SET),
        "holds": not missing,
    })
    return sorted(rows, key=lambda r: r["case_id"])


# --------------------------------------------------------------------------
# index formula for abstract tensors


def _complex_power_sources(k: int):
    if k == 0:
        return "1", "0"
    return re_zk_source(k), im_zk_source(k)


def _lin(c1, s1, c2, s2):
    return f"({float(c1)!r})*({s1}) + ({float(c2)!r})*({s2})"


def random_tensor(rng: np.random.Generator, patch, label: str) -> tuple[SymTensorField, HalfIndex]:
    """Symmetric tensor whose traceless part is c z^n or c conj(z)^n plus a small
    higher-order perturbation; its index at the origin is n/2 or -n/2."""
    n = int(rng.integers(0, 4))
    conj = bool(rng.integers(0, 2)) and n > 0
    mag, arg = rng.uniform(0.5, 2.0), rng.uniform(0, 2 * np.pi)
    cr, ci = mag * np.cos(arg), mag * np.sin(arg)
    emag, earg = rng.uniform(0.0, 0.3), rng.uniform(0, 2 * np.pi)
    er, ei = emag * np.cos(earg), emag * np.sin(earg)
    re_n, im_n = _complex_power_sources(n)
    re_p, im_p = _complex_power_sources(n + 1)
    if conj:
        im_n, im_p = f"-({im_n})", f"-({im_p})"
    a = f"{_lin(cr, re_n, -ci, im_n)} + {_lin(er, re_p, -ei, im_p)}"
    b = f"{_lin(cr, im_n, ci, re_n)} + {_lin(er, im_p, ei, re_p)}"
    t0, t1, t2 = rng.normal(size=3)
    trace = f"({float(t0)!r}) + ({float(t1)!r})*u + ({float(t2)!r})*v^2"
    A = SymTensorField.from_exprs(patch, f"{trace} + {a}", b, f"{trace} - ({a})", label=label)
    return A, HalfIndex(-n if conj else n)


def abstract_patches():
    return {
        "euclid": RiemannianPatch.euclidean(),
        "conformal": RiemannianPatch.from_sources("exp(u - v)", "0", "exp(u - v)"),
        "diagonal": RiemannianPatch.from_sources("1 + u^2", "0", "2 + sin(v)"),
        "skew": RiemannianPatch.from_sources("2", "0.5*cos(u)", "1 + v^2"),
    }


def field_menu(A: SymTensorField):
    fields = [TestLineField.constant(A.patch, 0.0)]
    fields += [TestLineField.polar_power(A.patch, m) for m in range(-2, 3)]
    fields.append(TestLineField.eigenfield(A))
    return fields


def thm2_cases(seed: int = 0, n_random: int = 12):
    """Yield (case_id, A, expected j(A) or None, xi, loop)."""
    radii = (0.1, 0.3)
    tensors = []
    for spec in tensor_gallery():
        tensors.append((f"surf:{spec.label}", SymTensorField.from_surface(spec), None))
    rng = np.random.default_rng(seed)
    patches = abstract_patches()
    names = sorted(patches)
    for i in range(n_random):
        pname = names[i % len(names)]
        A, expected = random_tensor(rng, patches[pname], f"rand{i:02d}@{pname}")
        tensors.append((f"rand:{i:02d}:{pname}", A, expected))
    for tid, A, expected in tensors:
        for xi in field_menu(A):
            for r in radii:
                yield f"thm2:{tid}:{xi.label}:r{r:g}", A, expected, xi, LoopSpec((0.0, 0.0), r)


def run_thm2(seed: int = 0):
    rows = []
    for case_id, A, expected, xi, loop in thm2_cases(seed):
        rep = verify_index_formula(A, xi, loop, case_id)
        ok = rep.holds and (expected is None or rep.jA == expected)
        rows.append({
            "case_id": case_id,
            "jA_num2": rep.jA.twice_value,
            "jBxi_num2": rep.jBxi.twice_value,
            "jxi_num2": rep.jxi.twice_value,
            "holds": ok,
        })
    return sorted(rows, key=lambda r: r["case_id"])


# --------------------------------------------------------------------------
# height-function identity and probe

HEIGHT_AZIMUTHS = (0.0, 120.0, 240.0)
PROBE_RADII = (0.05, 0.1, 0.2)


def height_directions(spec):
    return [HeightData.default(spec, azimuth_deg=az) for az in HEIGHT_AZIMUTHS]


def run_eq8(seed: int = 0, radius: float = 0.3):
    rows = []
    for spec in negative_curvature_gallery():
        for i, hd in enumerate(height_directions(spec)):
            rep = verify_third_index(spec, hd, LoopSpec((0.0, 0.0), radius))
            probe = extremum_probe(spec, hd, PROBE_RADII)
            ax, ay, az = hd.direction
            rows.append({
                "case_id": f"eq8:{spec.label}:a{i}",
                "surface": spec.label,
                "a_x": ax, "a_y": ay, "a_z": az,
                "radius": radius,
                "jA_num2": rep.jA.twice_value,
                "jgradh_num2": rep.j_grad_h.twice_value,
                "jgradf_num2": rep.j_grad_f.twice_value,
                "eq8_holds": rep.holds and rep.grad_f_vanishes,
                "probe_pass": probe.all_pass,
                "holds": rep.holds and rep.grad_f_vanishes and probe.all_pass,
            })
    return sorted(rows, key=lambda r: r["case_id"])


def run_probe(seed: int = 0):
    rows = []
    for spec in negative_curvature_gallery():
        for i, hd in enumerate(height_directions(spec)):
            rep = extremum_probe(spec, hd, PROBE_RADII)
            rows.append({
                "case_id": f"probe:{spec.label}:a{i}",
                "surface": spec.label,
                "radii": " ".join(f"{r:g}" for r in rep.radii),
                "passes": " ".join("1" if p else "0" for p in rep.passes),
                "applicable": rep.applicable,
                "holds": rep.all_pass,
            })
    return sorted(rows, key=lambda r: r["case_id"])


# --------------------------------------------------------------------------
# gradient index bound

# (label, function, metric name, expected index, expected class)
LEMMA3_CASES = [
    ("bowl", "u^2 + v^2", "euclid", 1, "min"),
    ("cap", "-(u^2 + v^2)", "euclid", 1, "max"),
    ("ellipt", "u^2 + 3*v^2", "euclid", 1, "min"),
    ("quartic_bowl", "u^4 + v^4", "euclid", 1, "min"),
    ("exp_bowl", "exp(u^2 + v^2)", "euclid", 1, "min"),
    ("cos_cap", "cos(u) + cos(v)", "euclid", 1, "max"),
    ("log_bowl", "log(1 + u^2 + v^2)", "euclid", 1, "min"),
    ("mixed_bowl", "u^2 + v^4", "euclid", 1, "min"),
    ("saddle", "u^2 - v^2", "euclid", -1, "neither"),
    ("uv", "u*v", "euclid", -1, "neither"),
    ("sin_saddle", "sin(u)*sin(v)", "euclid", -1, "neither"),
    ("cusp", "u^3 + v^2", "euclid", 0, "neither"),
    ("re_z3", re_zk_source(3), "euclid", -2, "neither"),
    ("im_z3", im_zk_source(3), "euclid", -2, "neither"),
    ("re_z4", re_zk_source(4), "euclid", -3, "neither"),
    ("neg_re_z5", f"-({re_zk_source(5)})", "euclid", -4, "neither"),
    ("re_z5", re_zk_source(5), "diagonal", -4, "neither"),
    ("bowl_conf", "u^2 + v^2", "conformal", 1, "min"),
    ("saddle_diag", "u^2 - v^2", "diagonal", -1, "neither"),
    ("re_z3_skew", f"{re_zk_source(3)} + (u^2 + v^2)^2", "skew", -2, "neither"),
]


def run_lemma3(seed: int = 0, radius: float = 0.3):
    patches = abstract_patches()
    rows = []
    for label, g, metric, expected, cls in LEMMA3_CASES:
        rep = lemma3_check(g, (0.0, 0.0), LoopSpec((0.0, 0.0), radius), patches[metric], label)
        rows.append({
            "case_id": f"lemma3:{label}",
            "function": g,
            "metric": metric,
            "index": str(rep.index),
            "index_num2": rep.index.twice_value,
            "extremum_class": rep.extremum_class,
            "consistent": rep.consistent,
            "holds": rep.consistent and rep.index == HalfIndex(2 * expected)
            and rep.extremum_class == cls,
        })
    return sorted(rows, key=lambda r: r["case_id"])


# --------------------------------------------------------------------------
# homotopy through invertible maps


def run_homotopy(seed: int = 0):
    rows = []
    tensors = [(s.label, SymTensorField.from_surface(s)) for s in negative_curvature_gallery()]
    tensors.append(("saddle", SymTensorField.from_surface(builtin("saddle"))))
    euclid = RiemannianPatch.euclidean()
    tensors.append(("const(1,-1)", SymTensorField.from_exprs(euclid, "1", "0", "-1")))
    tensors.append(("const(2,-1)", SymTensorField.from_exprs(euclid, "2", "0", "-1")))
    for name, A in tensors:
        for eta in (TestLineField.constant(A.patch), TestLineField.polar_power(A.patch, 1),
                    TestLineField.polar_power(A.patch, 2)):
            for r in (0.1, 0.3):
                rep = homotopy_invertibility(A, LoopSpec((0.0, 0.0), r), eta=eta)
                rows.append({
                    "case_id": f"homotopy:{name}:{eta.label}:r{r:g}",
                    "min_abs_entry": rep.min_abs_entry,
                    "jAeta_num2": rep.j_A_eta.twice_value,
                    "jBeta_num2": rep.j_B_eta.twice_value,
                    "holds": rep.holds,
                })
    return sorted(rows, key=lambda r: r["case_id"])


RUNNERS = {
    "thm1": run_thm1,
    "thm2": run_thm2,
    "eq8": run_eq8,
    "lemma3": run_lemma3,
    "homotopy": run_homotopy,
    "probe": run_probe,
}


def run_suite(name: str, seed: int = 0):
    if name == "all":
        rows = []
        for s in SUITES:
            rows += RUNNERS[s](seed)
        return rows
    return RUNNERS[name](seed)
