import numpy as np
import pytest

from umbilix.errors import DegenerateLoopError, PreconditionError, RankDeficiencyError
from umbilix.fieldindex import HalfIndex, LoopSpec, index_of_line_field, index_of_tensor
from umbilix.geomcore import traceless_field
from umbilix.suites import abstract_patches, field_menu, random_tensor, tensor_gallery
from umbilix.surfexpr import builtin
from umbilix.tensorlab import (
    RiemannianPatch,
    SymTensorField,
    TestLineField,
    apply_to_linefield,
    homotopy_entries,
    homotopy_invertibility,
    traceless_matrix,
    traceless_part,
    verify_index_formula,
)

EUCLID = RiemannianPatch.euclidean()
LOOP = LoopSpec((0.0, 0.0), 0.3)


def const(a11, a12, a22):
    return SymTensorField.from_exprs(EUCLID, str(a11), str(a12), str(a22))


def test_traceless_examples():
    np.testing.assert_array_equal(traceless_part(const(2, 0, 0))(0.1, 0.2), [1, 0])
    np.testing.assert_array_equal(traceless_part(const(1, 1, 1))(0.1, 0.2), [0, 1])
    np.testing.assert_array_equal(traceless_matrix(const(1, 1, 1), 0.0, 0.0), [[0, 1], [1, 0]])
    np.testing.assert_array_equal(traceless_part(const(3, 0, 3))(0.1, 0.2), [0, 0])


def test_scalar_tensor_rejected_on_loops():
    with pytest.raises(DegenerateLoopError):
        index_of_tensor(traceless_part(const(3, 0, 3)), LOOP)


def test_traceless_has_zero_trace(rng):
    A, _ = random_tensor(rng, EUCLID, "r")
    u, v = rng.uniform(-1, 1, (2, 100))
    np.testing.assert_allclose(np.trace(traceless_matrix(A, u, v), axis1=-2, axis2=-1), 0,
                               atol=1e-15)


def _angle_mod_pi(d):
    return np.mod(np.arctan2(d[..., 1], d[..., 0]), np.pi)


def _close_mod_pi(x, y, tol):
    diff = np.mod(x - y + np.pi / 2, np.pi) - np.pi / 2
    return np.max(np.abs(diff)) < tol


def test_eigenfield_fixed_by_B(rng):
    A, _ = random_tensor(rng, EUCLID, "r")
    xi = TestLineField.eigenfield(A)
    Bxi = apply_to_linefield(traceless_part(A), xi)
    u, v = rng.uniform(-1, 1, (2, 200))
    assert _close_mod_pi(_angle_mod_pi(Bxi.directions(u, v)), _angle_mod_pi(xi.directions(u, v)),
                         1e-12)


@pytest.mark.parametrize("psi", [0.0, 0.4, 1.3, 2.9, -2.0])
def test_constant_xi_rotation_rule(psi):
    A = SymTensorField.from_exprs(EUCLID, f"{float(np.cos(psi))!r}", f"{float(np.sin(psi))!r}",
                                  f"{float(-np.cos(psi))!r}")
    Bxi = apply_to_linefield(traceless_part(A), TestLineField.constant(EUCLID, 0.0))
    assert _close_mod_pi(_angle_mod_pi(Bxi.directions(0.2, 0.1)), np.mod(psi, np.pi), 1e-14)


@pytest.mark.parametrize("pname", sorted(abstract_patches()))
def test_closed_form_matches_matrix_product(pname, rng):
    patch = abstract_patches()[pname]
    A, _ = random_tensor(rng, patch, "r")
    u, v = rng.uniform(-0.9, 0.9, (2, 1000))
    for xi in field_menu(A):
        Bxi = apply_to_linefield(traceless_part(A), xi)
        BZ = np.einsum("...ij,...j->...i", traceless_matrix(A, u, v), xi.directions(u, v))
        assert _close_mod_pi(_angle_mod_pi(Bxi.directions(u, v)), _angle_mod_pi(BZ), 1e-10)


def test_apply_rejects_vanishing_B():
    Bxi = apply_to_linefield(traceless_part(const(1, 0, 1)), TestLineField.constant(EUCLID))
    with pytest.raises(DegenerateLoopError):
        Bxi.directions(0.0, 0.0)


def test_polar_power_index():
    for m in range(-3, 4):
        xi = TestLineField.polar_power(EUCLID, m)
        assert index_of_line_field(xi.directions, LOOP) == HalfIndex(m)


def test_eigenfield_formula_terms_equal_jA():
    A = SymTensorField.from_surface(builtin("monkey_saddle"))
    rep = verify_index_formula(A, TestLineField.eigenfield(A), LOOP)
    assert rep.holds
    assert rep.jA == rep.jBxi == rep.jxi == HalfIndex(-1)


def test_monkey_constant_xi():
    A = SymTensorField.from_surface(builtin("monkey_saddle"))
    rep = verify_index_formula(A, TestLineField.constant(A.patch), LOOP)
    assert (rep.jA, rep.jxi, rep.jBxi) == (HalfIndex(-1), HalfIndex(0), HalfIndex(-2))
    assert rep.holds


def test_linear_tensor_polar_two():
    A = SymTensorField.from_exprs(EUCLID, "u", "v", "-u")
    rep = verify_index_formula(A, TestLineField.polar_power(EUCLID, 2), LOOP)
    assert (rep.jA, rep.jxi, rep.jBxi) == (HalfIndex(1), HalfIndex(2), HalfIndex(0))
    assert rep.holds


@pytest.mark.parametrize("spec", tensor_gallery(), ids=lambda s: s.label)
def test_formula_on_gallery(spec):
    A = SymTensorField.from_surface(spec)
    for xi in field_menu(A):
        for r in (0.1, 0.3):
            assert verify_index_formula(A, xi, LoopSpec((0.0, 0.0), r)).holds


@pytest.mark.parametrize("spec", tensor_gallery(), ids=lambda s: s.label)
def test_tensor_index_equals_eigenfield_index(spec):
    A = SymTensorField.from_surface(spec)
    j_line = index_of_line_field(TestLineField.eigenfield(A).directions, LOOP)
    assert index_of_tensor(traceless_field(spec), LOOP) == j_line


@pytest.mark.parametrize("c", [0.01, 0.5, 3.0, 1e4])
def test_scaling_invariance(c):
    A = SymTensorField.from_surface(builtin("re_zk", [5]))
    xi = TestLineField.polar_power(A.patch, 1)
    base = verify_index_formula(A, xi, LOOP)
    scaled = verify_index_formula(A.scaled(c), xi, LOOP)
    assert (scaled.jA, scaled.jBxi) == (base.jA, base.jBxi)


def test_random_tensor_expected_indices():
    rng = np.random.default_rng(7)
    for pname, patch in sorted(abstract_patches().items()):
        for _ in range(4):
            A, expected = random_tensor(rng, patch, "r")
            assert index_of_tensor(traceless_part(A), LOOP) == expected


def test_metric_must_be_positive_definite():
    bad = RiemannianPatch.from_sources("1", "2", "1")
    with pytest.raises(RankDeficiencyError):
        bad.frame_map(0.0, 0.0)


def test_frame_map_reproduces_metric(rng):
    patch = abstract_patches()["skew"]
    u, v = rng.uniform(-1, 1, (2, 100))
    P = patch.frame_map(u, v)
    g11, g12, g22 = patch.metric(u, v)
    PtP = np.swapaxes(P, -1, -2) @ P
    np.testing.assert_allclose(PtP[..., 0, 0], g11, rtol=1e-14)
    np.testing.assert_allclose(PtP[..., 0, 1], g12, rtol=1e-14, atol=1e-15)
    np.testing.assert_allclose(PtP[..., 1, 1], g22, rtol=1e-14)


# ---------------------------------------------------------------- homotopy


def test_homotopy_entries_examples():
    for t in np.linspace(0, 1, 11):
        assert homotopy_entries(1.0, -1.0, t) == (1.0, -1.0)
    assert homotopy_entries(2.0, -1.0, 1.0) == (1.5, -1.5)


def test_homotopy_constant_tensor():
    rep = homotopy_invertibility(const(2, 0, -1), LOOP)
    assert rep.min_abs_entry == pytest.approx(1.0) and rep.holds


def test_homotopy_precondition():
    with pytest.raises(PreconditionError):
        homotopy_invertibility(const(1, 0, 1), LOOP)
    with pytest.raises(PreconditionError):
        homotopy_invertibility(SymTensorField.from_surface(builtin("paraboloid")), LOOP)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_homotopy_preserves_index_monkey(m):
    A = SymTensorField.from_surface(builtin("monkey_saddle"))
    rep = homotopy_invertibility(A, LOOP, eta=TestLineField.polar_power(A.patch, m))
    assert rep.invertible and rep.holds
    assert rep.j_A_eta == HalfIndex(-2 - m)
