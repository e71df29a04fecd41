import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from umbilix.errors import DegenerateLoopError, NonConvergenceError
from umbilix.fieldindex import (
    HalfIndex,
    LoopSpec,
    angle_track,
    index_of_line_field,
    index_of_line_field_angles,
    index_of_tensor,
    refine_until_stable,
    winding_of_vector_field,
)
from umbilix.geomcore import traceless_field
from umbilix.surfexpr import builtin

UNIT = LoopSpec((0.0, 0.0), 1.0)


def vec(fn):
    return lambda u, v: np.stack(np.broadcast_arrays(*fn(np.asarray(u), np.asarray(v))), -1)


def test_identity_field():
    assert winding_of_vector_field(vec(lambda u, v: (u, v)), UNIT) == HalfIndex(2)


def test_radial_lines():
    assert index_of_line_field(vec(lambda u, v: (u, v)), UNIT) == HalfIndex(2)


def test_half_angle_field():
    idx = index_of_line_field_angles(lambda u, v: np.arctan2(v, u) / 2, UNIT)
    assert idx == HalfIndex.from_value(0.5)
    assert str(idx) == "1/2"


@pytest.mark.parametrize("m", [-5, -3, -1, 0, 2, 3, 7])
def test_polar_lines(m):
    idx = index_of_line_field_angles(lambda u, v: m * np.arctan2(v, u) / 2, UNIT)
    assert idx == HalfIndex(m)


def test_half_index_arithmetic_and_str():
    a, b = HalfIndex.from_value(-1.5), HalfIndex(1)
    assert str(a) == "-3/2" and str(HalfIndex(-4)) == "-2" and str(HalfIndex(0)) == "0"
    assert a + b == HalfIndex(-2) and a - b == HalfIndex(-4) and -a == HalfIndex(3)
    assert 2 * b == HalfIndex(2) and HalfIndex(2).is_integer and not b.is_integer
    assert a < b and float(a) == -1.5
    with pytest.raises(ValueError):
        HalfIndex.from_value(0.25)


def test_loop_validation():
    for bad in [dict(radius=0), dict(radius=1, samples=100), dict(radius=1, samples=128),
                dict(radius=1, orientation=0)]:
        with pytest.raises(ValueError):
            LoopSpec((0, 0), **bad)


@pytest.mark.parametrize("k", [0, 1, 3, -2])
def test_orientation_reversal_negates(k):
    field = vec(lambda u, v: (np.cos(k * np.arctan2(v, u)), np.sin(k * np.arctan2(v, u))))
    loop = LoopSpec((0.0, 0.0), 0.5)
    assert winding_of_vector_field(field, loop.reversed()) == -winding_of_vector_field(field, loop)


def test_orientation_reversal_monkey():
    B = traceless_field(builtin("monkey_saddle"))
    loop = LoopSpec((0.0, 0.0), 0.3)
    assert index_of_tensor(B, loop) == HalfIndex(-1)
    assert index_of_tensor(B, loop.reversed()) == HalfIndex(1)


@pytest.mark.parametrize("radius", [0.05, 0.2, 0.5, 0.89])
def test_radius_independence(radius):
    B = traceless_field(builtin("re_zk", [5]))
    assert index_of_tensor(B, LoopSpec((0.0, 0.0), radius)) == HalfIndex(-3)


def test_loop_without_singularity_is_zero():
    B = traceless_field(builtin("monkey_saddle"))
    assert index_of_tensor(B, LoopSpec((0.5, 0.4), 0.2)) == HalfIndex(0)


def test_through_singularity_is_degenerate():
    B = traceless_field(builtin("monkey_saddle"))
    with pytest.raises(DegenerateLoopError):
        index_of_tensor(B, LoopSpec((0.3, 0.0), 0.3))


def test_zero_field_is_degenerate():
    with pytest.raises(DegenerateLoopError):
        winding_of_vector_field(vec(lambda u, v: (0 * u, 0 * v)), UNIT)


def test_non_convergence_on_fast_rotation():
    def field(u, v):
        # chirp with a jump across the branch cut: no resolution can follow it
        phi = np.mod(np.arctan2(v, u), 2 * np.pi)
        t = 1e6 * phi**2
        return np.stack([np.cos(t), np.sin(t)], -1)

    with pytest.raises(NonConvergenceError) as err:
        winding_of_vector_field(field, UNIT)
    assert err.value.largest_step > 0


def test_refinement_reports_resolution():
    field = vec(lambda u, v: (u, v))
    assert refine_until_stable(field, UNIT) == (HalfIndex(2), 256)

    def faster(u, v):
        t = 300 * np.arctan2(v, u)
        return np.stack([np.cos(t), np.sin(t)], -1)

    # N=256 gives a valid but aliased track (44 turns), 512 and 1024 exceed
    # the step bound, 2048 and 4096 agree on 300
    idx, n = refine_until_stable(faster, UNIT)
    assert idx == HalfIndex(600) and n == 2048


def test_angle_track_unwraps():
    t = np.linspace(0, 4 * np.pi, 64, endpoint=False)
    tr = angle_track(np.stack([np.cos(t), np.sin(t)], -1))
    assert tr.valid and tr.total == pytest.approx(4 * np.pi)


@given(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6), st.floats(0.05, 0.35))
def test_line_vs_tensor_doubling(u0, v0, r):
    """Line-field route on the major direction agrees with the tensor route."""
    d = np.hypot(u0, v0)
    if abs(d - r) < 0.15 * r + 0.02:
        # keep the loop clear of the umbilic
        return
    spec = builtin("monkey_saddle")
    from umbilix.geomcore import geometry

    loop = LoopSpec((u0, v0), r)
    jt = index_of_tensor(traceless_field(spec), loop)
    jl = index_of_line_field(lambda u, v: geometry(spec, u, v)[2].major_direction(), loop)
    assert jt == jl
    assert jt == (HalfIndex(-1) if d < r else HalfIndex(0))


def test_doubling_consistency_100_loops(rng):
    spec = builtin("re_zk", [4])
    from umbilix.geomcore import geometry

    checked = 0
    while checked < 100:
        u0, v0 = rng.uniform(-0.5, 0.5, 2)
        r = rng.uniform(0.05, 0.45)
        d = np.hypot(u0, v0)
        if abs(d - r) < 0.15:
            continue
        loop = LoopSpec((u0, v0), r)
        jt = index_of_tensor(traceless_field(spec), loop)
        jl = index_of_line_field(lambda u, v: geometry(spec, u, v)[2].major_direction(), loop)
        assert jt == jl == (HalfIndex(-2) if d < r else HalfIndex(0))
        checked += 1
