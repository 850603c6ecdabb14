import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scfield.grid import (Field3D, GridSpec, StabilityError, WalkParams, delta_field, state_coords,
                          state_index, total_mass, trig_tables)

specs = st.builds(GridSpec, st.integers(2, 9), st.integers(2, 9), st.integers(4, 12))


def test_state_index_examples():
    spec = GridSpec(4, 4, 8)
    assert state_index(spec, 0, 0, 0) == 0
    assert state_index(spec, 0, 0, 8) == 0
    assert state_index(spec, 3, 3, 7) == 127


def test_state_index_enumerates_all_states():
    spec = GridSpec(4, 4, 8)
    seen = {state_index(spec, x, y, t) for t in range(8) for y in range(4) for x in range(4)}
    assert seen == set(range(128))


@pytest.mark.invariant
def test_state_index_matches_array_layout():
    spec = GridSpec(5, 3, 4)
    f = delta_field(spec, 4, 1, 2)
    assert f.flat()[state_index(spec, 4, 1, 2)] == 1.0


@pytest.mark.invariant
def test_spatial_axes_do_not_wrap():
    spec = GridSpec(4, 4, 8)
    with pytest.raises(IndexError):
        state_index(spec, 4, 0, 0)
    with pytest.raises(IndexError):
        state_index(spec, 0, -1, 0)


@pytest.mark.invariant
@given(specs, st.data())
def test_state_index_round_trip(spec, data):
    xi = data.draw(st.integers(0, spec.width_cells - 1))
    yi = data.draw(st.integers(0, spec.height_cells - 1))
    ti = data.draw(st.integers(-3 * spec.theta_cells, 3 * spec.theta_cells))
    idx = state_index(spec, xi, yi, ti)
    assert state_coords(spec, idx) == (xi, yi, ti % spec.theta_cells)
    assert state_index(spec, *state_coords(spec, idx)) == idx


@pytest.mark.invariant
@given(specs)
def test_state_index_injective(spec):
    idx = [state_index(spec, x, y, t) for t in range(spec.theta_cells)
           for y in range(spec.height_cells) for x in range(spec.width_cells)]
    assert sorted(idx) == list(range(spec.size))


def test_total_mass_examples():
    spec = GridSpec(4, 4, 8)
    assert total_mass(Field3D.zeros(spec)) == 0
    assert total_mass(delta_field(spec, 1, 2, 3)) == 1
    two = delta_field(spec, 0, 0, 0, 0.25) + delta_field(spec, 3, 3, 7, 0.75)
    assert total_mass(two) == 1.0


@pytest.mark.invariant
@given(st.floats(0, 10), st.floats(0, 10), st.integers(0, 2**31))
def test_total_mass_linear(a, b, seed):
    spec = GridSpec(5, 4, 8)
    r = np.random.default_rng(seed)
    f = Field3D(spec, r.random(spec.shape))
    g = Field3D(spec, r.random(spec.shape))
    lhs = total_mass(a * f + b * g)
    rhs = a * total_mass(f) + b * total_mass(g)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(1, 4, 8)
    with pytest.raises(ValueError):
        GridSpec(4, 4, 3)
    assert GridSpec.parse("64x32x36") == GridSpec(64, 32, 36)
    with pytest.raises(ValueError):
        GridSpec.parse("64x32")


@given(st.integers(4, 400))
def test_dtheta_derived(n):
    spec = GridSpec(2, 2, n)
    assert spec.dtheta * n == pytest.approx(2 * math.pi, rel=1e-15)
    assert spec.dx == spec.dy == 1.0


@pytest.mark.invariant
def test_theta_bin_nearest_and_wrapping():
    spec = GridSpec(4, 4, 16)
    assert spec.theta_bin(0.0) == 0
    assert spec.theta_bin(math.pi) == 8
    assert spec.theta_bin(2 * math.pi - 1e-9) == 0
    assert spec.theta_bin(0.51 * spec.dtheta) == 1
    assert spec.theta_bin(0.49 * spec.dtheta) == 0


@given(st.integers(1, 30).map(lambda k: 4 * k))
def test_trig_tables_symmetries(n):
    cos, sin = trig_tables(n)
    k = np.arange(n)
    # quarter turn permutes (cos, sin) -> (-sin, cos) exactly
    q = (k + n // 4) % n
    assert np.array_equal(cos[q], -sin[k])
    assert np.array_equal(sin[q], cos[k])
    # reflection theta -> pi - theta
    r = (n // 2 - k) % n
    assert np.array_equal(cos[r], -cos[k])
    assert np.array_equal(sin[r], sin[k])
    np.testing.assert_allclose(cos, np.cos(2 * np.pi * k / n), atol=1e-15)
    np.testing.assert_allclose(sin, np.sin(2 * np.pi * k / n), atol=1e-15)


def test_walk_params_defaults_and_stability():
    spec = GridSpec(30, 40, 36)
    p = WalkParams.default(spec)
    assert p.sigma == pytest.approx(0.7 * spec.dtheta)
    assert p.lam(spec) == pytest.approx(0.245)
    assert p.tau == pytest.approx(25.0)
    assert p.t_max == 140
    with pytest.raises(StabilityError):
        WalkParams(1.01 * spec.dtheta, 10, 5).check_stable(spec)
    WalkParams(spec.dtheta, 10, 5).check_stable(spec)  # lambda = 1/2 is allowed
    with pytest.raises(ValueError):
        WalkParams(0.1, 0.0, 5)
    with pytest.raises(ValueError):
        WalkParams(-0.1, 1.0, 5)


def test_field_shape_checked():
    with pytest.raises(ValueError):
        Field3D(GridSpec(4, 4, 8), np.zeros((8, 4, 5)))


def test_flip_theta_needs_even_bins():
    with pytest.raises(ValueError):
        Field3D.zeros(GridSpec(4, 4, 9)).flip_theta()
    f = delta_field(GridSpec(4, 4, 8), 1, 1, 1).flip_theta()
    assert f.values[5, 1, 1] == 1.0
