import math

import numpy as np
import pytest

from scfield.experiments import Collinear, column_argmax_offsets, pearson_above
from scfield.grid import GridSpec, WalkParams
from scfield.oracle import (CHUNK, WalkerConfig, simulate, simulate_completion_histogram,
                            simulate_sink_histogram, simulate_source_histogram)
from scfield.propagate import BoundaryMode
from scfield.scf import DegenerateFieldError, Keypoint, Role, sink_field, source_field

SRC, SNK = Role.SOURCE, Role.SINK


def test_deterministic_ray():
    spec = GridSpec(16, 8, 8)
    cfg = WalkerConfig(1, 7, WalkParams(0.0, 1e9, 30))
    h = simulate_source_histogram([Keypoint(2, 3, 0.0, role=SRC)], spec, cfg)
    expected = np.zeros(spec.shape)
    expected[0, 3, 2:] = 1.0
    np.testing.assert_array_equal(h.values, expected)


def test_histogram_nonnegative_and_finite():
    spec = GridSpec(12, 12, 8)
    cfg = WalkerConfig(5000, 1, WalkParams.default(spec))
    h = simulate_source_histogram([Keypoint(6, 6, 1.0, role=SRC)], spec, cfg)
    assert (h.values >= 0).all() and np.isfinite(h.values.sum())


def test_seed_determinism_and_thread_independence(monkeypatch):
    spec = GridSpec(10, 10, 8)
    kps = [Keypoint(2, 5, 0.0, role=SRC), Keypoint(8, 5, 0.0, role=SNK)]
    cfg = WalkerConfig(CHUNK + 5000, 42, WalkParams(0.5 * spec.dtheta, 10.0, 20))
    monkeypatch.setenv("SCF_THREADS", "1")
    a = simulate_completion_histogram(kps, spec, cfg).values
    b = simulate_completion_histogram(kps, spec, cfg).values
    monkeypatch.setenv("SCF_THREADS", "3")
    c = simulate_completion_histogram(kps, spec, cfg).values
    assert np.array_equal(a, b) and np.array_equal(a, c)
    other = WalkerConfig(CHUNK + 5000, 43, cfg.params)
    assert not np.array_equal(a, simulate_completion_histogram(kps, spec, other).values)


def test_survival_law():
    spec = GridSpec(8, 8, 8)
    tau, n = 6.0, 200_000
    cfg = WalkerConfig(n, 3, WalkParams(0.4, tau, 15))
    res = simulate([Keypoint(3, 3, 0.5, role=SRC)], spec, cfg, BoundaryMode.PERIODIC)
    for t, alive in enumerate(res.alive):
        p = math.exp(-t / tau)
        sd = math.sqrt(n * p * (1 - p))
        assert abs(alive - n * p) <= 4 * sd + 1e-9


def test_coincident_source_and_sink():
    spec = GridSpec(8, 8, 8)
    kps = [Keypoint(4, 4, 0.0, role=SRC), Keypoint(4, 4, 0.0, role=SNK)]
    res = simulate(kps, spec, WalkerConfig(1000, 0, WalkParams(0.0, 10.0, 5)),
                   sinks=[kps[1]])
    assert res.accepted == 1000
    expected = np.zeros(spec.shape)
    expected[0, 4, 4] = 1.0
    np.testing.assert_allclose(res.histogram.values, expected)


def test_collinear_deterministic_acceptance():
    spec = GridSpec(16, 8, 8)
    kps = [Keypoint(3, 4, 0.0, role=SRC), Keypoint(11, 4, 0.0, role=SNK)]
    cfg = WalkerConfig(4000, 5, WalkParams(0.0, 10.0, 20))
    res = simulate(kps, spec, cfg, sinks=[kps[1]])
    assert res.accepted == res.alive[8] > 0
    support = np.argwhere(res.histogram.values > 0)
    assert sorted(map(tuple, support)) == [(0, 4, x) for x in range(3, 12)]


def test_errors():
    spec = GridSpec(8, 8, 8)
    p = WalkParams(0.1, 5.0, 4)
    with pytest.raises(ValueError):
        WalkerConfig(0, 0, p)
    with pytest.raises(ValueError):
        WalkerConfig(1, 0, p, sink_radius=0)
    with pytest.raises(ValueError):
        simulate_source_histogram([Keypoint(1, 1, 0, role=SNK)], spec, WalkerConfig(10, 0, p))
    with pytest.raises(ValueError):
        simulate_sink_histogram([Keypoint(1, 1, 0, role=SRC)], spec, WalkerConfig(10, 0, p))
    with pytest.raises(ValueError):
        simulate_completion_histogram([Keypoint(1, 1, 0, role=SRC)], spec, WalkerConfig(10, 0, p))
    far = [Keypoint(1, 4, math.pi, role=SRC), Keypoint(6, 4, 0.0, role=SNK)]
    with pytest.raises(DegenerateFieldError):
        simulate_completion_histogram(far, spec, WalkerConfig(100, 0, WalkParams(0.0, 5.0, 4)))


# -- cross-checks against the propagated fields (10^6 walkers) ------------------------------

SPEC = GridSpec(32, 32, 36)
PARAMS = WalkParams.default(SPEC)
MILLION = WalkerConfig(10**6, 2024, PARAMS)


@pytest.mark.slow
def test_source_histogram_matches_source_field():
    kps = [Keypoint(8, 16, 0.0, role=SRC)]
    u = source_field(kps, SPEC, PARAMS).values
    h = simulate_source_histogram(kps, SPEC, MILLION).values
    assert pearson_above(u, h, u) >= 0.95


@pytest.mark.slow
def test_sink_histogram_matches_sink_field():
    kps = [Keypoint(24, 16, 0.0, role=SNK)]
    v = sink_field(kps, SPEC, PARAMS).values
    h = simulate_sink_histogram(kps, SPEC, MILLION).values
    assert pearson_above(v, h, v) >= 0.95


@pytest.mark.slow
def test_accepted_histogram_column_argmax_matches_field():
    setup = Collinear()
    c = setup.field().max_over_theta()
    h = simulate_completion_histogram(setup.keypoints(), setup.spec, MILLION).max_over_theta()
    cols = range(9, 24)
    field_rows = column_argmax_offsets(c, cols, 0)
    walker_rows = column_argmax_offsets(h, cols, 0)
    assert np.abs(field_rows - walker_rows).max() <= 1
