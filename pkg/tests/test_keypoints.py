import math

import numpy as np
import pytest
from hypothesis import example, assume, given, strategies as st

from scfield.keypoints import (ContourFragment, _m_neighbours, _on_pixels, end_tangent,
                               endpoint_keypoints, fragment_keypoints, mask_keypoints,
                               trace_contours)
from scfield.raster import circle_pixels, draw_circle, draw_polyline


def angle_diff(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


def hline(n=10, shape=(5, 16), y=2, x0=3):
    m = np.zeros(shape, dtype=bool)
    m[y, x0:x0 + n] = True
    return m


# -- tracing ------------------------------------------------------------------------------

def test_empty_map():
    assert trace_contours(np.zeros((6, 6), bool)) == []


def test_single_run():
    frags = trace_contours(hline())
    assert len(frags) == 1 and len(frags[0]) == 10 and not frags[0].closed
    assert frags[0].pixels == [(x, 2) for x in range(3, 13)]


def test_plus_sign_splits_into_four():
    m = np.zeros((11, 11), bool)
    m[5, 1:10] = True
    m[1:10, 5] = True
    frags = trace_contours(m)
    assert len(frags) == 4
    assert sum(len(f) for f in frags) == 17
    assert sum((5, 5) in f.pixels for f in frags) == 1


def test_closed_circle():
    m = np.zeros((30, 30), bool)
    draw_circle(m, 15, 15, 10)
    frags = trace_contours(m)
    assert len(frags) == 1 and frags[0].closed and len(frags[0]) == m.sum()
    assert endpoint_keypoints(frags[0]) == []


def test_square_corner_is_not_a_junction():
    m = np.zeros((10, 10), bool)
    draw_polyline(m, [(1, 1), (7, 1), (7, 7)])
    assert len(trace_contours(m)) == 1


# -- tangents -----------------------------------------------------------------------------

def test_horizontal_run_keypoints():
    frag = trace_contours(hline())[0]
    left, right = endpoint_keypoints(frag)
    assert (left.x, left.y) == (3, 2) and left.theta == pytest.approx(math.pi)
    assert (right.x, right.y) == (12, 2) and angle_diff(right.theta, 0.0) < 1e-12


def test_diagonal_run_keypoints():
    frag = ContourFragment([(k, k) for k in range(8)])
    first, last = endpoint_keypoints(frag)
    assert first.theta == pytest.approx(5 * math.pi / 4, abs=1e-6)
    assert last.theta == pytest.approx(math.pi / 4, abs=1e-6)


def test_quarter_arc_tangents():
    cx = cy = 25
    r = 20
    quarter = [p for p in circle_pixels(cx, cy, r) if p[0] >= cx and p[1] >= cy]
    frag = ContourFragment(quarter)
    for kp in endpoint_keypoints(frag, 5):
        phi = math.atan2(kp.y - cy, kp.x - cx)
        tangent = phi + math.pi / 2  # direction of increasing phi
        # away from the arc body means decreasing phi at the phi=0 end
        expected = tangent + math.pi if phi < math.pi / 4 else tangent
        assert math.degrees(angle_diff(kp.theta, expected)) <= 6.0


def test_degenerate_and_short_fragments():
    with pytest.raises(ValueError):
        end_tangent(np.array([[1.0, 1.0], [1.0, 1.0]]))
    with pytest.raises(ValueError):
        endpoint_keypoints(ContourFragment([(1, 1)]))
    with pytest.raises(ValueError):
        endpoint_keypoints(ContourFragment([(1, 1), (2, 1)]), fit_window=1)


def test_fragment_keypoints_partners_and_min_length():
    m = hline(10, (12, 20))
    m[8, 2:5] = True
    kps, partners = fragment_keypoints(trace_contours(m), min_length=4)
    assert len(kps) == 2 and partners == [(0, 1)]
    kps, partners = fragment_keypoints(trace_contours(m))
    assert len(kps) == 4 and partners == [(0, 1), (2, 3)]


# -- mask keypoints -----------------------------------------------------------------------

def test_mask_covering_nothing():
    m = hline(20, (32, 32), 16, 4)
    assert len(mask_keypoints(m, np.zeros_like(m))) == 0


def test_line_through_square_mask():
    edges = hline(32, (32, 32), 16, 0)
    mask = np.zeros_like(edges)
    mask[12:20, 12:20] = True
    kps = sorted(mask_keypoints(edges, mask), key=lambda k: k.x)
    assert [(k.x, k.y) for k in kps] == [(11, 16), (20, 16)]
    assert angle_diff(kps[0].theta, 0.0) < 1e-12
    assert kps[1].theta == pytest.approx(math.pi)


def circle_mask_errors(half):
    """Tangent errors (degrees) where a circle of radius 20 enters a square
    mask of side 2 * half + 1 centred on its rightmost point."""
    cx = cy = 32
    edges = np.zeros((64, 64), bool)
    draw_circle(edges, cx, cy, 20)
    mask = np.zeros_like(edges)
    mask[cy - half:cy + half + 1, 52 - half:52 + half + 1] = True
    kps = mask_keypoints(edges, mask)
    errs = []
    for kp in kps:
        phi = math.atan2(kp.y - cy, kp.x - cx)
        t = np.array([-math.sin(phi), math.cos(phi)])
        if t @ (np.array([52.0, 32.0]) - [kp.x, kp.y]) < 0:
            t = -t
        errs.append(math.degrees(angle_diff(kp.theta, math.atan2(t[1], t[0]))))
    return errs


def test_circle_crossing_square_mask():
    errs = circle_mask_errors(12)
    assert len(errs) == 2
    assert max(errs) <= 6.0


def test_tangent_error_bounded_over_mask_sizes():
    # a 5-pixel staircase quantizes slope, so the error varies with where the
    # circle crosses the mask; it stays near one 10-degree orientation bin
    for half in range(2, 12):
        errs = circle_mask_errors(half)
        assert len(errs) == 2 and max(errs) <= 12.5


def test_mask_shape_mismatch():
    with pytest.raises(ValueError):
        mask_keypoints(np.zeros((4, 4), bool), np.zeros((4, 5), bool))


# -- properties ---------------------------------------------------------------------------

SIZE = 24
vertex = st.tuples(st.integers(0, SIZE - 1), st.integers(0, SIZE - 1))
polylines = st.lists(st.lists(vertex, min_size=2, max_size=4), min_size=1, max_size=3)


def draw(lines):
    m = np.zeros((SIZE, SIZE), bool)
    for pts in lines:
        draw_polyline(m, pts)
    return m


def junction_free(m):
    on = _on_pixels(m)
    return all(len(_m_neighbours(p, on)) <= 2 for p in on)


@pytest.mark.invariant
@given(polylines)
def test_partition(lines):
    m = draw(lines)
    frags = trace_contours(m)
    pixels = [p for f in frags for p in f.pixels]
    assert len(pixels) == m.sum() == len(set(pixels))
    assert {(x, y) for x, y in pixels} == _on_pixels(m)
    for f in frags:
        for (ax, ay), (bx, by) in zip(f.pixels, f.pixels[1:]):
            assert max(abs(ax - bx), abs(ay - by)) == 1


@pytest.mark.invariant
@given(polylines)
@example([[(0, 22), (6, 20), (2, 20)]])  # hooked end: the window centroid sits beside the end
def test_orientation_convention(lines):
    for frag in trace_contours(draw(lines)):
        if frag.closed or len(frag) < 2:
            continue
        kps = endpoint_keypoints(frag)
        for kp, prev in zip(kps, (frag.pixels[1], frag.pixels[-2])):
            p = np.array([kp.x, kp.y])
            q = np.array(prev, float)
            u = np.array([math.cos(kp.theta), math.sin(kp.theta)])
            assert np.linalg.norm(p + u - q) > np.linalg.norm(p - q)


def keypoint_rows(kps):
    return sorted((round(k.x), round(k.y), round(math.cos(k.theta), 9), round(math.sin(k.theta), 9))
                  for k in kps)


@pytest.mark.invariant
@given(polylines)
def test_rotation_consistency(lines):
    m = draw(lines)
    assume(junction_free(m))
    kps, _ = fragment_keypoints(trace_contours(m))
    # np.rot90 with k=-1 maps pixel (x, y) to (H - 1 - y, x): a quarter turn by +pi/2
    rot, _ = fragment_keypoints(trace_contours(np.rot90(m, k=-1)))
    expected = [(SIZE - 1 - k.y, k.x, k.theta + math.pi / 2) for k in kps]
    got = keypoint_rows(rot)
    want = sorted((round(x), round(y), round(math.cos(t), 9), round(math.sin(t), 9))
                  for x, y, t in expected)
    assert len(got) == len(want)
    for g, w in zip(got, want):
        assert g[:2] == w[:2]
        assert g[2] == pytest.approx(w[2], abs=2e-9) and g[3] == pytest.approx(w[3], abs=2e-9)
