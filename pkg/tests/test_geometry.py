import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsp.errors import InvalidParameterError, InvalidShapeError
from qsp.geometry import (
    BodyVolume,
    ConvexShape,
    Pose2,
    collide,
    contains_sampled,
    inflate,
    inscribed_disc,
    wrap_angle,
)

B = ConvexShape.box
UNIT = B(0, 0, 1, 1)


def test_pose_normalizes_angle_half_open():
    assert Pose2(0, 0, math.pi).theta == pytest.approx(-math.pi)
    assert -math.pi <= Pose2(0, 0, 7.0).theta < math.pi
    assert wrap_angle(2 * math.pi + 0.25) == pytest.approx(0.25)


def test_pose_compose_and_apply_agree():
    a, b = Pose2(1, 2, 0.3), Pose2(-0.5, 0.7, 1.1)
    p = np.array([0.2, -0.4])
    np.testing.assert_allclose(a.compose(b).apply(p), a.apply(b.apply(p)), atol=1e-12)


@pytest.mark.parametrize(
    "vertices, message",
    [
        ([(0, 0), (1, 0)], "degenerate"),
        ([(0, 0), (1, 1), (2, 2)], "degenerate"),
        ([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)], "convex"),
    ],
)
def test_invalid_polygons(vertices, message):
    with pytest.raises(InvalidShapeError, match=message):
        ConvexShape.polygon(vertices)


def test_clockwise_polygon_is_reoriented():
    cw = ConvexShape.polygon([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.area == pytest.approx(1.0)


def test_disc_needs_positive_radius():
    with pytest.raises(InvalidShapeError):
        ConvexShape.disc((0, 0), 0.0)


# -- collide ----------------------------------------------------------------------


def test_identical_squares_collide():
    assert collide(UNIT, UNIT)


def test_far_disc_does_not_collide():
    assert not collide(UNIT, ConvexShape.disc((10, 10), 0.1))


def test_tangent_disc_counts_as_collision():
    assert collide(UNIT, ConvexShape.disc((1.5, 0.5), 0.5))
    assert not collide(UNIT, ConvexShape.disc((1.5 + 1e-9, 0.5), 0.5))


def test_touching_squares_collide():
    assert collide(UNIT, B(1, 0, 2, 1))
    assert not collide(UNIT, B(1 + 1e-9, 0, 2, 1))


def test_rotated_square_collision():
    # Unit square rotated 45 degrees about the origin reaches x = -sqrt(2)/2.
    diamond_pose = Pose2(0, 0, math.pi / 4)
    probe = B(-0.70, 0.69, -0.60, 0.75)
    assert collide(UNIT, probe, diamond_pose)
    assert not collide(UNIT, B(-2, -2, -1.5, -1.5), diamond_pose)


def _random_shape(draw):
    if draw(st.booleans()):
        c = (draw(st.floats(-2, 2)), draw(st.floats(-2, 2)))
        return ConvexShape.disc(c, draw(st.floats(0.05, 1.0)))
    n = draw(st.integers(3, 7))
    cx, cy = draw(st.floats(-2, 2)), draw(st.floats(-2, 2))
    angles = sorted(draw(st.lists(st.floats(0, 2 * math.pi), min_size=n, max_size=n, unique=True)))
    r = draw(st.floats(0.1, 1.0))
    pts = [(cx + r * math.cos(a), cy + r * math.sin(a)) for a in angles]
    try:
        return ConvexShape.polygon(pts)
    except InvalidShapeError:
        return B(cx, cy, cx + r, cy + r)


shapes = st.composite(_random_shape)
poses = st.builds(Pose2, st.floats(-2, 2), st.floats(-2, 2), st.floats(-math.pi, math.pi))


@settings(max_examples=300, deadline=None)
@given(shapes(), shapes(), poses, poses)
def test_collide_is_symmetric(a, b, pa, pb):
    assert collide(a, b, pa, pb) == collide(b, a, pb, pa)


def test_collide_agrees_with_point_sampling_oracle():
    """No false negatives: if sampled points of one shape lie in the other, collide is true."""
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(1000):
        shape_a = _rng_shape(rng)
        shape_b = _rng_shape(rng)
        pose = Pose2(*rng.uniform(-1, 1, 2), rng.uniform(-math.pi, math.pi))
        world_a = shape_a.transformed(pose)
        pts = world_a.sample_points(200, rng)
        overlap = shape_b.contains_points(pts, tol=0.0).any()
        if overlap:
            assert collide(shape_a, shape_b, pose)
            checked += 1
        elif not collide(shape_a, shape_b, pose):
            # separated: the boundary of b is also point-free of a
            assert not world_a.contains_points(shape_b.sample_points(200, rng), tol=-1e-9).any()
    assert checked > 100


def _rng_shape(rng):
    if rng.random() < 0.4:
        return ConvexShape.disc(rng.uniform(-1, 1, 2), rng.uniform(0.05, 0.8))
    n = int(rng.integers(3, 8))
    angles = np.sort(rng.uniform(0, 2 * math.pi, n))
    r = rng.uniform(0.1, 0.9)
    c = rng.uniform(-1, 1, 2)
    pts = c + r * np.column_stack([np.cos(angles), np.sin(angles)])
    try:
        return ConvexShape.polygon(pts)
    except InvalidShapeError:
        return B(c[0], c[1], c[0] + r, c[1] + r)


# -- containment --------------------------------------------------------------------


def test_contains_sampled_strict_subset():
    inner = BodyVolume.of([ConvexShape.disc((0.5, 0.5), 0.4)])
    outer = BodyVolume.of([UNIT])
    assert contains_sampled(inner, outer, 1000, np.random.default_rng(0)) is None


def test_contains_sampled_finds_counterexample():
    inner = BodyVolume.of([ConvexShape.disc((0.5, 0.5), 2.0)])
    outer = BodyVolume.of([UNIT])
    witness = contains_sampled(inner, outer, 1000, np.random.default_rng(0))
    assert witness is not None
    assert not UNIT.contains_points(witness[None, :])[0]


def test_contains_sampled_identity():
    body = BodyVolume.of([UNIT, ConvexShape.disc((1, 1), 0.3)], Pose2(2, 1, 0.4))
    for n in (1, 10, 500):
        assert contains_sampled(body, body, n, np.random.default_rng(n)) is None


def test_contains_sampled_rejects_bad_input():
    body = BodyVolume.of([UNIT])
    with pytest.raises(InvalidParameterError):
        contains_sampled(body, body, 0, np.random.default_rng(0))
    with pytest.raises(InvalidShapeError):
        contains_sampled(BodyVolume(()), body, 5, np.random.default_rng(0))


def test_union_sampling_is_uniform_over_overlaps():
    # Two unit squares overlapping in half their area: the union has area 1.5,
    # the overlap 0.5, so a third of the points should fall in the overlap.
    body = BodyVolume.of([B(0, 0, 1, 1), B(0.5, 0, 1.5, 1)])
    pts = body.sample_points(30000, np.random.default_rng(3))
    frac = np.mean((pts[:, 0] >= 0.5) & (pts[:, 0] <= 1.0))
    assert frac == pytest.approx(1 / 3, abs=0.01)


# -- inscribed disc -----------------------------------------------------------------


def test_inscribed_disc_unit_square():
    d = inscribed_disc(UNIT)
    assert d.radius == pytest.approx(0.5)
    np.testing.assert_allclose(d.center, (0.5, 0.5), atol=1e-9)


def test_inscribed_disc_rectangle():
    d = inscribed_disc(B(0, 0, 2, 1))
    assert d.radius == pytest.approx(0.5)
    assert d.center[1] == pytest.approx(0.5)
    assert 0.5 - 1e-9 <= d.center[0] <= 1.5 + 1e-9


def _grid_chebyshev(polygon, n=801):
    """Independent oracle: maximise distance-to-boundary over a dense grid."""
    x0, y0, x1, y1 = polygon.aabb
    xs, ys = np.meshgrid(np.linspace(x0, x1, n), np.linspace(y0, y1, n))
    pts = np.column_stack([xs.ravel(), ys.ravel()])
    inside = polygon.contains_points(pts, tol=0.0)
    v = polygon.points
    e = np.roll(v, -1, axis=0) - v
    d = np.full(len(pts), np.inf)
    for vi, ei in zip(v, e):
        t = np.clip(((pts - vi) @ ei) / (ei @ ei), 0, 1)
        d = np.minimum(d, np.hypot(*(pts - vi - t[:, None] * ei).T))
    d[~inside] = 0
    return d.max()


def test_inscribed_disc_right_triangle_matches_grid_oracle():
    tri = ConvexShape.polygon([(0, 0), (1, 0), (0, 1)])
    d = inscribed_disc(tri)
    assert d.radius == pytest.approx((2 - math.sqrt(2)) / 2, abs=1e-9)
    assert d.radius == pytest.approx(_grid_chebyshev(tri), abs=2e-3)


def test_inscribed_disc_properties():
    rng = np.random.default_rng(11)
    for _ in range(25):
        shape = _rng_shape(rng)
        if shape.is_disc:
            continue
        d = inscribed_disc(shape)
        assert contains_sampled(BodyVolume.of([d]), BodyVolume.of([shape]), 500, rng) is None
        # Grown by 1e-3 the disc pokes outside the polygon.
        grown = ConvexShape.disc(d.center, d.radius * (1 + 1e-3))
        boundary = grown.center + grown.radius * np.column_stack(
            [np.cos(np.linspace(0, 2 * math.pi, 4000)), np.sin(np.linspace(0, 2 * math.pi, 4000))]
        )
        assert not shape.contains_points(boundary, tol=0.0).all()


# -- inflate ------------------------------------------------------------------------


def test_inflate_disc():
    assert inflate(ConvexShape.disc((1, 2), 0.5), 1.2).radius == pytest.approx(0.6)


def test_inflate_identity_and_square():
    assert inflate(UNIT, 1.0).points.tolist() == UNIT.points.tolist()
    big = inflate(UNIT, 2.0)
    assert big.area == pytest.approx(4.0)
    np.testing.assert_allclose(big.centroid, UNIT.centroid, atol=1e-12)


def test_inflate_rejects_nonpositive():
    with pytest.raises(InvalidParameterError):
        inflate(UNIT, 0.0)


@settings(max_examples=100, deadline=None)
@given(shapes(), st.floats(0.2, 3.0), st.floats(0.2, 3.0))
def test_inflate_composes(shape, a, b):
    twice = inflate(inflate(shape, a), b)
    once = inflate(shape, a * b)
    if shape.is_disc:
        assert twice.radius == pytest.approx(once.radius, abs=1e-9)
    else:
        np.testing.assert_allclose(twice.points, once.points, atol=1e-9)
