"""Planar convex geometry: poses, convex shapes, collision, containment.

Collision is exact for convex shapes: separating axes for polygon pairs and
closest-point distance whenever a disc is involved. Touching shapes count as
colliding.  The batched kernels in this module evaluate one moving shape at
many poses against one fixed world-frame shape; they carry the planners'
collision checking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog

from .errors import InvalidParameterError, InvalidShapeError

TWO_PI = 2.0 * math.pi

# Points this close to a boundary count as inside (containment sampling only).
CONTAINMENT_TOL = 1e-9


def wrap_angle(theta):
    """Map angles to the half-open interval [-pi, pi). Works on arrays."""
    wrapped = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


@dataclass(frozen=True)
class Pose2:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def as_array(self):
        return np.array([self.x, self.y, self.theta])

    def compose(self, other: Pose2) -> Pose2:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return Pose2(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )

    def apply(self, points):
        pts = np.asarray(points, dtype=float)
        c, s = math.cos(self.theta), math.sin(self.theta)
        out = np.empty_like(pts)
        out[..., 0] = c * pts[..., 0] - s * pts[..., 1] + self.x
        out[..., 1] = s * pts[..., 0] + c * pts[..., 1] + self.y
        return out


IDENTITY = Pose2()


@dataclass(frozen=True)
class ConvexShape:
    """A convex polygon (CCW vertices) or a disc, in its own local frame.

    Build instances with :meth:`polygon` or :meth:`disc`; both validate.
    """

    kind: str
    vertices: tuple = ()
    center: tuple = (0.0, 0.0)
    radius: float = 0.0

    @classmethod
    def polygon(cls, vertices) -> ConvexShape:
        pts = np.asarray(vertices, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 3:
            raise InvalidShapeError("degenerate polygon: need at least 3 vertices")
        if not np.all(np.isfinite(pts)):
            raise InvalidShapeError("degenerate polygon: non-finite vertex")
        area = _signed_area(pts)
        if area < 0:
            pts = pts[::-1]
            area = -area
        scale = max(1.0, float(np.abs(pts).max()))
        if area <= 1e-12 * scale * scale:
            raise InvalidShapeError("degenerate polygon: zero area")
        edges = np.roll(pts, -1, axis=0) - pts
        if np.any(np.hypot(edges[:, 0], edges[:, 1]) <= 1e-12 * scale):
            raise InvalidShapeError("degenerate polygon: repeated vertex")
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        if np.any(cross < -1e-12 * scale * scale):
            raise InvalidShapeError("polygon is not convex")
        return cls("polygon", vertices=tuple(tuple(map(float, p)) for p in pts))

    @classmethod
    def disc(cls, center, radius) -> ConvexShape:
        radius = float(radius)
        cx, cy = (float(c) for c in center)
        if not (math.isfinite(radius) and radius > 0):
            raise InvalidShapeError("disc radius must be positive")
        if not (math.isfinite(cx) and math.isfinite(cy)):
            raise InvalidShapeError("disc center must be finite")
        return cls("disc", center=(cx, cy), radius=radius)

    @classmethod
    def box(cls, xmin, ymin, xmax, ymax) -> ConvexShape:
        return cls.polygon([(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)])

    @property
    def is_disc(self):
        return self.kind == "disc"

    # -- cached derived arrays -------------------------------------------------
    @cached_property
    def points(self):
        return np.array(self.vertices, dtype=float).reshape(-1, 2)

    @cached_property
    def edge_vectors(self):
        return np.roll(self.points, -1, axis=0) - self.points

    @cached_property
    def normals(self):
        """Outward unit edge normals (CCW polygon)."""
        e = self.edge_vectors
        n = np.column_stack([e[:, 1], -e[:, 0]])
        return n / np.hypot(n[:, 0], n[:, 1])[:, None]

    @cached_property
    def _own_extent(self):
        proj = self.points @ self.normals.T  # (m vertices, m axes)
        return proj.min(axis=0), proj.max(axis=0)

    @cached_property
    def area(self):
        if self.is_disc:
            return math.pi * self.radius**2
        return _signed_area(self.points)

    @cached_property
    def centroid(self):
        if self.is_disc:
            return np.array(self.center)
        p = self.points
        q = np.roll(p, -1, axis=0)
        cross = p[:, 0] * q[:, 1] - q[:, 0] * p[:, 1]
        a = cross.sum() / 2.0
        cx = ((p[:, 0] + q[:, 0]) * cross).sum() / (6.0 * a)
        cy = ((p[:, 1] + q[:, 1]) * cross).sum() / (6.0 * a)
        return np.array([cx, cy])

    @cached_property
    def bound_radius(self):
        """Radius of the smallest origin-centred circle enclosing the shape."""
        if self.is_disc:
            return math.hypot(*self.center) + self.radius
        return float(np.hypot(self.points[:, 0], self.points[:, 1]).max())

    @cached_property
    def aabb(self):
        if self.is_disc:
            cx, cy = self.center
            r = self.radius
            return np.array([cx - r, cy - r, cx + r, cy + r])
        p = self.points
        return np.array([p[:, 0].min(), p[:, 1].min(), p[:, 0].max(), p[:, 1].max()])

    def transformed(self, pose: Pose2) -> ConvexShape:
        """The shape expressed in the frame that ``pose`` is given in."""
        if self.is_disc:
            c = pose.apply(np.array(self.center))
            return ConvexShape.disc(c, self.radius)
        return ConvexShape.polygon(pose.apply(self.points))

    def contains_points(self, pts, tol=CONTAINMENT_TOL):
        """Closed membership test for an (n, 2) array of local-frame points."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.is_disc:
            d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
            return d <= self.radius + tol
        s = (pts[:, None, :] - self.points[None, :, :]) * self.normals[None, :, :]
        return np.all(s.sum(axis=2) <= tol, axis=1)

    def sample_points(self, n, rng):
        """``n`` points uniform over the shape's area (local frame)."""
        if self.is_disc:
            r = self.radius * np.sqrt(rng.random(n))
            phi = rng.random(n) * TWO_PI
            return np.column_stack([self.center[0] + r * np.cos(phi), self.center[1] + r * np.sin(phi)])
        p = self.points
        a, b, c = p[0], p[1:-1], p[2:]
        tri_area = 0.5 * np.abs((b[:, 0] - a[0]) * (c[:, 1] - a[1]) - (b[:, 1] - a[1]) * (c[:, 0] - a[0]))
        tri = rng.choice(len(tri_area), size=n, p=tri_area / tri_area.sum())
        u, v = rng.random(n), rng.random(n)
        flip = u + v > 1.0
        u[flip], v[flip] = 1.0 - u[flip], 1.0 - v[flip]
        return a + u[:, None] * (b[tri] - a) + v[:, None] * (c[tri] - a)


def _signed_area(pts):
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass(frozen=True)
class BodyVolume:
    """A union of posed convex shapes; robot bodies and environments alike."""

    parts: tuple

    def __post_init__(self):
        parts = tuple((s, p if p is not None else IDENTITY) for s, p in self.parts)
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, shapes, pose: Pose2 = IDENTITY) -> BodyVolume:
        return cls(tuple((s, pose) for s in shapes))

    def world_shapes(self):
        return [s.transformed(p) for s, p in self.parts]

    def contains_points(self, pts, tol=CONTAINMENT_TOL):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = np.zeros(len(pts), dtype=bool)
        for shape in self.world_shapes():
            inside |= shape.contains_points(pts, tol)
        return inside

    def sample_points(self, n, rng):
        """Uniform points over the union of parts (overlaps are not double counted)."""
        shapes = self.world_shapes()
        if not shapes:
            raise InvalidShapeError("empty body volume")
        areas = np.array([s.area for s in shapes])
        weights = areas / areas.sum()
        out = []
        need = n
        while need > 0:
            m = max(need * 2, 16)
            which = rng.choice(len(shapes), size=m, p=weights)
            pts = np.empty((m, 2))
            for i, s in enumerate(shapes):
                sel = which == i
                if sel.any():
                    pts[sel] = s.sample_points(int(sel.sum()), rng)
            cover = np.zeros(m)
            for s in shapes:
                cover += s.contains_points(pts, tol=0.0)
            cover = np.maximum(cover, 1.0)
            keep = rng.random(m) * cover < 1.0
            out.append(pts[keep][:need])
            need -= len(out[-1])
        return np.concatenate(out)


# -- collision ------------------------------------------------------------------


def point_polygon_distance(pts, polygon: ConvexShape):
    """Distance from each of (n, 2) points to a closed convex polygon (0 inside)."""
    v = polygon.points
    e = polygon.edge_vectors
    rel_x = pts[:, 0:1] - v[None, :, 0]
    rel_y = pts[:, 1:2] - v[None, :, 1]
    side = rel_x * polygon.normals[None, :, 0] + rel_y * polygon.normals[None, :, 1]
    inside = np.all(side <= 0.0, axis=1)
    elen2 = (e * e).sum(axis=1)
    t = np.clip((rel_x * e[None, :, 0] + rel_y * e[None, :, 1]) / elen2[None, :], 0.0, 1.0)
    dx = rel_x - t * e[None, :, 0]
    dy = rel_y - t * e[None, :, 1]
    dist = np.sqrt(dx * dx + dy * dy).min(axis=1)
    dist[inside] = 0.0
    return dist


def collide_batch(shape: ConvexShape, poses, other: ConvexShape):
    """Collision of ``shape`` placed at each row of ``poses`` (n, 3) with ``other``.

    ``other`` is given in the frame the poses refer to (usually the world).
    Returns a boolean array of length n.
    """
    poses = np.asarray(poses, dtype=float).reshape(-1, 3)
    n = len(poses)
    result = np.zeros(n, dtype=bool)
    if n == 0:
        return result
    x, y = poses[:, 0], poses[:, 1]
    rho = shape.bound_radius
    box = other.aabb
    near = (x + rho >= box[0]) & (y + rho >= box[1]) & (x - rho <= box[2]) & (y - rho <= box[3])
    if not near.any():
        return result
    idx = np.flatnonzero(near)
    result[idx] = _narrowphase(shape, poses[idx], other)
    return result


def _narrowphase(shape, poses, other):
    x, y, th = poses[:, 0], poses[:, 1], poses[:, 2]
    c, s = np.cos(th), np.sin(th)
    if shape.is_disc:
        lcx, lcy = shape.center
        centers = np.column_stack([c * lcx - s * lcy + x, s * lcx + c * lcy + y])
        if other.is_disc:
            d = np.hypot(centers[:, 0] - other.center[0], centers[:, 1] - other.center[1])
            return d <= shape.radius + other.radius
        return point_polygon_distance(centers, other) <= shape.radius
    if other.is_disc:
        # express the disc centre in each pose's local frame
        dx = other.center[0] - x
        dy = other.center[1] - y
        local = np.column_stack([c * dx + s * dy, -s * dx + c * dy])
        return point_polygon_distance(local, shape) <= other.radius
    return _sat_batch(shape, x, y, c, s, other)


def _sat_batch(shape, x, y, c, s, other):
    lx, ly = shape.points[:, 0], shape.points[:, 1]
    wx = c[:, None] * lx[None, :] - s[:, None] * ly[None, :] + x[:, None]
    wy = s[:, None] * lx[None, :] + c[:, None] * ly[None, :] + y[:, None]
    # axes of the fixed shape
    on = other.normals
    omin, omax = other._own_extent
    proj = wx[:, :, None] * on[None, None, :, 0] + wy[:, :, None] * on[None, None, :, 1]
    separated = np.any((proj.max(axis=1) < omin) | (proj.min(axis=1) > omax), axis=1)
    # axes of the moving shape
    nx, ny = shape.normals[:, 0], shape.normals[:, 1]
    rnx = c[:, None] * nx[None, :] - s[:, None] * ny[None, :]
    rny = s[:, None] * nx[None, :] + c[:, None] * ny[None, :]
    smin, smax = shape._own_extent
    offset = x[:, None] * rnx + y[:, None] * rny
    ox, oy = other.points[:, 0], other.points[:, 1]
    oproj = rnx[:, :, None] * ox[None, None, :] + rny[:, :, None] * oy[None, None, :]
    separated |= np.any(
        (smax[None, :] + offset < oproj.min(axis=2)) | (smin[None, :] + offset > oproj.max(axis=2)), axis=1
    )
    return ~separated


def collide(a: ConvexShape, b: ConvexShape, pose_a: Pose2 = IDENTITY, pose_b: Pose2 = IDENTITY) -> bool:
    """True iff the closed shapes intersect (touching counts)."""
    relative = _relative_pose(pose_b, pose_a)
    return bool(collide_batch(a, relative.as_array(), b)[0])


def _relative_pose(frame: Pose2, pose: Pose2) -> Pose2:
    # pose of `pose` expressed in `frame`
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    dx, dy = pose.x - frame.x, pose.y - frame.y
    return Pose2(c * dx + s * dy, -s * dx + c * dy, pose.theta - frame.theta)


def volumes_collide(a: BodyVolume, b: BodyVolume) -> bool:
    return any(collide(sa, sb, pa, pb) for sa, pa in a.parts for sb, pb in b.parts)


# -- containment, inscribed discs, inflation --------------------------------------


def contains_sampled(inner: BodyVolume, outer: BodyVolume, n: int, rng):
    """Monte-Carlo check that ``inner`` lies inside ``outer``.

    Draws ``n`` points uniformly from ``inner`` and returns the first one that
    is outside ``outer``, or ``None`` when every sample is contained.
    """
    if n < 1:
        raise InvalidParameterError("n must be >= 1")
    if not inner.parts:
        raise InvalidShapeError("empty inner volume")
    pts = inner.sample_points(n, rng)
    outside = ~outer.contains_points(pts)
    if outside.any():
        return pts[int(np.argmax(outside))]
    return None


def inscribed_disc(polygon: ConvexShape) -> ConvexShape:
    """Largest disc contained in a convex polygon (its Chebyshev centre).

    Solved as a linear program over the edge half-planes
    ``n_i . c + r <= n_i . v_i``.
    """
    if polygon.is_disc:
        return polygon
    normals = polygon.normals
    offsets = (normals * polygon.points).sum(axis=1)
    a_ub = np.column_stack([normals, np.ones(len(normals))])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=offsets,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if res.status != 0 or res.x[2] <= 0:
        raise InvalidShapeError("degenerate polygon: no interior disc")
    cx, cy, r = res.x
    return ConvexShape.disc((cx, cy), r)


def inflate(shape: ConvexShape, delta: float) -> ConvexShape:
    """Scale a disc's radius, or a polygon about its centroid, by ``delta``."""
    if not (delta > 0 and math.isfinite(delta)):
        raise InvalidParameterError("inflation factor must be positive")
    if shape.is_disc:
        return ConvexShape.disc(shape.center, shape.radius * delta)
    c = shape.centroid
    return ConvexShape.polygon(c + (shape.points - c) * delta)
