"""Planar robot models: free-floating rigid bodies and revolute serial chains.

A free-floating robot is placed by ``(x, y)`` or ``(x, y, theta)``; a
fixed-base robot sits at a constant base pose.  Either may carry a chain of
revolute links.  Joint ``i`` sits at the origin of link ``i``'s frame and the
next joint at ``(length_i, 0)`` in that frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cspace import Axis, ProductSpace
from .errors import InvalidConfigurationError, InvalidParameterError, InvalidShapeError
from .geometry import IDENTITY, BodyVolume, ConvexShape, Pose2, inflate, inscribed_disc

FREE_FLOATING = "free_floating"
FIXED_BASE = "fixed_base"


@dataclass(frozen=True)
class Link:
    length: float
    lower: float
    upper: float
    shapes: tuple = ()

    def __post_init__(self):
        if not (self.lower < self.upper):
            raise InvalidParameterError(f"joint limits must satisfy lower < upper, got [{self.lower}, {self.upper}]")
        if not (math.isfinite(self.length) and self.length >= 0):
            raise InvalidParameterError("link length must be finite and non-negative")
        object.__setattr__(self, "shapes", tuple(self.shapes))


@dataclass(frozen=True)
class RobotModel:
    name: str
    kind: str
    body: tuple = ()
    links: tuple = ()
    base: Pose2 = IDENTITY
    rotates: bool = True

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "links", tuple(self.links))
        if self.kind not in (FREE_FLOATING, FIXED_BASE):
            raise InvalidParameterError(f"unknown robot kind {self.kind!r}")
        if self.kind == FIXED_BASE and not self.links:
            raise InvalidParameterError("fixed-base robot needs at least one link")
        if not self.body and not any(link.shapes for link in self.links):
            raise InvalidShapeError(f"robot {self.name!r} has no geometry")

    @property
    def floating_dim(self):
        if self.kind == FIXED_BASE:
            return 0
        return 3 if self.rotates else 2

    @property
    def dim(self):
        return self.floating_dim + len(self.links)

    def config_axes(self, bounds):
        (xmin, xmax), (ymin, ymax) = bounds
        axes = []
        if self.kind == FREE_FLOATING:
            axes += [Axis("interval", float(xmin), float(xmax)), Axis("interval", float(ymin), float(ymax))]
            if self.rotates:
                axes.append(Axis("angle", -math.pi, math.pi))
        axes += [Axis("interval", float(link.lower), float(link.upper)) for link in self.links]
        return axes

    def config_space(self, bounds, weights=None) -> ProductSpace:
        axes = self.config_axes(bounds)
        if weights is not None:
            axes = [ax._replace(weight=float(w)) for ax, w in zip(axes, weights)]
        return ProductSpace.from_axes(axes)

    def part_poses(self, configs):
        """World poses of every shape for a batch of configurations.

        Returns a list of ``(shape, poses)`` with ``poses`` of shape (n, 3).
        """
        q = np.asarray(configs, dtype=float)
        if q.ndim == 1:
            q = q[None, :]
        n = len(q)
        if self.kind == FREE_FLOATING:
            x, y = q[:, 0].copy(), q[:, 1].copy()
            th = q[:, 2].copy() if self.rotates else np.zeros(n)
        else:
            x = np.full(n, self.base.x)
            y = np.full(n, self.base.y)
            th = np.full(n, self.base.theta)
        out = [(s, np.column_stack([x, y, th])) for s in self.body]
        j = self.floating_dim
        prev_len = 0.0
        for i, link in enumerate(self.links):
            if prev_len:
                x = x + prev_len * np.cos(th)
                y = y + prev_len * np.sin(th)
            th = th + q[:, j + i]
            poses = np.column_stack([x, y, th])
            out.extend((s, poses) for s in link.shapes)
            prev_len = link.length
        return out

    def forward_volume(self, q, bounds=None) -> BodyVolume:
        q = np.asarray(q, dtype=float)
        if q.shape != (self.dim,):
            raise InvalidConfigurationError(f"robot {self.name!r} expects {self.dim} coordinates")
        j = self.floating_dim
        for i, link in enumerate(self.links):
            v = q[j + i]
            if v < link.lower - 1e-9 or v > link.upper + 1e-9:
                raise InvalidConfigurationError(f"joint {i} value {v} outside [{link.lower}, {link.upper}]")
        if bounds is not None and self.kind == FREE_FLOATING:
            self.config_space(bounds).check(q)
        return BodyVolume(tuple((s, Pose2(*p[0])) for s, p in self.part_poses(q)))

    # -- derived robots -----------------------------------------------------------
    def truncated(self, n_links, name=None) -> RobotModel:
        """The same robot with only its first ``n_links`` links."""
        if not 1 <= n_links <= len(self.links):
            raise InvalidParameterError("cannot truncate to %d links" % n_links)
        return replace(self, name=name or f"{self.name}[:{n_links}]", links=self.links[:n_links])

    def inflated(self, delta) -> RobotModel:
        return replace(
            self,
            body=tuple(inflate(s, delta) for s in self.body),
            links=tuple(replace(link, shapes=tuple(inflate(s, delta) for s in link.shapes)) for link in self.links),
        )

    def recentered(self, point) -> RobotModel:
        """Move a free-floating body's reference frame to ``point`` (body frame)."""
        if self.kind != FREE_FLOATING or self.links:
            raise InvalidParameterError("only rigid free-floating bodies can be recentered")
        shift = Pose2(-float(point[0]), -float(point[1]), 0.0)
        return replace(self, body=tuple(s.transformed(shift) for s in self.body))


def forward_volume(robot: RobotModel, q) -> BodyVolume:
    return robot.forward_volume(q)


def largest_inscribed_disc(robot: RobotModel) -> ConvexShape:
    """Largest inscribed disc over the convex parts of a rigid body."""
    discs = [inscribed_disc(s) for s in robot.body]
    if not discs:
        raise InvalidShapeError("robot has no body parts")
    return max(discs, key=lambda d: d.radius)


def origin_disc_radius(robot: RobotModel) -> float:
    """Radius of the largest disc centred on the body origin inside one body part."""
    best = 0.0
    for shape in robot.body:
        if shape.is_disc:
            r = shape.radius - math.hypot(*shape.center)
        else:
            r = float(np.min((shape.normals * shape.points).sum(axis=1)))
        best = max(best, r)
    return best


def disc_robot(robot: RobotModel, name=None) -> RobotModel:
    """Translation-only disc robot nested in a free-floating rigid body.

    The disc is centred on the body's reference point, so it stays inside the
    body under every rotation.  Author bodies with the origin at the Chebyshev
    centre of their thickest part (see :func:`largest_inscribed_disc`) to get
    the largest such disc.
    """
    if robot.kind != FREE_FLOATING:
        raise InvalidParameterError("disc nesting applies to free-floating robots")
    r = origin_disc_radius(robot)
    if r <= 0:
        raise InvalidShapeError(f"body origin of {robot.name!r} is not inside any part")
    return RobotModel(
        name=name or f"{robot.name}_disc",
        kind=FREE_FLOATING,
        body=(ConvexShape.disc((0.0, 0.0), r),),
        rotates=False,
    )
