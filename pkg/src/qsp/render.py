"""Deterministic SVG 1.1 pictures of scenes, roadmaps and paths.

Coordinates are written with four decimals and elements in a fixed order,
so identical inputs give byte-identical files.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .robots import FREE_FLOATING
from .scene import PlanningProblem

CANVAS = 600.0
MARGIN = 20.0
START_COLOR = "#2e9e44"
GOAL_COLOR = "#d03030"
OBSTACLE_COLOR = "#555555"
ROADMAP_COLOR = "#7a9cc6"
PATH_COLOR = "#e08a00"


def _num(x):
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Canvas:
    def __init__(self, bounds):
        (self.xmin, xmax), (ymin, self.ymax) = bounds
        self.scale = CANVAS / max(xmax - self.xmin, self.ymax - ymin)
        self.width = (xmax - self.xmin) * self.scale + 2 * MARGIN
        self.height = (self.ymax - ymin) * self.scale + 2 * MARGIN

    def xy(self, x, y):
        return (x - self.xmin) * self.scale + MARGIN, (self.ymax - y) * self.scale + MARGIN

    def points(self, pts):
        return " ".join(f"{_num(px)},{_num(py)}" for px, py in (self.xy(x, y) for x, y in pts))

    def shape(self, shape, attrs):
        if shape.is_disc:
            cx, cy = self.xy(*shape.center)
            return f'<circle cx="{_num(cx)}" cy="{_num(cy)}" r="{_num(shape.radius * self.scale)}" {attrs}/>'
        return f'<polygon points="{self.points(shape.points)}" {attrs}/>'


def _volume(canvas, volume, attrs):
    return [canvas.shape(s, attrs) for s in volume.world_shapes()]


def reference_point(robot, q):
    """Point traced for a path: the body origin, or the tip of the last link."""
    q = np.asarray(q, dtype=float)
    if robot.kind == FREE_FLOATING and not robot.links:
        return float(q[0]), float(q[1])
    (_, poses) = robot.part_poses(q)[-1]
    x, y, th = poses[0]
    length = robot.links[-1].length
    return float(x + length * math.cos(th)), float(y + length * math.sin(th))


def _roadmap_points(problem, roadmap):
    """Level-1 workspace projection of a roadmap dump, or None if it has no planar base."""
    base = problem.sequence.robot(1)
    if base.kind != FREE_FLOATING:
        return None
    verts = np.asarray(roadmap["vertices"], dtype=float).reshape(-1, roadmap["dim"])
    return verts[:, :2]


def render_svg(problem: PlanningProblem, roadmaps=(), path=None) -> str:
    """Workspace, start (green) and goal (red) robots, level-1 roadmap, path trace.

    ``roadmaps`` are roadmap dumps (``Roadmap.to_dict``); the lowest level
    given is drawn projected to the plane.  ``path`` is a list of full-robot
    configurations.
    """
    c = _Canvas(problem.bounds)
    robot = problem.sequence.robot(problem.K)
    (xmin, xmax), (ymin, ymax) = problem.bounds
    x0, y0 = c.xy(xmin, ymax)
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(c.width)}" height="{_num(c.height)}" '
        f'viewBox="0 0 {_num(c.width)} {_num(c.height)}">',
        f"<title>{escape(problem.name)}</title>",
        f'<rect id="workspace" x="{_num(x0)}" y="{_num(y0)}" width="{_num((xmax - xmin) * c.scale)}" '
        f'height="{_num((ymax - ymin) * c.scale)}" fill="white" stroke="black" stroke-width="1"/>',
        '<g id="obstacles">',
        *_volume(c, problem.environment, f'fill="{OBSTACLE_COLOR}"'),
        "</g>",
    ]
    notice = None
    if roadmaps:
        lowest = min(roadmaps, key=lambda r: r.get("level") or 0)
        pts = _roadmap_points(problem, lowest)
        if pts is None:
            notice = "roadmap not drawn: level-1 base is not a planar position"
        else:
            out.append(f'<g id="roadmap" stroke="{ROADMAP_COLOR}" stroke-width="0.6" fill="{ROADMAP_COLOR}">')
            for i, j in lowest["edges"]:
                (ax, ay), (bx, by) = c.xy(*pts[i]), c.xy(*pts[j])
                out.append(f'<line x1="{_num(ax)}" y1="{_num(ay)}" x2="{_num(bx)}" y2="{_num(by)}"/>')
            for x, y in pts:
                px, py = c.xy(x, y)
                out.append(f'<circle cx="{_num(px)}" cy="{_num(py)}" r="1.2"/>')
            out.append("</g>")
    if path is not None and len(path) > 0:
        trace = [reference_point(robot, q) for q in path]
        out.append(f'<polyline id="path" points="{c.points(trace)}" fill="none" stroke="{PATH_COLOR}" stroke-width="2"/>')
    for tag, q, color in (("start", problem.q_start, START_COLOR), ("goal", problem.q_goal, GOAL_COLOR)):
        out.append(f'<g id="{tag}" fill="{color}" fill-opacity="0.7" stroke="{color}">')
        out.extend(_volume(c, robot.forward_volume(q), ""))
        out.append("</g>")
    if notice:
        out.append(f'<text id="notice" x="{_num(MARGIN)}" y="{_num(MARGIN - 5)}" font-size="12">{escape(notice)}</text>')
    out.append("</svg>")
    return "\n".join(line.replace(" />", "/>") for line in out) + "\n"
