"""Generate the bundled scene files in src/qsp/scenes/.

Run from the repository root:  python3 tools/build_scenes.py
Every scene is validated (decomposition, nesting certificate, query) when
written; the oracle verdicts for them live in tests/fixtures/oracle/.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

import numpy as np

from qsp.geometry import BodyVolume, ConvexShape, Pose2
from qsp.robots import FIXED_BASE, FREE_FLOATING, Link, RobotModel, disc_robot
from qsp.scene import NestedRobotSequence, PlannerDefaults, PlanningProblem
from qsp.scenefile import dumps_scene, loads_scene

B = ConvexShape.box
BOUNDS = ((0.0, 10.0), (0.0, 10.0))
OUT = Path(__file__).resolve().parent.parent / "src" / "qsp" / "scenes"


def rigid(name, parts):
    return RobotModel(name, FREE_FLOATING, body=tuple(parts))


def problem(name, obstacles, robots, start, goal, **planner):
    seq = NestedRobotSequence.build(robots, BOUNDS, planner.pop("weights", None))
    return PlanningProblem(
        BodyVolume.of(obstacles), seq, np.array(start, float), np.array(goal, float), BOUNDS,
        PlannerDefaults(**planner), name,
    )


def l_shape(name="L"):
    """L-shaped body; the origin is the centre of the corner square."""
    return rigid(name, [B(-0.15, -0.15, 1.5, 0.15), B(-0.15, 0.15, 0.15, 0.9)])


def spurious_lshape():
    """Block with a narrow lower passage (disc only) and a wide upper one."""
    obstacles = [
        B(4.0, 1.0, 6.0, 6.5),    # central block
        B(4.0, -1.0, 6.0, 0.25),  # floor of the lower passage
        B(4.0, 9.0, 6.0, 11.0),   # ceiling of the upper passage
    ]
    body = l_shape()
    return problem("spurious_Lshape", obstacles, [disc_robot(body, "disc"), body], [2.0, 1.5, 0.0], [8.0, 1.5, 0.0])


def nonsimple_rectangle():
    """A rectangle parked in a dead-end pocket must come out, turn around and go back in.

    Start and goal share the same position and differ by a half turn, so the
    disc-level projection of any solution is a closed loop.
    """
    obstacles = [
        B(1.0, 3.0, 3.5, 4.55),   # pocket floor
        B(1.0, 5.45, 3.5, 7.0),   # pocket ceiling
        B(0.0, 3.0, 1.0, 7.0),    # pocket back wall
    ]
    body = rigid("rectangle", [B(-0.8, -0.2, 0.8, 0.2)])
    return problem("nonsimple_rectangle", obstacles, [disc_robot(body, "disc"), body], [2.0, 5.0, 0.0], [2.0, 5.0, math.pi])


def double_l(name="double_L"):
    """Two hooked arms on a square core, point-symmetric (a planar double L)."""
    return rigid(name, [
        B(-0.3, -0.3, 0.3, 0.3),
        B(0.3, -0.1, 1.1, 0.1), B(0.9, 0.1, 1.1, 0.3),
        B(-1.1, -0.1, -0.3, 0.1), B(-1.1, -0.3, -0.9, -0.1),
    ])


def narrow_passage_lshape():
    """A thin wall with one small hole that the body passes only when nearly horizontal."""
    half = 0.4
    obstacles = [B(4.9, -1.0, 5.1, 5.0 - half), B(4.9, 5.0 + half, 5.1, 11.0)]
    body = double_l()
    return problem("narrow_passage_Lshape", obstacles, [disc_robot(body, "disc"), body], [2.0, 2.0, 0.5], [8.0, 8.0, 2.5])


def arm(name, n_links, limits=2.9, distal=None):
    """Planar arm based at (5, 5); ``distal`` overrides the limits of joints 2 and 3."""
    lengths = (1.6, 1.3, 1.0)[:n_links]
    bounds = [limits] + [distal or limits] * 2
    links = [Link(l, -b, b, (B(0.0, -0.1, l, 0.1),)) for l, b in zip(lengths, bounds)]
    return RobotModel(name, FIXED_BASE, links=tuple(links), base=Pose2(5.0, 5.0, 0.0))


def arm3():
    """Three-link arm nested as 1 c 2 c 3 links, sweeping past three posts."""
    obstacles = [B(7.3, 3.6, 8.1, 4.4), B(2.4, 6.4, 3.2, 7.2), B(4.6, 1.0, 5.4, 1.6)]
    robots = [arm("arm1", 1), arm("arm2", 2), arm("arm3", 3)]
    return problem("arm3", obstacles, robots, [1.9, -0.53, 0.29], [-2.74, 1.47, 0.22])


def arm3_blocked():
    """A nearly straight arm whose tip cannot get past a radial fence.

    The two distal joints bend at most 0.5 rad, which keeps the last link
    beyond radius 3 of the base at all times, while the two-link arm never
    reaches radius 3.  The fence therefore splits the full problem only.
    """
    obstacles = [B(8.0, 4.9, 9.8, 5.1)]
    robots = [arm("arm1", 1), arm("arm2", 2, distal=0.5), arm("arm3", 3, distal=0.5)]
    return problem("arm3_blocked", obstacles, robots, [-1.0, 0.3, 0.3], [1.0, -0.3, -0.3])


def two_rooms():
    """Rectangle through a wide door between two rooms (easy baseline)."""
    obstacles = [B(4.8, -1.0, 5.2, 4.0), B(4.8, 6.0, 5.2, 11.0)]
    body = rigid("rectangle", [B(-0.6, -0.2, 0.6, 0.2)])
    return problem("two_rooms", obstacles, [disc_robot(body, "disc"), body], [2.0, 2.0, 0.5], [8.0, 8.0, -0.5])


SCENES = {
    "spurious_Lshape": spurious_lshape,
    "nonsimple_rectangle": nonsimple_rectangle,
    "narrow_passage_Lshape": narrow_passage_lshape,
    "arm3": arm3,
    "arm3_blocked": arm3_blocked,
    "two_rooms": two_rooms,
}


def main(names):
    OUT.mkdir(parents=True, exist_ok=True)
    for name in names or SCENES:
        text = dumps_scene(SCENES[name]())
        loads_scene(text)  # runs every validator
        (OUT / f"{name}.toml").write_text(text)
        print(f"wrote {name}.toml")


if __name__ == "__main__":
    main(sys.argv[1:])
