"""Planning problems over nested robot sequences.

A :class:`PlanningProblem` bundles the obstacle set, the nested robots
``R_1 c ... c R_K`` with their quotient decomposition, and the start/goal in
the top-level space.  Feasibility is robot-versus-environment only; self
collision is not checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .cspace import QuotientDecomposition
from .errors import InconsistentProblemError, InvalidConfigurationError, InvalidLevelError
from .geometry import BodyVolume, collide_batch, contains_sampled
from .robots import FREE_FLOATING, RobotModel

# Shapes sampled per (p, q) pair when certifying a nesting.
CONTAINMENT_POINTS = 48


@dataclass(frozen=True)
class PlannerDefaults:
    neighbors: int = 10
    resolution: float | None = None
    epsilon: float | None = None
    delta: float = 1.2
    bias: float = 0.8
    bias_halflife: int = 100
    weights: tuple | None = None


@dataclass(frozen=True)
class NestedRobotSequence:
    robots: tuple
    decomposition: QuotientDecomposition

    @classmethod
    def build(cls, robots, bounds, weights=None) -> NestedRobotSequence:
        robots = tuple(robots)
        spaces = [r.config_space(bounds, weights) for r in robots]
        return cls(robots, QuotientDecomposition(spaces))

    @property
    def K(self):
        return len(self.robots)

    def robot(self, k) -> RobotModel:
        if not 1 <= k <= self.K:
            raise InvalidLevelError(f"level {k} outside [1, {self.K}]")
        return self.robots[k - 1]


class Checker:
    """Collision-free predicate for one robot against a fixed environment."""

    def __init__(self, robot: RobotModel, environment: BodyVolume, space):
        self.robot = robot
        self.space = space
        self.obstacles = environment.world_shapes()

    def batch(self, configs):
        q = np.asarray(configs, dtype=float)
        if q.ndim == 1:
            q = q[None, :]
        hit = np.zeros(len(q), dtype=bool)
        for shape, poses in self.robot.part_poses(q):
            for obstacle in self.obstacles:
                alive = np.flatnonzero(~hit)
                if alive.size == 0:
                    return ~hit
                hit[alive] |= collide_batch(shape, poses[alive], obstacle)
        return ~hit

    def __call__(self, q):
        return bool(self.batch(q)[0])


@dataclass(eq=False)
class PlanningProblem:
    environment: BodyVolume
    sequence: NestedRobotSequence
    q_start: np.ndarray
    q_goal: np.ndarray
    bounds: tuple = ((0.0, 10.0), (0.0, 10.0))
    planner: PlannerDefaults = PlannerDefaults()
    name: str = "scene"
    _checkers: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.q_start = np.asarray(self.q_start, dtype=float)
        self.q_goal = np.asarray(self.q_goal, dtype=float)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_checkers"] = {}
        return state

    @property
    def K(self):
        return self.sequence.K

    @property
    def decomposition(self):
        return self.sequence.decomposition

    def space(self, k):
        return self.decomposition.space(k)

    @property
    def workspace_diagonal(self):
        (xmin, xmax), (ymin, ymax) = self.bounds
        return math.hypot(xmax - xmin, ymax - ymin)

    @property
    def resolution(self):
        if self.planner.resolution is not None:
            return self.planner.resolution
        return 0.01 * self.workspace_diagonal

    @property
    def epsilon(self):
        if self.planner.epsilon is not None:
            return self.planner.epsilon
        return 0.01 if self.sequence.robot(self.K).kind == FREE_FLOATING else 0.1

    def checker(self, k) -> Checker:
        if k not in self._checkers:
            self._checkers[k] = Checker(self.sequence.robot(k), self.environment, self.space(k))
        return self._checkers[k]

    def is_valid(self, k, q):
        q = self.space(k).check(q)
        return self.checker(k)(q)

    def valid_batch(self, k, configs):
        return self.checker(k).batch(configs)

    def level(self, k) -> PlanningProblem:
        """The single-robot problem for ``R_k`` with projected start and goal."""
        starts = self.decomposition.project_to(self.K, self.q_start, k)
        goals = self.decomposition.project_to(self.K, self.q_goal, k)
        robot = self.sequence.robot(k)
        space = self.space(k)
        weights = [ax.weight for ax in space.axes]
        seq = NestedRobotSequence.build([robot], self.bounds, weights)
        return replace(self, sequence=seq, q_start=starts, q_goal=goals, _checkers={})

    def with_inflated_nested(self, delta) -> PlanningProblem:
        """Inflate every nested free-floating robot by ``delta`` (completeness-trading)."""
        robots = list(self.sequence.robots)
        for i in range(len(robots) - 1):
            if robots[i].kind == FREE_FLOATING:
                robots[i] = robots[i].inflated(delta)
        seq = NestedRobotSequence(tuple(robots), self.decomposition)
        return replace(self, sequence=seq, _checkers={})


def is_valid(problem: PlanningProblem, k, q):
    return problem.is_valid(k, q)


class NestingCertificate(NamedTuple):
    samples: int
    points: int

    @property
    def certified(self):
        return True


class NestingCounterexample(NamedTuple):
    level: int
    p: np.ndarray
    q: np.ndarray
    witness: np.ndarray

    @property
    def certified(self):
        return False


def check_nesting(sequence: NestedRobotSequence, n, rng, points=CONTAINMENT_POINTS):
    """Monte-Carlo certification of ``V_{k-1}(p) c V_k(p o q)`` for every level.

    Returns a :class:`NestingCertificate` recording the sample counts, or the
    first :class:`NestingCounterexample` found.
    """
    d = sequence.decomposition
    for k in range(2, sequence.K + 1):
        inner_robot = sequence.robot(k - 1)
        outer_robot = sequence.robot(k)
        base_space = d.space(k - 1)
        fiber_space = d.fiber(k)
        for _ in range(n):
            p = base_space.sample_uniform(rng)
            q = fiber_space.sample_uniform(rng)
            inner = inner_robot.forward_volume(p)
            outer = outer_robot.forward_volume(d.lift(k, p, q))
            witness = contains_sampled(inner, outer, points, rng)
            if witness is not None:
                return NestingCounterexample(k, p, q, witness)
    return NestingCertificate(n, points)


def project_problem(problem: PlanningProblem):
    """Per-level ``(start, goal)`` pairs for k = 1..K, each checked feasible."""
    d = problem.decomposition
    out = []
    for k in range(1, problem.K + 1):
        qs = d.project_to(problem.K, problem.q_start, k)
        qg = d.project_to(problem.K, problem.q_goal, k)
        for label, q in (("start", qs), ("goal", qg)):
            try:
                ok = problem.is_valid(k, q)
            except InvalidConfigurationError as exc:
                raise InconsistentProblemError(f"projected {label} at level {k}: {exc}") from exc
            if not ok:
                raise InconsistentProblemError(
                    f"projected {label} is infeasible for nested robot at level {k}; the nesting is violated"
                )
        out.append((qs, qg))
    return out
