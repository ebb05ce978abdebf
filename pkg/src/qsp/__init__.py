"""Quotient-space roadmap planning for planar robots.

Nested robots ``R_1 c ... c R_K`` induce a chain of configuration spaces
``M_1 c ... c M_K``; the planner grows a roadmap on each level and samples
every level through the roadmap of the level below.
"""

from .cspace import EuclideanBox, ProductSpace, QuotientDecomposition, RigidBody2D, Rotation2D
from .errors import (
    InconsistentProblemError,
    InvalidConfigurationError,
    InvalidLevelError,
    InvalidParameterError,
    InvalidQueryError,
    InvalidShapeError,
    InvalidStateError,
    QspError,
    SceneError,
)
from .geometry import BodyVolume, ConvexShape, Pose2
from .qmp import HeuristicsConfig, QuotientRoadmap, plan_qmp
from .roadmap import PathResult, Ptc, Roadmap, plan_prm, shortest_path
from .robots import FIXED_BASE, FREE_FLOATING, Link, RobotModel
from .scene import NestedRobotSequence, PlanningProblem, check_nesting
from .scenefile import load_bundled, load_scene, save_scene

__version__ = "0.1.0"

__all__ = [
    "BodyVolume",
    "ConvexShape",
    "EuclideanBox",
    "FIXED_BASE",
    "FREE_FLOATING",
    "HeuristicsConfig",
    "InconsistentProblemError",
    "InvalidConfigurationError",
    "InvalidLevelError",
    "InvalidParameterError",
    "InvalidQueryError",
    "InvalidShapeError",
    "InvalidStateError",
    "Link",
    "NestedRobotSequence",
    "PathResult",
    "PlanningProblem",
    "Pose2",
    "ProductSpace",
    "Ptc",
    "QspError",
    "QuotientDecomposition",
    "QuotientRoadmap",
    "RigidBody2D",
    "Roadmap",
    "RobotModel",
    "Rotation2D",
    "SceneError",
    "check_nesting",
    "load_bundled",
    "load_scene",
    "plan_prm",
    "plan_qmp",
    "save_scene",
    "shortest_path",
]
