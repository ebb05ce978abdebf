"""Brute-force ground truth on low-dimensional levels.

Every cell of a regular grid over a level's configuration space is marked
free or blocked by checking its center; reachability is breadth-first search
over face-adjacent cells (4-connected in 2-D, 6-connected in 3-D), with angle
axes wrapping around.  Scenes meant for this oracle keep at least two cells of
clearance so that verdicts do not depend on the resolution.
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .geometry import BodyVolume
from .scene import Checker, PlanningProblem

# Cell centers evaluated per collision batch.
GRID_BATCH = 8192


@dataclass(frozen=True)
class GridSpec:
    counts: tuple
    level: int

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not 1 <= len(counts) <= 3:
            raise InvalidParameterError("grids cover 1 to 3 dimensions")
        if any(c < 2 for c in counts):
            raise InvalidParameterError("every axis needs at least 2 cells")
        if self.level < 1:
            raise InvalidParameterError("levels start at 1")
        object.__setattr__(self, "counts", counts)

    @property
    def dim(self):
        return len(self.counts)

    @property
    def size(self):
        return int(np.prod(self.counts))

    def cell_sizes(self, space):
        return (space.upper - space.lower) / np.asarray(self.counts)

    def refined(self, factor=2):
        return GridSpec(tuple(c * factor for c in self.counts), self.level)

    def to_dict(self):
        return {"counts": list(self.counts), "level": self.level}


class _Grid:
    """Cell geometry of one grid over one space."""

    def __init__(self, space, spec: GridSpec):
        if space.dim != spec.dim:
            raise InvalidParameterError(f"grid has {spec.dim} axes, level space has {space.dim}")
        self.space = space
        self.spec = spec
        self.counts = np.asarray(spec.counts)
        self.lower = space.lower
        self.sizes = spec.cell_sizes(space)
        self.wrap = space.angle_mask

    def centers(self, flat=None):
        if flat is None:
            flat = np.arange(self.spec.size)
        idx = np.stack(np.unravel_index(flat, self.spec.counts), axis=-1)
        return self.lower + (idx + 0.5) * self.sizes

    def cell_of(self, q):
        q = self.space.normalize(q)
        idx = np.floor((q - self.lower) / self.sizes).astype(int)
        idx = np.clip(idx, 0, self.counts - 1)
        return int(np.ravel_multi_index(tuple(idx), self.spec.counts))

    def neighbors(self, flat):
        idx = np.array(np.unravel_index(flat, self.spec.counts))
        out = []
        for axis in range(self.spec.dim):
            for step in (-1, 1):
                j = idx.copy()
                j[axis] += step
                if j[axis] < 0 or j[axis] >= self.counts[axis]:
                    if not self.wrap[axis]:
                        continue
                    j[axis] %= self.counts[axis]
                out.append(int(np.ravel_multi_index(tuple(j), self.spec.counts)))
        return out


def free_cells(checker, grid: _Grid):
    free = np.empty(grid.spec.size, dtype=bool)
    for lo in range(0, grid.spec.size, GRID_BATCH):
        flat = np.arange(lo, min(lo + GRID_BATCH, grid.spec.size))
        free[flat] = checker.batch(grid.centers(flat))
    return free


@dataclass
class GridPlanResult:
    reachable: bool
    path: list
    reason: str = ""
    free_cells: int = 0

    def to_dict(self):
        return {"reachable": self.reachable, "reason": self.reason, "path_cells": len(self.path)}


def restricted(problem: PlanningProblem, blockers) -> PlanningProblem:
    """The same problem with extra obstacles (used to close off passages)."""
    parts = problem.environment.parts + BodyVolume.of(blockers).parts
    return replace(problem, environment=BodyVolume(parts), _checkers={})


def grid_plan(problem: PlanningProblem, grid: GridSpec, start=None, goal=None) -> GridPlanResult:
    """Breadth-first search between the cells holding the projected start and goal."""
    k = grid.level
    d = problem.decomposition
    space = problem.space(k)
    g = _Grid(space, grid)
    if start is None:
        start = d.project_to(problem.K, problem.q_start, k)
    if goal is None:
        goal = d.project_to(problem.K, problem.q_goal, k)
    checker = problem.checker(k)
    free = free_cells(checker, g)
    s, t = g.cell_of(start), g.cell_of(goal)
    for label, cell in (("start", s), ("goal", t)):
        if not free[cell]:
            return GridPlanResult(False, [], f"{label} cell is blocked", int(free.sum()))
    pred = np.full(grid.size, -1, dtype=np.int64)
    pred[s] = s
    queue = deque([s])
    while queue:
        u = queue.popleft()
        if u == t:
            break
        for v in g.neighbors(u):
            if free[v] and pred[v] < 0:
                pred[v] = u
                queue.append(v)
    if pred[t] < 0:
        return GridPlanResult(False, [], "no free cell path", int(free.sum()))
    cells = [t]
    while cells[-1] != s:
        cells.append(int(pred[cells[-1]]))
    cells.reverse()
    return GridPlanResult(True, list(g.centers(np.array(cells))), "", int(free.sum()))


@dataclass
class NecessaryConditionReport:
    violations: int
    per_level: dict
    examples: list
    cells_checked: int

    @property
    def ok(self):
        return self.violations == 0


def grid_necessary_condition(sequence, environment, grids, max_examples=5) -> NecessaryConditionReport:
    """Check, on every cell of each level's grid, that infeasible-below implies infeasible.

    ``grids`` maps level ``k`` (2..K) to a GridSpec over ``M_k``; the level-k
    cell center ``p o q`` is compared with its projection ``p``.
    """
    d = sequence.decomposition
    grids = dict(grids) if isinstance(grids, dict) else {g.level: g for g in grids}
    per_level, examples, checked = {}, [], 0
    for k in range(2, sequence.K + 1):
        if k not in grids:
            continue
        space = d.space(k)
        g = _Grid(space, grids[k])
        outer = Checker(sequence.robot(k), environment, space)
        inner = Checker(sequence.robot(k - 1), environment, d.space(k - 1))
        count = 0
        for lo in range(0, grids[k].size, GRID_BATCH):
            flat = np.arange(lo, min(lo + GRID_BATCH, grids[k].size))
            q = g.centers(flat)
            p = d.project(k, q)
            bad = ~inner.batch(p) & outer.batch(q)
            count += int(bad.sum())
            for i in np.flatnonzero(bad)[: max(0, max_examples - len(examples))]:
                examples.append((k, q[i]))
        per_level[k] = count
        checked += grids[k].size
    return NecessaryConditionReport(sum(per_level.values()), per_level, examples, checked)


# -- cached verdicts ---------------------------------------------------------------------


def verdict_key(scene_hash, grid: GridSpec, tag=""):
    payload = json.dumps({"scene": scene_hash, "grid": grid.to_dict(), "tag": tag}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def cached_grid_plan(problem, grid: GridSpec, cache_dir, scene_hash, tag="", blockers=()):
    """Grid verdict read from ``cache_dir`` if present, else computed and stored."""
    path = Path(cache_dir) / f"{verdict_key(scene_hash, grid, tag)}.json"
    if path.exists():
        return json.loads(path.read_text())
    target = restricted(problem, blockers) if blockers else problem
    result = grid_plan(target, grid)
    record = {"scene": scene_hash, "grid": grid.to_dict(), "tag": tag, **result.to_dict()}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, sort_keys=True, indent=1) + "\n")
    return record
