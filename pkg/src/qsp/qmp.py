"""Quotient-space roadmap planner (QMP).

Each level ``k`` of a nested robot sequence owns a roadmap on ``M_k``.  Level
``k > 1`` samples its base from the level-(k-1) roadmap (random vertex, random
incident edge, uniform point on it) and its fiber uniformly; it measures
distance as graph distance on the parent roadmap plus fiber distance, and
connects vertices by travelling along parent-roadmap edges.  The planner grows
whichever active level is least dense and moves to the next level once the
current one has a start-goal path.

Every level-k vertex remembers its *anchor*: the point of the parent roadmap
its base was drawn from, stored as ``(a, b, s, offset)`` meaning the point at
fraction ``s`` along parent edge ``a -> b`` (``a == b`` for a vertex) plus the
metric length of a thickening offset.  Parent roadmaps only ever grow, so
anchors stay valid for the whole run.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .errors import InconsistentProblemError, InvalidParameterError, InvalidStateError
from .roadmap import GrowthReport, PathResult, PlanOutcome, Ptc, Roadmap, grow_prm, shortest_path
from .scene import PlanningProblem, project_problem
from .robots import FREE_FLOATING

log = logging.getLogger(__name__)

# Configurations per validity batch while walking a graph-constrained connection.
CONNECT_CHUNK = 48
# Connection waypoints closer than this fraction of the resolution to an
# existing vertex (same quantization cell) reuse that vertex.
MERGE_FRACTION = 0.1


@dataclass(frozen=True)
class HeuristicsConfig:
    """Switches and parameters of the three QMP heuristics.

    ``shortest_path_bias``: draw the base from the parent solution path with
    probability ``p0 * N0 / (N0 + n)`` after ``n`` such draws.
    ``thicken``: add a uniform offset of metric radius ``epsilon`` to the base.
    ``inflate``: scale nested free-floating robots by ``delta`` (gives up
    completeness, off by default).
    """

    shortest_path_bias: bool = True
    p0: float = 0.8
    halflife: int = 100
    thicken: bool = True
    epsilon: float = 0.01
    inflate: bool = False
    delta: float = 1.2

    def __post_init__(self):
        if not 0.0 <= self.p0 <= 1.0:
            raise InvalidParameterError("bias probability must lie in [0, 1]")
        if self.halflife <= 0:
            raise InvalidParameterError("bias half-life must be positive")
        if not self.epsilon >= 0.0:
            raise InvalidParameterError("thickening radius must be >= 0")
        if not self.delta > 0.0:
            raise InvalidParameterError("inflation factor must be positive")

    @classmethod
    def disabled(cls):
        return cls(shortest_path_bias=False, thicken=False, inflate=False)

    @classmethod
    def for_problem(cls, problem: PlanningProblem, **overrides):
        p = problem.planner
        fields = dict(p0=p.bias, halflife=p.bias_halflife, epsilon=problem.epsilon, delta=p.delta)
        fields.update(overrides)
        return cls(**fields)

    def bias_probability(self, n):
        return self.p0 * self.halflife / (self.halflife + n)

    def to_dict(self):
        return {
            "shortest_path_bias": self.shortest_path_bias,
            "p0": self.p0,
            "halflife": self.halflife,
            "thicken": self.thicken,
            "epsilon": self.epsilon,
            "inflate": self.inflate,
            "delta": self.delta,
        }


class _Anchors:
    """Growable columns (a, b, s, offset, edge length) indexed by level-k vertex."""

    def __init__(self, capacity=128):
        self.n = 0
        self.a = np.empty(capacity, dtype=np.int64)
        self.b = np.empty(capacity, dtype=np.int64)
        self.s = np.empty(capacity)
        self.off = np.empty(capacity)
        self.length = np.empty(capacity)

    def append(self, a, b, s, off, length):
        if self.n == len(self.a):
            for name in ("a", "b", "s", "off", "length"):
                old = getattr(self, name)
                new = np.empty(2 * len(old), dtype=old.dtype)
                new[: self.n] = old[: self.n]
                setattr(self, name, new)
        i = self.n
        self.a[i], self.b[i], self.s[i], self.off[i], self.length[i] = a, b, s, off, length
        self.n += 1

    def get(self, i):
        return int(self.a[i]), int(self.b[i]), float(self.s[i]), float(self.off[i])


class QuotientRoadmap:
    """Per-level planner state: start/goal, spaces, roadmap, solution, density.

    ``density`` is the maintained value of
    ``|G_k| / (mu(C_k) * L_{k-1})`` (``|G_1| / mu(M_1)`` on the first level).
    Scheduling uses :meth:`priority`, which has growth *attempts* in the
    numerator so that it rises on every pop, including rejected samples.
    """

    def __init__(self, k, q_start, q_goal, fiber, space, parent, validity, resolution, min_length, decomposition):
        self.level = k
        self.q_start = np.asarray(q_start, dtype=float)
        self.q_goal = np.asarray(q_goal, dtype=float)
        self.fiber = fiber
        self.space = space
        self.graph = Roadmap(space)
        self.solution = PathResult.unsolved()
        self.density = 0.0
        self.parent = parent
        self.attempts = 0
        self.validity = validity
        self.resolution = resolution
        self.min_length = min_length
        self.decomposition = decomposition
        self.path_samples = 0
        self.anchors = _Anchors() if k > 1 else None
        self._base_dim = space.dim - fiber.dim
        self._fibers = np.empty((128, fiber.dim))
        self._merge_cell = MERGE_FRACTION * resolution / np.sqrt(space.axis_weights)
        self._cells = {}

    @property
    def base_space(self):
        return None if self.parent is None else self.parent.space

    def parent_length(self):
        return max(self.parent.graph.total_length, self.min_length)

    def priority(self):
        if self.parent is None:
            return self.attempts / self.space.measure()
        return self.attempts / (self.fiber.measure() * self.parent_length())

    def refresh_density(self):
        """Update the maintained density from the incrementally kept totals."""
        n = len(self.graph)
        if self.parent is None:
            self.density = n / self.space.measure()
        else:
            self.density = n / (self.fiber.measure() * self.parent_length())
        return self.density

    # -- vertices with anchors --------------------------------------------------
    def add_vertex(self, q, anchor=None):
        i = self.graph.add_vertex(q)
        if self.anchors is not None:
            a, b, s, off = anchor
            self.anchors.append(a, b, s, off, self.parent.graph.adj[a].get(b, 0.0))
            if i == len(self._fibers):
                grown = np.empty((2 * len(self._fibers), self.fiber.dim))
                grown[:i] = self._fibers[:i]
                self._fibers = grown
            self._fibers[i] = q[self._base_dim:]
            self._cells.setdefault(self._cell_key(q), i)
        return i

    def _cell_key(self, q):
        return tuple(np.floor(np.asarray(q) / self._merge_cell).astype(np.int64).tolist())

    def vertex_near(self, q):
        """An existing vertex in the same merge cell as ``q``, or None."""
        return self._cells.get(self._cell_key(q))

    def base_of(self, q):
        return np.asarray(q)[..., : self._base_dim]

    def fiber_of(self, q):
        return np.asarray(q)[..., self._base_dim:]

    def anchor_point(self, anchor):
        return _edge_point(self.parent.graph, *anchor[:3])


def init_quotient_roadmap(problem: PlanningProblem, k, parent=None, q_start=None, q_goal=None, resolution=None):
    """Fresh level-k state seeded with the projected start and goal."""
    d = problem.decomposition
    if q_start is None:
        q_start = d.project_to(problem.K, problem.q_start, k)
    if q_goal is None:
        q_goal = d.project_to(problem.K, problem.q_goal, k)
    if (parent is None) != (k == 1):
        raise InvalidStateError("level k > 1 needs its parent level (and level 1 has none)")
    for label, q in (("start", q_start), ("goal", q_goal)):
        if not problem.is_valid(k, q):
            raise InconsistentProblemError(f"projected {label} infeasible at level {k}")
    qr = QuotientRoadmap(
        k,
        problem.space(k).normalize(q_start),
        problem.space(k).normalize(q_goal),
        d.fiber(k),
        d.space(k),
        parent,
        problem.checker(k).batch,
        resolution or problem.resolution,
        1e-6 * problem.workspace_diagonal,
        d,
    )
    for q in (qr.q_start, qr.q_goal):
        anchor = None
        if parent is not None:
            anchor = map_to_graph(parent.graph, qr.base_of(q))
        qr.add_vertex(q, anchor)
    return qr


def density(qr: QuotientRoadmap):
    """Vertex density of a level, recomputed from scratch."""
    n = len(qr.graph)
    if n == 0:
        return 0.0
    if qr.parent is None:
        return n / qr.space.measure()
    parent_length = max(qr.parent.graph.recomputed_total_length(), qr.min_length)
    return n / (qr.fiber.measure() * parent_length)


# -- sampling ---------------------------------------------------------------------


def sample_graph_rve(g: Roadmap, rng, return_anchor=False):
    """Random-vertex-edge sample: uniform vertex, uniform incident edge, uniform point."""
    if len(g) == 0:
        raise InvalidStateError("cannot sample an empty graph")
    v = int(rng.integers(len(g)))
    nbrs = g.adj[v]
    if not nbrs:
        q, anchor = g.vertex(v).copy(), (v, v, 0.0)
    else:
        keys = list(nbrs)
        w = keys[int(rng.integers(len(keys)))]
        t = float(rng.random())
        q, anchor = g.space.interpolate(g.vertex(v), g.vertex(w), t), (v, w, t)
    return (q, anchor) if return_anchor else q


def _sample_solution_path(parent: QuotientRoadmap, rng):
    """Point uniform in arc length along the parent's solution path."""
    ids = parent.solution.vertex_ids
    g = parent.graph
    if len(ids) == 1:
        return g.vertex(ids[0]).copy(), (ids[0], ids[0], 0.0)
    cum = np.cumsum([g.adj[u][v] for u, v in zip(ids, ids[1:])])
    x = float(rng.random()) * cum[-1]
    i = min(bisect.bisect_right(cum, x), len(cum) - 1)
    start = cum[i - 1] if i > 0 else 0.0
    t = (x - start) / (cum[i] - start)
    t = min(max(t, 0.0), 1.0)
    u, v = ids[i], ids[i + 1]
    return g.space.interpolate(g.vertex(u), g.vertex(v), t), (u, v, t)


def sample_level(qr: QuotientRoadmap, h: HeuristicsConfig, rng, return_anchor=False):
    """Draw ``q_rand`` for level ``k``: a parent-roadmap base times a uniform fiber."""
    if qr.parent is None:
        q = qr.space.sample_uniform(rng)
        return (q, None) if return_anchor else q
    parent = qr.parent
    if len(parent.graph) == 0:
        raise InvalidStateError("parent roadmap is empty")
    use_path = (
        h.shortest_path_bias
        and parent.solution.solved
        and float(rng.random()) < h.bias_probability(qr.path_samples)
    )
    if use_path:
        base, (a, b, s) = _sample_solution_path(parent, rng)
        qr.path_samples += 1
    else:
        base, (a, b, s) = sample_graph_rve(parent.graph, rng, return_anchor=True)
    offset = 0.0
    if h.thicken and h.epsilon > 0.0:
        space = parent.space
        moved = space.clamp(base + space.unit_ball_offset(rng, h.epsilon))
        offset = space.distance(base, moved)
        base = moved
    fiber = qr.fiber.sample_uniform(rng)
    q = np.concatenate([base, fiber])
    return (q, (a, b, s, offset)) if return_anchor else q


# -- graph metric -------------------------------------------------------------------


def map_to_graph(g: Roadmap, base):
    """Nearest roadmap point to ``base``: the nearest vertex, refined onto its edges.

    Returns an anchor ``(a, b, s, offset)``.
    """
    if len(g) == 0:
        raise InvalidStateError("cannot map onto an empty graph")
    space = g.space
    v = g.nearest(base, 1)[0]
    best = (space.distance(base, g.vertex(v)), v, v, 0.0)
    w_axis = space.axis_weights
    rel = space.difference(g.vertex(v), base)
    for w in g.adj[v]:
        edge = space.difference(g.vertex(v), g.vertex(w))
        denom = float((edge * edge * w_axis).sum())
        t = min(max(float((rel * edge * w_axis).sum()) / denom, 0.0), 1.0)
        dist = space.distance(base, space.interpolate(g.vertex(v), g.vertex(w), t))
        if dist < best[0]:
            best = (dist, v, w, t)
    dist, a, b, s = best
    return (a, b, s, dist)


class _Field:
    """Shortest-path distances on the parent graph from one anchor."""

    def __init__(self, g: Roadmap, anchor):
        a, b, s, off = anchor
        self.anchor = anchor
        dist, pred = dijkstra(g.csr(), directed=False, indices=[a, b], return_predecessors=True)
        self.dist = dist
        self.pred = pred
        self.edge_len = g.adj[a].get(b, 0.0)
        ca, cb = s * self.edge_len, (1.0 - s) * self.edge_len
        self.entry_cost = (ca, cb)
        self.to_vertex = np.minimum(ca + dist[0], cb + dist[1])

    def to_anchors(self, A, B, S, OFF, LEN):
        """Graph distance from this anchor to arrays of anchors (offsets included)."""
        a, b, s, off = self.anchor
        d = np.minimum(self.to_vertex[A] + S * LEN, self.to_vertex[B] + (1.0 - S) * LEN)
        if self.edge_len > 0.0:
            fwd = (A == a) & (B == b)
            rev = (A == b) & (B == a)
            if fwd.any():
                d[fwd] = np.minimum(d[fwd], np.abs(S[fwd] - s) * self.edge_len)
            if rev.any():
                d[rev] = np.minimum(d[rev], np.abs((1.0 - S[rev]) - s) * self.edge_len)
        return d + OFF + off


def graph_distance(g: Roadmap, anchor_a, anchor_b):
    f = _Field(g, anchor_a)
    a, b, s, off = anchor_b
    return float(
        f.to_anchors(
            np.array([a]), np.array([b]), np.array([s]), np.array([off]), np.array([g.adj[a].get(b, 0.0)])
        )[0]
    )


def graph_metric(qr: QuotientRoadmap, a, b):
    """Parent-graph distance between the bases plus fiber distance.

    Bases are mapped to their nearest parent-roadmap points; returns ``inf``
    when those points lie in different components.  On level 1 this is the
    plain metric.
    """
    if qr.parent is None:
        return qr.space.distance(a, b)
    g = qr.parent.graph
    da = map_to_graph(g, qr.base_of(a))
    db = map_to_graph(g, qr.base_of(b))
    return graph_distance(g, da, db) + qr.fiber.distance(qr.fiber_of(a), qr.fiber_of(b))


def _graph_nearest(qr: QuotientRoadmap, r_idx, field: _Field, R):
    n = len(qr.graph)
    an = qr.anchors
    gd = field.to_anchors(an.a[:n], an.b[:n], an.s[:n], an.off[:n], an.length[:n])
    fd = qr.fiber.distance(qr._fibers[r_idx], qr._fibers[:n])
    total = np.atleast_1d(gd + fd)
    total[r_idx] = np.inf
    finite = np.flatnonzero(np.isfinite(total))
    if finite.size == 0:
        return []
    order = finite[np.lexsort((finite, total[finite]))]
    return [int(i) for i in order[:R]]


# -- graph-constrained connection ---------------------------------------------------------


def _base_route(qr: QuotientRoadmap, near_anchor, field: _Field):
    """Parent-graph route from ``near_anchor`` to the field's anchor.

    Returns ``(first, chain, last)``: the stretch on the near anchor's edge,
    the parent vertices visited, and the stretch on the far anchor's edge.
    ``chain`` is None for a direct move along a shared edge and the whole
    result is None when the anchors are disconnected.
    """
    g = qr.parent.graph
    a_n, b_n, s_n, _ = near_anchor
    a_r, b_r, s_r, _ = field.anchor
    len_n = g.adj[a_n].get(b_n, 0.0)
    best = None
    for end, cost_n in ((a_n, s_n * len_n), (b_n, (1.0 - s_n) * len_n)):
        for row in (0, 1):
            c = cost_n + field.dist[row][end] + field.entry_cost[row]
            if best is None or c < best[0]:
                best = (c, end, row)
    if len_n > 0.0 and {a_n, b_n} == {a_r, b_r}:
        s_target = s_r if (a_n, b_n) == (a_r, b_r) else 1.0 - s_r
        if abs(s_target - s_n) * len_n <= best[0]:
            return (a_n, b_n, s_n, s_target), None, None
    cost, end, row = best
    if not math.isfinite(cost):
        return None
    src = (a_r, b_r)[row]
    chain = [end]
    pred = field.pred[row]
    while chain[-1] != src:
        chain.append(int(pred[chain[-1]]))
    first = (a_n, b_n, s_n, 0.0 if end == a_n else 1.0)
    last = (a_r, b_r, 0.0 if src == a_r else 1.0, s_r)
    return first, chain, last


def _edge_point(g, a, b, s):
    if a == b or s == 0.0:
        return g.vertex(a).copy()
    if s == 1.0:
        return g.vertex(b).copy()
    return g.space.interpolate(g.vertex(a), g.vertex(b), s)


def _stretch_end_anchor(stretch):
    a, b, _, s1 = stretch
    if s1 == 0.0:
        return (a, a, 0.0, 0.0)
    if s1 == 1.0:
        return (b, b, 0.0, 0.0)
    return (a, b, s1, 0.0)


@dataclass
class _PLPath:
    waypoints: list
    anchors: list
    complete: bool


def _connect(qr: QuotientRoadmap, near, rand, field: _Field):
    """Graph-constrained connection from vertex ``near`` toward vertex ``rand``."""
    g_parent = qr.parent.graph
    bspace = g_parent.space
    q_near = qr.graph.vertex(near).copy()
    q_rand = qr.graph.vertex(rand).copy()
    near_anchor = qr.anchors.get(near)
    rand_anchor = qr.anchors.get(rand)
    route = _base_route(qr, near_anchor, field)
    if route is None:
        return _PLPath([q_near], [near_anchor], False)
    first, chain, last = route

    # Corner points of the base polyline.  ``stretches[i]`` describes how the
    # piece ending at point i lies relative to the parent graph.
    near_point = _edge_point(g_parent, *near_anchor[:3])
    rand_point = _edge_point(g_parent, *rand_anchor[:3])
    points = [qr.base_of(q_near), near_point]
    anchors = [near_anchor, near_anchor[:3] + (0.0,)]
    stretches = [None, ("off", near_anchor[:3], near_point)]
    if chain is None:
        points.append(rand_point)
        anchors.append(first[:2] + (first[3], 0.0))
        stretches.append(("edge",) + first)
    else:
        points.append(g_parent.vertex(chain[0]))
        anchors.append(_stretch_end_anchor(first))
        stretches.append(("edge",) + first)
        for u, v in zip(chain, chain[1:]):
            points.append(g_parent.vertex(v))
            anchors.append((v, v, 0.0, 0.0))
            stretches.append(("edge", u, v, 0.0, 1.0))
        points.append(rand_point)
        anchors.append(last[:2] + (last[3], 0.0))
        stretches.append(("edge",) + last)
    points.append(qr.base_of(q_rand))
    anchors.append(rand_anchor)
    stretches.append(("off", rand_anchor[:3], rand_point))

    P = np.array(points)
    seg = np.atleast_1d(bspace.distance(P[:-1], P[1:]))
    keep = np.concatenate([[True], seg > 0.0])
    if not keep[-1]:
        # The far end coincides with the previous corner; keep the end instead.
        prev = np.flatnonzero(keep[:-1])[-1]
        keep[-1] = True
        if prev > 0:
            keep[prev] = False
    idx = np.flatnonzero(keep)
    P = P[idx]
    anchors = [anchors[i] for i in idx]
    stretches = [stretches[i] for i in idx]
    cum = np.concatenate([[0.0], np.cumsum(np.atleast_1d(bspace.distance(P[:-1], P[1:])))])
    total = cum[-1]
    f_near, f_rand = qr.fiber_of(q_near), qr.fiber_of(q_rand)
    if total == 0.0 or len(P) < 2:
        W = np.array([q_near, q_rand])
        anchors = [near_anchor, rand_anchor]
        stretches = [None, None]
    else:
        fracs = np.minimum(cum / total, 1.0)
        W = np.concatenate([P, np.atleast_2d(qr.fiber.interpolate(f_near, f_rand, fracs))], axis=1)
        W[0] = q_near
        W[-1] = q_rand

    # Validate the whole polyline in chunks and truncate at the first collision.
    space = qr.space
    lengths = np.atleast_1d(space.distance(W[:-1], W[1:]))
    n_steps = np.maximum(1, np.ceil(lengths / qr.resolution)).astype(np.int64)
    seg_of = np.repeat(np.arange(len(n_steps)), n_steps)
    offsets = np.concatenate([[0], np.cumsum(n_steps)[:-1]])
    step_of = np.arange(len(seg_of)) - offsets[seg_of] + 1
    t = step_of / n_steps[seg_of]
    deltas = space.difference(W[:-1], W[1:])
    configs = space.normalize(W[seg_of] + t[:, None] * deltas[seg_of])
    ends = step_of == n_steps[seg_of]
    configs[ends] = W[seg_of[ends] + 1]
    fail = None
    for lo in range(0, len(configs), CONNECT_CHUNK):
        ok = qr.validity(configs[lo : lo + CONNECT_CHUNK])
        if not ok.all():
            fail = lo + int(np.argmin(ok))
            break
    waypoints = list(W)
    if fail is None:
        return _PLPath(waypoints, anchors, True)
    if fail == 0:
        return _PLPath([q_near], [near_anchor], False)
    i, step = int(seg_of[fail - 1]), int(step_of[fail - 1])
    if step == n_steps[i]:
        return _PLPath(waypoints[: i + 2], anchors[: i + 2], False)
    q_new = configs[fail - 1]
    anchor = _interior_anchor(qr, stretches[i + 1], step / n_steps[i], q_new)
    return _PLPath(waypoints[: i + 1] + [q_new], anchors[: i + 1] + [anchor], False)


def _interior_anchor(qr, stretch, tau, q):
    g_parent = qr.parent.graph
    if stretch is not None and stretch[0] == "edge":
        _, a, b, s0, s1 = stretch
        return (a, b, s0 + tau * (s1 - s0), 0.0)
    if stretch is not None and stretch[0] == "off":
        (a, b, s), p = stretch[1], stretch[2]
        return (a, b, s, g_parent.space.distance(p, qr.base_of(q)))
    return map_to_graph(g_parent, qr.base_of(q))


def connect_along_graph(qr: QuotientRoadmap, near, rand):
    """Piecewise-linear connection between level-k vertices ``near`` -> ``rand``.

    The base follows the parent-roadmap shortest path, the fiber moves
    linearly in base arc length, and a waypoint is emitted at each parent
    vertex crossed.  The walk stops at the last valid configuration.
    """
    if qr.parent is None:
        raise InvalidStateError("graph-constrained connection needs a parent level")
    field = _Field(qr.parent.graph, qr.anchors.get(rand))
    return _connect(qr, near, rand, field).waypoints


def _add_pl_path(qr: QuotientRoadmap, near, rand, pl: _PLPath, report: GrowthReport):
    if len(pl.waypoints) < 2:
        return
    ids = [near]
    last = len(pl.waypoints) - 1
    for j in range(1, last + 1):
        if j == last and pl.complete:
            ids.append(rand)
            continue
        v = qr.vertex_near(pl.waypoints[j])
        if v is None:
            v = qr.add_vertex(pl.waypoints[j], pl.anchors[j])
            report.added_vertices.append(v)
        ids.append(v)
    for u, v in zip(ids, ids[1:]):
        if qr.graph.add_edge(u, v):
            report.added_edges.append((u, v))


def grow_qmp(qr: QuotientRoadmap, h: HeuristicsConfig, rng, R=10) -> GrowthReport:
    """One growth step of level ``k`` (identical to PRM growth on level 1)."""
    qr.attempts += 1
    if qr.parent is None:
        return grow_prm(qr.graph, qr.space, qr.validity, rng, R, qr.resolution)
    q_rand, anchor = sample_level(qr, h, rng, return_anchor=True)
    if not qr.validity(q_rand[None, :])[0]:
        return GrowthReport(q_rand, True)
    r = qr.add_vertex(q_rand, anchor)
    report = GrowthReport(q_rand, False, [r])
    field = _Field(qr.parent.graph, qr.anchors.get(r))
    for near in _graph_nearest(qr, r, field, R):
        _add_pl_path(qr, near, r, _connect(qr, near, r, field), report)
    return report


def plan_qmp(problem: PlanningProblem, ptc: Ptc, h: HeuristicsConfig, rng, neighbors=None, resolution=None):
    """Plan over every level of ``problem``'s nested robot sequence.

    Returns a :class:`~qsp.roadmap.PlanOutcome` whose ``levels`` hold the
    per-level state (graphs, solutions, densities) and whose ``grow_log``
    records which level was grown at each iteration.
    """
    if h.inflate:
        problem = problem.with_inflated_nested(h.delta)
    project_problem(problem)
    R = neighbors or problem.planner.neighbors
    if R < 1:
        raise InvalidParameterError("neighbor count must be >= 1")
    clock = ptc.clock()
    levels = []
    grow_log = []
    for k in range(1, problem.K + 1):
        parent = levels[-1] if levels else None
        qr = init_quotient_roadmap(problem, k, parent, resolution=resolution)
        levels.append(qr)
        if np.array_equal(qr.q_start, qr.q_goal):
            qr.solution = shortest_path(qr.graph, 0, 0)
        while not qr.solution.solved and not clock.fired():
            target = min(levels, key=lambda q: (q.priority(), q.level))
            grow_qmp(target, h, rng, R)
            clock.tick()
            grow_log.append(target.level)
            target.refresh_density()
            if target.level < len(levels):
                levels[target.level].refresh_density()
            if qr.graph.connected(0, 1):
                qr.solution = shortest_path(qr.graph, 0, 1)
                log.debug("qmp level %d solved at iteration %d", k, clock.iterations)
        if not qr.solution.solved:
            break
    top = levels[-1]
    path = top.solution if len(levels) == problem.K and top.solution.solved else PathResult.unsolved()
    return PlanOutcome(
        path,
        [q.graph for q in levels],
        clock.iterations,
        clock.elapsed,
        levels=levels,
        grow_log=grow_log,
    )


def default_heuristics(problem: PlanningProblem, enabled=True):
    if not enabled:
        return HeuristicsConfig.disabled()
    kind = problem.sequence.robot(problem.K).kind
    eps = problem.planner.epsilon
    if eps is None:
        eps = 0.01 if kind == FREE_FLOATING else 0.1
    return HeuristicsConfig.for_problem(problem, epsilon=eps)
