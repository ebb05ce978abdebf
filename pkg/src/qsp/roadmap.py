"""Roadmap graphs and the baseline probabilistic roadmap planner."""

from __future__ import annotations

import heapq
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .errors import InvalidParameterError, InvalidQueryError

log = logging.getLogger(__name__)

SOLVED = "solved"
UNSOLVED = "unsolved"

# Validity is evaluated in chunks of this many steps so blocked edges stop early.
CONNECT_CHUNK = 24


class Roadmap:
    """Undirected weighted graph of configurations.

    Edge weights are metric distances between endpoints.  The vertex count
    and the total edge length are maintained incrementally, as is a
    union-find structure used for connectivity queries.
    """

    def __init__(self, space, capacity=128):
        self.space = space
        self._verts = np.empty((capacity, space.dim))
        self.n = 0
        self.adj = []
        self.edges = []
        self.edge_lengths = []
        self.total_length = 0.0
        self._uf = []
        self.version = 0
        self._csr = None
        self._csr_version = -1

    def __len__(self):
        return self.n

    @property
    def vertices(self):
        return self._verts[: self.n]

    def vertex(self, i):
        return self._verts[i]

    def add_vertex(self, q) -> int:
        if self.n == len(self._verts):
            grown = np.empty((2 * len(self._verts), self.space.dim))
            grown[: self.n] = self._verts[: self.n]
            self._verts = grown
        self._verts[self.n] = q
        self.adj.append({})
        self._uf.append(self.n)
        self.n += 1
        self.version += 1
        return self.n - 1

    def add_edge(self, i, j, length=None) -> bool:
        """Add edge ``i``-``j``; returns False for self-loops, duplicates and zero length."""
        if i == j or j in self.adj[i]:
            return False
        if length is None:
            length = self.space.distance(self._verts[i], self._verts[j])
        if not length > 0.0:
            return False
        self.adj[i][j] = length
        self.adj[j][i] = length
        self.edges.append((i, j))
        self.edge_lengths.append(length)
        self.total_length += length
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self._uf[max(ri, rj)] = min(ri, rj)
        self.version += 1
        return True

    def find(self, i):
        uf = self._uf
        root = i
        while uf[root] != root:
            root = uf[root]
        while uf[i] != root:
            uf[i], i = root, uf[i]
        return root

    def connected(self, i, j):
        return self.find(i) == self.find(j)

    def recomputed_total_length(self):
        return math.fsum(self.space.distance(self._verts[i], self._verts[j]) for i, j in self.edges)

    def nearest(self, q, r, exclude=()):
        """Indices of the ``r`` nearest vertices to ``q`` (ties by insertion index)."""
        if self.n == 0:
            return []
        d = self.space.distance(q, self.vertices)
        d = np.atleast_1d(d)
        for i in exclude:
            d[i] = np.inf
        order = np.argsort(d, kind="stable")[:r]
        return [int(i) for i in order if np.isfinite(d[i])]

    def index_of(self, q, tol=1e-12):
        if self.n == 0:
            return None
        d = np.atleast_1d(self.space.distance(q, self.vertices))
        i = int(np.argmin(d))
        return i if d[i] <= tol else None

    def csr(self):
        """Sparse adjacency (upper triangle) for scipy's graph routines."""
        if self._csr_version != self.version:
            if self.edges:
                e = np.asarray(self.edges)
                w = np.asarray(self.edge_lengths)
                self._csr = csr_matrix((w, (e[:, 0], e[:, 1])), shape=(self.n, self.n))
            else:
                self._csr = csr_matrix((self.n, self.n))
            self._csr_version = self.version
        return self._csr

    def to_dict(self, level=None):
        return {
            "level": level,
            "dim": self.space.dim,
            "vertices": [[float(v) for v in row] for row in self.vertices],
            "edges": [[int(i), int(j)] for i, j in self.edges],
            "total_length": self.total_length,
        }


@dataclass
class PathResult:
    waypoints: list
    length: float
    status: str
    vertex_ids: list = field(default_factory=list)

    @property
    def solved(self):
        return self.status == SOLVED

    @classmethod
    def unsolved(cls):
        return cls([], 0.0, UNSOLVED, [])


def shortest_path(g: Roadmap, q_start, q_goal) -> PathResult:
    """Dijkstra on summed edge lengths.

    ``q_start``/``q_goal`` are vertex indices or configurations that are
    vertices of ``g``.  Among equally short paths the one whose predecessor
    indices are lexicographically smallest is returned.
    """
    s = _resolve_vertex(g, q_start)
    t = _resolve_vertex(g, q_goal)
    if s == t:
        return PathResult([g.vertex(s).copy()], 0.0, SOLVED, [s])
    if not g.connected(s, t):
        return PathResult.unsolved()
    dist = {s: 0.0}
    pred = {s: -1}
    done = set()
    heap = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == t:
            break
        for v, w in g.adj[u].items():
            if v in done:
                continue
            nd = d + w
            old = dist.get(v, math.inf)
            if nd < old or (nd == old and u < pred[v]):
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    ids = [t]
    while ids[-1] != s:
        ids.append(pred[ids[-1]])
    ids.reverse()
    return PathResult([g.vertex(i).copy() for i in ids], dist[t], SOLVED, ids)


def _resolve_vertex(g, q):
    if isinstance(q, (int, np.integer)):
        if not 0 <= q < g.n:
            raise InvalidQueryError(f"vertex {q} not in graph")
        return int(q)
    i = g.index_of(np.asarray(q, dtype=float))
    if i is None:
        raise InvalidQueryError("configuration is not a vertex of the graph")
    return i


@dataclass(frozen=True)
class Ptc:
    """Planner termination condition; with no limits it means first solution."""

    time_limit: float | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if self.time_limit is not None and not self.time_limit > 0:
            raise InvalidParameterError("time limit must be positive")
        if self.max_iterations is not None and not self.max_iterations > 0:
            raise InvalidParameterError("iteration limit must be positive")

    @classmethod
    def first_solution(cls):
        return cls()

    def clock(self):
        return _PtcClock(self)

    def to_dict(self):
        return {"time_limit": self.time_limit, "max_iterations": self.max_iterations}


class _PtcClock:
    def __init__(self, ptc):
        self.ptc = ptc
        self.start = time.perf_counter()
        self.iterations = 0

    def tick(self):
        self.iterations += 1

    @property
    def elapsed(self):
        return time.perf_counter() - self.start

    def fired(self):
        p = self.ptc
        if p.max_iterations is not None and self.iterations >= p.max_iterations:
            return True
        return p.time_limit is not None and self.elapsed >= p.time_limit


def connect_straight(space, a, b, validity, resolution):
    """Walk from ``a`` toward ``b`` and return the last valid configuration.

    ``validity`` maps an (n, dim) batch to a boolean array.  Steps are at most
    ``resolution`` apart in the metric.  Returns ``b`` itself when the whole
    segment is free and ``a`` when the first step is blocked.
    """
    if not resolution > 0:
        raise InvalidParameterError("resolution must be positive")
    d = space.distance(a, b)
    if d == 0.0:
        return np.asarray(a, dtype=float).copy()
    steps = max(1, math.ceil(d / resolution))
    last = np.asarray(a, dtype=float).copy()
    for lo in range(1, steps + 1, CONNECT_CHUNK):
        ts = np.arange(lo, min(lo + CONNECT_CHUNK, steps + 1)) / steps
        qs = space.interpolate(a, b, ts)
        ok = validity(qs)
        if not ok.all():
            k = int(np.argmin(ok))
            return qs[k - 1] if k > 0 else last
        last = qs[-1]
    return np.asarray(space.normalize(b), dtype=float)


@dataclass
class GrowthReport:
    sample: np.ndarray | None
    rejected: bool
    added_vertices: list = field(default_factory=list)
    added_edges: list = field(default_factory=list)


def grow_prm(g: Roadmap, space, validity, rng, R=10, resolution=0.1) -> GrowthReport:
    """One PRM growth step: sample, and connect from the R nearest vertices."""
    if R < 1:
        raise InvalidParameterError("R must be >= 1")
    q_rand = space.sample_uniform(rng)
    if not validity(q_rand[None, :])[0]:
        return GrowthReport(q_rand, True)
    r = g.add_vertex(q_rand)
    report = GrowthReport(q_rand, False, [r])
    for near in g.nearest(q_rand, R, exclude=(r,)):
        q_new = connect_straight(space, g.vertex(near), q_rand, validity, resolution)
        _attach(g, near, r, q_new, report)
    return report


def _attach(g, near, target, q_new, report):
    """Add the edge produced by a (possibly truncated) connection."""
    if np.array_equal(q_new, g.vertex(target)):
        if g.add_edge(near, target):
            report.added_edges.append((near, target))
    elif not np.array_equal(q_new, g.vertex(near)):
        v = g.add_vertex(q_new)
        report.added_vertices.append(v)
        if g.add_edge(near, v):
            report.added_edges.append((near, v))


@dataclass
class PlanOutcome:
    path: PathResult
    roadmaps: list
    iterations: int
    elapsed: float
    levels: list = field(default_factory=list)
    grow_log: list = field(default_factory=list)

    @property
    def solved(self):
        return self.path.solved

    @property
    def vertex_counts(self):
        return [len(g) for g in self.roadmaps]


def plan_prm(problem, ptc: Ptc, rng, level=None, neighbors=None, resolution=None) -> PlanOutcome:
    """Baseline PRM on one level of ``problem`` (default: the full robot).

    Both query configurations are inserted as the initial vertices.
    """
    k = problem.K if level is None else level
    space = problem.space(k)
    R = neighbors or problem.planner.neighbors
    res = resolution or problem.resolution
    q_start, q_goal = level_query(problem, k)
    validity = problem.checker(k).batch
    g = Roadmap(space)
    s = g.add_vertex(q_start)
    t = g.add_vertex(q_goal)
    clock = ptc.clock()
    path = PathResult.unsolved()
    if np.array_equal(q_start, q_goal):
        path = shortest_path(g, s, s)
    while not path.solved and not clock.fired():
        grow_prm(g, space, validity, rng, R, res)
        clock.tick()
        if g.connected(s, t):
            path = shortest_path(g, s, t)
    log.debug("prm level %d: %s after %d iterations, |G|=%d", k, path.status, clock.iterations, len(g))
    return PlanOutcome(path, [g], clock.iterations, clock.elapsed, grow_log=[k] * clock.iterations)


def level_query(problem, k):
    """Start and goal of ``problem`` projected to level ``k``; both must be feasible."""
    d = problem.decomposition
    out = []
    for label, q in (("start", problem.q_start), ("goal", problem.q_goal)):
        qk = d.project_to(problem.K, q, k)
        if not problem.is_valid(k, qk):
            raise InvalidQueryError(f"{label} configuration is infeasible at level {k}")
        out.append(problem.space(k).normalize(qk))
    return out
