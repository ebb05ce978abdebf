"""Seeded benchmark runs and their summary statistics.

Each run is identified by (scene, planner, run index) and uses seed
``base_seed + run_index``; both planners see the same seeds.  Records hold
everything that is a function of the seed, so a fixed base seed with an
iteration limit reproduces the records file byte for byte.  Wall times are
written to a separate timings file because they are not reproducible.
"""

from __future__ import annotations

import functools
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, QspError
from .qmp import HeuristicsConfig, default_heuristics, plan_qmp
from .roadmap import Ptc, plan_prm
from .scenefile import resolve_scene

log = logging.getLogger(__name__)

PLANNERS = ("prm", "qmp")
RECORDS_FILE = "records.jsonl"
TIMINGS_FILE = "timings.jsonl"
SUMMARY_FILE = "summary.json"


@dataclass(frozen=True)
class RunSpec:
    scene: str
    planner: str
    run: int
    seed: int
    ptc: Ptc
    heuristics: dict | None = None  # overrides applied on top of the scene defaults
    heuristics_enabled: bool = True

    @property
    def key(self):
        return (self.scene, self.planner, self.run)


@dataclass
class BenchmarkRecord:
    scene: str
    planner: str
    run: int
    seed: int
    ptc: dict
    success: bool
    iterations: int
    vertices: list
    solution_length: float
    heuristics: dict | None
    error: str | None = None
    edge_lengths: list = field(default_factory=list)  # total roadmap edge length per level
    densities: list = field(default_factory=list)  # final vertex density per QMP level
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self):
        """One records-file line; excludes the wall time."""
        d = asdict(self)
        del d["wall_time"]
        return json.dumps(d, sort_keys=True, allow_nan=False)

    def timing_json(self):
        return json.dumps({"scene": self.scene, "planner": self.planner, "run": self.run, "wall_time": self.wall_time}, sort_keys=True)


@functools.lru_cache(maxsize=16)
def _problem(scene):
    # Bundled and file scenes are certified once by the caller; workers skip it.
    return resolve_scene(scene, certify=False)


def heuristics_for(problem, enabled=True, overrides=None) -> HeuristicsConfig:
    h = default_heuristics(problem, enabled)
    if overrides:
        h = HeuristicsConfig(**{**h.to_dict(), **overrides})
    return h


def run_once(spec: RunSpec, keep_outcome=False):
    """Execute one seeded run; planner errors are recorded rather than raised.

    Returns the record, or ``(record, outcome)`` with ``keep_outcome``
    (``outcome`` is None when the run failed with an error).
    """
    rng = np.random.default_rng(spec.seed)
    h_dict = None
    t0 = time.perf_counter()
    try:
        problem = _problem(spec.scene)
        if spec.planner == "prm":
            out = plan_prm(problem, spec.ptc, rng)
        elif spec.planner == "qmp":
            h = heuristics_for(problem, spec.heuristics_enabled, spec.heuristics)
            h_dict = h.to_dict()
            out = plan_qmp(problem, spec.ptc, h, rng)
        else:
            raise InvalidParameterError(f"unknown planner {spec.planner!r}")
    except QspError as exc:
        record = BenchmarkRecord(spec.scene, spec.planner, spec.run, spec.seed, spec.ptc.to_dict(), False, 0, [], 0.0,
                                 h_dict, f"{type(exc).__name__}: {exc}", time.perf_counter() - t0)
        return (record, None) if keep_outcome else record
    record = BenchmarkRecord(
        scene=spec.scene,
        planner=spec.planner,
        run=spec.run,
        seed=spec.seed,
        ptc=spec.ptc.to_dict(),
        success=out.solved,
        iterations=out.iterations,
        vertices=out.vertex_counts,
        solution_length=float(out.path.length) if out.solved else 0.0,
        heuristics=h_dict,
        edge_lengths=[float(g.total_length) for g in out.roadmaps],
        densities=[float(qr.density) for qr in out.levels],
        wall_time=out.elapsed,
    )
    return (record, out) if keep_outcome else record


def make_specs(scenes, planners, runs, ptc, base_seed=0, heuristics=None, heuristics_enabled=True):
    if runs < 1:
        raise InvalidParameterError("runs must be >= 1")
    for p in planners:
        if p not in PLANNERS:
            raise InvalidParameterError(f"unknown planner {p!r}")
    return [
        RunSpec(scene, planner, i, base_seed + i, ptc, heuristics, heuristics_enabled)
        for scene in scenes
        for planner in planners
        for i in range(runs)
    ]


def run_benchmark(specs, jobs=1):
    """Run every spec, serially or in a process pool; records come back sorted by key."""
    if jobs < 1:
        raise InvalidParameterError("jobs must be >= 1")
    if jobs == 1 or len(specs) <= 1:
        records = [run_once(s) for s in specs]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(run_once, specs, chunksize=1))
    records.sort(key=lambda r: (r.scene, r.planner, r.run))
    return records


def quartiles(values):
    """(q1, median, q3) with linear interpolation between order statistics."""
    if not values:
        return (None, None, None)
    q = np.percentile(np.asarray(values, dtype=float), [25, 50, 75])
    return tuple(float(v) for v in q)


def summarize(records):
    """Success counts and wall-time / iteration quartiles per (scene, planner).

    Unsolved runs enter the time statistics with the time they ran for,
    which is the termination limit when one was set.
    """
    groups = {}
    for r in records:
        groups.setdefault((r.scene, r.planner), []).append(r)
    out = []
    for (scene, planner), rs in sorted(groups.items()):
        q1, med, q3 = quartiles([r.wall_time for r in rs])
        i1, imed, i3 = quartiles([r.iterations for r in rs])
        solved = [r.solution_length for r in rs if r.success]
        out.append({
            "scene": scene,
            "planner": planner,
            "runs": len(rs),
            "successes": sum(r.success for r in rs),
            "errors": sum(r.error is not None for r in rs),
            "wall_time": {"q1": q1, "median": med, "q3": q3},
            "iterations": {"q1": i1, "median": imed, "q3": i3},
            "median_solution_length": float(np.median(solved)) if solved else None,
        })
    return out


def write_results(records, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / RECORDS_FILE).write_text("".join(r.to_json() + "\n" for r in records), encoding="utf-8")
    (out / TIMINGS_FILE).write_text("".join(r.timing_json() + "\n" for r in records), encoding="utf-8")
    summary = summarize(records)
    (out / SUMMARY_FILE).write_text(json.dumps({"pairs": summary}, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return summary


def read_records(out_dir):
    """Records joined with their wall times, as written by :func:`write_results`."""
    out = Path(out_dir)
    times = {}
    for line in (out / TIMINGS_FILE).read_text(encoding="utf-8").splitlines():
        t = json.loads(line)
        times[(t["scene"], t["planner"], t["run"])] = t["wall_time"]
    records = []
    for line in (out / RECORDS_FILE).read_text(encoding="utf-8").splitlines():
        d = json.loads(line)
        records.append(BenchmarkRecord(**d, wall_time=times[(d["scene"], d["planner"], d["run"])]))
    return records


def format_summary(summary):
    lines = []
    for s in summary:
        wt = s["wall_time"]
        med = "-" if wt["median"] is None else f"{wt['median']:.3f}s [{wt['q1']:.3f}, {wt['q3']:.3f}]"
        lines.append(f"{s['scene']:<24} {s['planner']:<4} solved {s['successes']}/{s['runs']}  median {med}")
    return "\n".join(lines)

