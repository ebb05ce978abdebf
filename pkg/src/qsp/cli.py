"""Command line: plan, benchmark, validate and render scenes.

Exit codes: 0 success (plan: solved), 2 plan ran but found no path, 1 error.
``QSP_LOG`` sets the log level (DEBUG, INFO, WARNING, ...).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bench import PLANNERS, RunSpec, format_summary, make_specs, run_benchmark, run_once, write_results
from .errors import InvalidParameterError, QspError
from .render import render_svg
from .roadmap import Ptc
from .scene import check_nesting, project_problem
from .scenefile import resolve_scene, scene_hash

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSOLVED = 2

DEFAULT_TIME_LIMIT = 30.0


class _Parser(argparse.ArgumentParser):
    # Usage errors share exit code 1 with every other error; 2 means "unsolved".
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _ptc_args(p):
    p.add_argument("--time-limit", type=float, default=None, help="seconds per run (default 30 unless --iters)")
    p.add_argument("--iters", type=int, default=None, help="growth iterations per run")
    p.add_argument("--seed", type=int, default=0, help="random seed (benchmark: base seed)")


def _heuristic_args(p):
    p.add_argument("--eps", type=float, default=None, help="thickening radius")
    p.add_argument("--delta", type=float, default=None, help="inflate nested discs by this factor")
    p.add_argument("--bias", type=float, default=None, help="initial shortest-path bias probability")
    p.add_argument("--no-heuristics", action="store_true", help="plain QMP: no bias, thickening or inflation")


def build_parser():
    parser = _Parser(prog="qsp", description="Quotient-space roadmap planning for planar robots.")
    parser.add_argument("--version", action="version", version=f"qsp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("plan", help="plan one query")
    p.add_argument("--scene", required=True, help="scene file or bundled scene name")
    p.add_argument("--planner", choices=PLANNERS, default="qmp")
    _ptc_args(p)
    _heuristic_args(p)
    p.add_argument("--out", help="directory for result.json and roadmaps.json")
    p.add_argument("--svg", help="write a picture of the result here")

    b = sub.add_parser("benchmark", help="seeded repeated runs with summary statistics")
    b.add_argument("--scene", action="append", required=True, help="repeat for several scenes")
    b.add_argument("--planner", action="append", choices=PLANNERS, help="repeat; default both")
    b.add_argument("--runs", type=int, default=10)
    b.add_argument("--jobs", type=int, default=1)
    _ptc_args(b)
    _heuristic_args(b)
    b.add_argument("--out", required=True, help="directory for records, timings and summary")

    v = sub.add_parser("validate", help="check a scene: decomposition, nesting, query")
    v.add_argument("--scene", required=True)
    v.add_argument("--samples", type=int, default=1000, help="nesting samples per level")
    v.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("render", help="draw a scene with optional roadmaps and path")
    r.add_argument("--scene", required=True)
    r.add_argument("--roadmap", help="roadmaps.json written by plan")
    r.add_argument("--path", help="result.json written by plan")
    r.add_argument("--svg", required=True)
    return parser


def _ptc(args):
    if args.time_limit is None and args.iters is None:
        return Ptc(time_limit=DEFAULT_TIME_LIMIT)
    return Ptc(time_limit=args.time_limit, max_iterations=args.iters)


def _heuristic_overrides(args):
    h = {}
    if args.eps is not None:
        h["epsilon"] = args.eps
    if args.delta is not None:
        h["delta"] = args.delta
        h["inflate"] = True
    if args.bias is not None:
        h["p0"] = args.bias
    return h or None


def _scene_key(scene):
    """Canonical scene reference stored in records: bundled name or absolute path."""
    path = Path(scene)
    return str(path.resolve()) if path.exists() else scene


def _write_json(path, obj):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def cmd_plan(args):
    problem = resolve_scene(args.scene)
    spec = RunSpec(_scene_key(args.scene), args.planner, 0, args.seed, _ptc(args),
                   _heuristic_overrides(args), not args.no_heuristics)
    record, outcome = run_once(spec, keep_outcome=True)
    if record.error:
        raise QspError(record.error)
    status = "solved" if record.success else "unsolved"
    print(f"{problem.name}: {args.planner} {status} after {record.iterations} iterations "
          f"({record.wall_time:.3f}s), vertices per level {record.vertices}")
    waypoints = [[float(x) for x in q] for q in outcome.path.waypoints]
    dumps = [g.to_dict(level=k) for k, g in _roadmap_levels(problem, args.planner, outcome)]
    if args.out:
        result = json.loads(record.to_json())
        result.update(wall_time=record.wall_time, scene_hash=scene_hash(problem), waypoints=waypoints)
        _write_json(Path(args.out) / "result.json", result)
        _write_json(Path(args.out) / "roadmaps.json", {"roadmaps": dumps})
    if args.svg:
        _write_text(args.svg, render_svg(problem, dumps, waypoints or None))
    return EXIT_OK if record.success else EXIT_UNSOLVED


def _roadmap_levels(problem, planner, outcome):
    if planner == "prm":
        return [(problem.K, outcome.roadmaps[0])]
    return list(enumerate(outcome.roadmaps, start=1))


def _write_text(path, text):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text, encoding="utf-8")


def cmd_benchmark(args):
    if args.jobs < 1:
        raise InvalidParameterError("--jobs must be >= 1")
    scenes = []
    for s in args.scene:
        resolve_scene(s)  # validate and certify once, before any worker starts
        scenes.append(_scene_key(s))
    planners = args.planner or list(PLANNERS)
    specs = make_specs(scenes, planners, args.runs, _ptc(args), args.seed,
                       _heuristic_overrides(args), not args.no_heuristics)
    records = run_benchmark(specs, args.jobs)
    summary = write_results(records, args.out)
    print(format_summary(summary))
    return EXIT_OK


def cmd_validate(args):
    problem = resolve_scene(args.scene)
    if args.samples < 1:
        raise InvalidParameterError("--samples must be >= 1")
    d = problem.decomposition
    print(f"scene {problem.name}: K={problem.K}")
    for k in range(1, problem.K + 1):
        robot = problem.sequence.robot(k)
        print(f"  level {k}: robot {robot.name} ({robot.kind}), dim {d.space(k).dim}, "
              f"fiber measure {d.fiber(k).measure():.6g}")
    result = check_nesting(problem.sequence, args.samples, np.random.default_rng(args.seed))
    if not result.certified:
        print(f"nesting violated at level {result.level}: witness {list(np.round(result.witness, 6))}", file=sys.stderr)
        return EXIT_ERROR
    project_problem(problem)
    print(f"nesting certified with {result.samples} samples per level (seed {args.seed}); query feasible on every level")
    return EXIT_OK


def cmd_render(args):
    problem = resolve_scene(args.scene)
    roadmaps, path = [], None
    if args.roadmap:
        roadmaps = _read_json(args.roadmap)["roadmaps"]
    if args.path:
        path = _read_json(args.path).get("waypoints") or None
    _write_text(args.svg, render_svg(problem, roadmaps, path))
    return EXIT_OK


def _read_json(path):
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise QspError(f"cannot read {path}: {exc}") from exc


COMMANDS = {"plan": cmd_plan, "benchmark": cmd_benchmark, "validate": cmd_validate, "render": cmd_render}


def _configure_logging():
    level = os.environ.get("QSP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except QspError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
