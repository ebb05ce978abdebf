"""Scene files: a TOML document describing one planning problem.

Layout::

    schema = 1
    name = "two_rooms"

    [bounds]
    x = [0, 10]
    y = [0, 10]

    [environment]
    obstacles = [
      { polygon = [[4.8, 0], [5.2, 0], [5.2, 4], [4.8, 4]] },
      { center = [2, 2], radius = 0.5 },
    ]

    [robots.disc]
    kind = "free_floating"
    rotates = false
    body = [{ center = [0, 0], radius = 0.15 }]

    [robots.arm]
    kind = "fixed_base"
    base = [5, 5, 0]
    links = [
      { length = 1, limits = [-3.14159, 3.14159], shapes = [...] },
    ]

    [nesting]
    levels = ["disc", "body"]

    [query]
    start = [1, 1, 0]
    goal = [9, 9, 0]

    [planner]            # every key optional
    neighbors = 10
    resolution = 0.1
    epsilon = 0.01
    delta = 1.2
    bias = 0.8
    bias_halflife = 100
    weights = [1, 1, 1]  # per coordinate of the top level

Numbers are written with at most 12 significant digits, so
``save(load(save(p)))`` reproduces the first file byte for byte.
"""

from __future__ import annotations

import hashlib
import math
import re
from importlib import resources
from pathlib import Path

import numpy as np
import tomli

from .cspace import QuotientDecomposition
from .errors import InvalidParameterError, QspError, SceneError
from .geometry import BodyVolume, ConvexShape, Pose2
from .robots import FIXED_BASE, FREE_FLOATING, Link, RobotModel
from .scene import NestedRobotSequence, PlannerDefaults, PlanningProblem, check_nesting, project_problem

SCHEMA_VERSION = 1

# Monte-Carlo nesting certification run on every load (fixed seed).
LOAD_NESTING_SAMPLES = 64
LOAD_NESTING_SEED = 20240601

SECTIONS = ("schema", "name", "bounds", "environment", "robots", "nesting", "query", "planner")
PLANNER_KEYS = ("neighbors", "resolution", "epsilon", "delta", "bias", "bias_halflife", "weights")


# -- reading ----------------------------------------------------------------------


def load_scene(path, certify=True) -> PlanningProblem:
    """Parse and validate a scene file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SceneError(f"cannot read scene file: {exc}") from exc
    return loads_scene(text, certify=certify)


def loads_scene(text, certify=True) -> PlanningProblem:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        if m:
            line = int(m.group(1))
        elif "end of document" in str(exc):
            line = text.count("\n") + 1
        else:
            line = None
        raise SceneError(f"parse error: {exc}", line=line) from exc
    problem = problem_from_dict(doc)
    validate_problem(problem, certify=certify)
    return problem


def _field(path, fn, *args):
    """Run a constructor, re-raising library errors as a SceneError naming ``path``."""
    try:
        return fn(*args)
    except SceneError:
        raise
    except (QspError, ValueError, TypeError) as exc:
        raise SceneError(str(exc), field=path) from exc


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SceneError("expected a number", field=path)
    value = float(value)
    if not math.isfinite(value):
        raise SceneError("number must be finite", field=path)
    return value


def _numbers(value, path, n=None):
    if not isinstance(value, list):
        raise SceneError("expected a list of numbers", field=path)
    if n is not None and len(value) != n:
        raise SceneError(f"expected {n} numbers, got {len(value)}", field=path)
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _require(table, key, path):
    if not isinstance(table, dict) or key not in table:
        raise SceneError("missing required field", field=f"{path}.{key}" if path else key)
    return table[key]


def _shape(spec, path):
    if not isinstance(spec, dict):
        raise SceneError("shape must be a table with 'polygon' or 'center'/'radius'", field=path)
    if "polygon" in spec:
        pts = spec["polygon"]
        if not isinstance(pts, list):
            raise SceneError("polygon must be a list of [x, y] points", field=f"{path}.polygon")
        verts = [_numbers(p, f"{path}.polygon[{i}]", 2) for i, p in enumerate(pts)]
        return _field(f"{path}.polygon", ConvexShape.polygon, verts)
    if "center" in spec:
        c = _numbers(spec["center"], f"{path}.center", 2)
        r = _number(_require(spec, "radius", path), f"{path}.radius")
        return _field(f"{path}.radius", ConvexShape.disc, c, r)
    raise SceneError("shape must have 'polygon' or 'center'/'radius'", field=path)


def _shapes(specs, path):
    if not isinstance(specs, list):
        raise SceneError("expected a list of shapes", field=path)
    return tuple(_shape(s, f"{path}[{i}]") for i, s in enumerate(specs))


def _robot(name, spec, path):
    if not isinstance(spec, dict):
        raise SceneError("robot must be a table", field=path)
    kind = _require(spec, "kind", path)
    if kind not in (FREE_FLOATING, FIXED_BASE):
        raise SceneError(f"unknown robot kind {kind!r}", field=f"{path}.kind")
    body = _shapes(spec.get("body", []), f"{path}.body")
    links = []
    for i, ls in enumerate(spec.get("links", [])):
        lp = f"{path}.links[{i}]"
        length = _number(_require(ls, "length", lp), f"{lp}.length")
        lo, hi = _numbers(_require(ls, "limits", lp), f"{lp}.limits", 2)
        shapes = _shapes(ls.get("shapes", []), f"{lp}.shapes")
        links.append(_field(f"{lp}.limits", Link, length, lo, hi, shapes))
    base = Pose2(*_numbers(spec.get("base", [0, 0, 0]), f"{path}.base", 3))
    rotates = spec.get("rotates", True)
    if not isinstance(rotates, bool):
        raise SceneError("expected true or false", field=f"{path}.rotates")
    return _field(path, RobotModel, name, kind, body, tuple(links), base, rotates)


def problem_from_dict(doc) -> PlanningProblem:
    """Build a problem from a parsed document (no nesting certification)."""
    unknown = sorted(set(doc) - set(SECTIONS))
    if unknown:
        raise SceneError("unknown section", field=unknown[0])
    schema = _require(doc, "schema", "")
    if schema != SCHEMA_VERSION:
        raise SceneError(f"unsupported schema version {schema!r} (expected {SCHEMA_VERSION})", field="schema")
    name = doc.get("name", "scene")
    if not isinstance(name, str):
        raise SceneError("expected a string", field="name")

    b = _require(doc, "bounds", "")
    bounds = (tuple(_numbers(_require(b, "x", "bounds"), "bounds.x", 2)), tuple(_numbers(_require(b, "y", "bounds"), "bounds.y", 2)))
    for axis, (lo, hi) in zip("xy", bounds):
        if not lo < hi:
            raise SceneError("bounds must satisfy lower < upper", field=f"bounds.{axis}")

    env = doc.get("environment", {})
    obstacles = _shapes(env.get("obstacles", []), "environment.obstacles")

    robots_doc = _require(doc, "robots", "")
    if not isinstance(robots_doc, dict) or not robots_doc:
        raise SceneError("at least one robot required", field="robots")
    robots = {n: _robot(n, s, f"robots.{n}") for n, s in robots_doc.items()}

    levels = _require(_require(doc, "nesting", ""), "levels", "nesting")
    if not isinstance(levels, list) or not levels:
        raise SceneError("nesting needs a non-empty list of robot names", field="nesting.levels")
    for i, n in enumerate(levels):
        if n not in robots:
            raise SceneError(f"unknown robot {n!r}", field=f"nesting.levels[{i}]")

    planner_doc = doc.get("planner", {})
    unknown = sorted(set(planner_doc) - set(PLANNER_KEYS))
    if unknown:
        raise SceneError("unknown planner setting", field=f"planner.{unknown[0]}")
    planner = _planner(planner_doc)
    sequence = _field("nesting.levels", _build_sequence, [robots[n] for n in levels], bounds, planner.weights)

    q = _require(doc, "query", "")
    dim = sequence.decomposition.space(sequence.K).dim
    start = _numbers(_require(q, "start", "query"), "query.start", dim)
    goal = _numbers(_require(q, "goal", "query"), "query.goal", dim)
    return PlanningProblem(
        BodyVolume.of(obstacles),
        sequence,
        np.array(start),
        np.array(goal),
        bounds,
        planner,
        name,
    )


def _build_sequence(robots, bounds, weights):
    if weights is None:
        return NestedRobotSequence.build(robots, bounds)
    top = robots[-1].dim
    if len(weights) != top:
        raise InvalidParameterError(f"weights need {top} entries (one per top-level coordinate)")
    spaces = [r.config_space(bounds, weights[: r.dim]) for r in robots]
    return NestedRobotSequence(tuple(robots), QuotientDecomposition(spaces))


def _planner(doc) -> PlannerDefaults:
    kw = {}
    if "neighbors" in doc:
        v = doc["neighbors"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise SceneError("expected a positive integer", field="planner.neighbors")
        kw["neighbors"] = v
    if "bias_halflife" in doc:
        v = doc["bias_halflife"]
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise SceneError("expected a positive integer", field="planner.bias_halflife")
        kw["bias_halflife"] = v
    for key, ok, what in (
        ("resolution", lambda x: x > 0, "positive"),
        ("epsilon", lambda x: x >= 0, "non-negative"),
        ("delta", lambda x: x > 0, "positive"),
        ("bias", lambda x: 0 <= x <= 1, "in [0, 1]"),
    ):
        if key in doc:
            v = _number(doc[key], f"planner.{key}")
            if not ok(v):
                raise SceneError(f"must be {what}", field=f"planner.{key}")
            kw[key] = v
    if "weights" in doc:
        w = _numbers(doc["weights"], "planner.weights")
        if any(not x > 0 for x in w):
            raise SceneError("weights must be positive", field="planner.weights")
        kw["weights"] = tuple(w)
    return PlannerDefaults(**kw)


def validate_problem(problem: PlanningProblem, certify=True):
    """Run every validator: decomposition, nesting, query feasibility."""
    violation = problem.decomposition.validate()
    if violation is not None:
        raise SceneError(f"invalid nesting at level {violation.level}: {violation.reason}", field="nesting.levels")
    top = problem.space(problem.K)
    for label, q in (("start", problem.q_start), ("goal", problem.q_goal)):
        if not top.contains(q):
            raise SceneError("configuration outside the space bounds or joint limits", field=f"query.{label}")
        if not problem.is_valid(problem.K, q):
            raise SceneError("configuration is in collision", field=f"query.{label}")
    if certify:
        rng = np.random.default_rng(LOAD_NESTING_SEED)
        result = check_nesting(problem.sequence, LOAD_NESTING_SAMPLES, rng)
        if not result.certified:
            raise SceneError(
                f"robot at level {result.level - 1} is not contained in robot at level {result.level} "
                f"(witness point {list(np.round(result.witness, 6))})",
                field="nesting.levels",
            )
    _field("query", project_problem, problem)
    return problem


# -- writing ---------------------------------------------------------------------------


def fmt_number(x):
    """Decimal with at most 12 significant digits; integral values drop the fraction."""
    x = float(x)
    if not math.isfinite(x):
        raise InvalidParameterError("scene numbers must be finite")
    return "0" if x == 0.0 else f"{x:.12g}"


def _fmt_list(values):
    return "[" + ", ".join(fmt_number(v) for v in values) + "]"


def _fmt_shape(shape: ConvexShape):
    if shape.is_disc:
        return f"{{ center = {_fmt_list(shape.center)}, radius = {fmt_number(shape.radius)} }}"
    pts = ", ".join(_fmt_list(p) for p in shape.vertices)
    return f"{{ polygon = [{pts}] }}"


def _fmt_shapes(shapes, indent="  "):
    if not shapes:
        return "[]"
    return "[\n" + "".join(f"{indent}{_fmt_shape(s)},\n" for s in shapes) + "]"


def _quote(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _key(name):
    return name if re.fullmatch(r"[A-Za-z0-9_-]+", name) else _quote(name)


def dumps_scene(problem: PlanningProblem) -> str:
    out = [f"schema = {SCHEMA_VERSION}", f"name = {_quote(problem.name)}", ""]
    (x0, x1), (y0, y1) = problem.bounds
    out += ["[bounds]", f"x = {_fmt_list((x0, x1))}", f"y = {_fmt_list((y0, y1))}", ""]
    shapes = problem.environment.world_shapes()
    out += ["[environment]", f"obstacles = {_fmt_shapes(shapes)}", ""]
    for robot in problem.sequence.robots:
        out.append(f"[robots.{_key(robot.name)}]")
        out.append(f"kind = {_quote(robot.kind)}")
        if robot.kind == FREE_FLOATING:
            out.append(f"rotates = {'true' if robot.rotates else 'false'}")
        else:
            out.append(f"base = {_fmt_list(robot.base.as_array())}")
        if robot.body:
            out.append(f"body = {_fmt_shapes(robot.body)}")
        if robot.links:
            out.append("links = [")
            for link in robot.links:
                inner = ", ".join(_fmt_shape(s) for s in link.shapes)
                out.append(
                    f"  {{ length = {fmt_number(link.length)}, limits = {_fmt_list((link.lower, link.upper))}, "
                    f"shapes = [{inner}] }},"
                )
            out.append("]")
        out.append("")
    names = ", ".join(_quote(r.name) for r in problem.sequence.robots)
    out += ["[nesting]", f"levels = [{names}]", ""]
    out += ["[query]", f"start = {_fmt_list(problem.q_start)}", f"goal = {_fmt_list(problem.q_goal)}", ""]
    p = problem.planner
    out.append("[planner]")
    out.append(f"neighbors = {p.neighbors}")
    for key in ("resolution", "epsilon"):
        v = getattr(p, key)
        if v is not None:
            out.append(f"{key} = {fmt_number(v)}")
    out += [f"delta = {fmt_number(p.delta)}", f"bias = {fmt_number(p.bias)}", f"bias_halflife = {p.bias_halflife}"]
    if p.weights is not None:
        out.append(f"weights = {_fmt_list(p.weights)}")
    return "\n".join(out) + "\n"


def save_scene(problem: PlanningProblem, path):
    Path(path).write_text(dumps_scene(problem), encoding="utf-8")


def scene_hash(problem: PlanningProblem) -> str:
    """Content hash of the canonical serialization."""
    return hashlib.sha256(dumps_scene(problem).encode()).hexdigest()


def problem_to_dict(problem: PlanningProblem):
    """Canonical nested-dict view of a problem, for field-by-field comparison."""
    return tomli.loads(dumps_scene(problem))


# -- bundled scenes --------------------------------------------------------------------------


def bundled_scenes():
    root = resources.files("qsp") / "scenes"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def bundled_scene_path(name) -> Path:
    path = Path(str(resources.files("qsp") / "scenes" / f"{name}.toml"))
    if not path.exists():
        raise SceneError(f"no bundled scene named {name!r}")
    return path


def load_bundled(name, certify=True) -> PlanningProblem:
    return load_scene(bundled_scene_path(name), certify=certify)


def resolve_scene(spec, certify=True) -> PlanningProblem:
    """Load ``spec`` as a file path, or as a bundled scene name."""
    path = Path(spec)
    if path.exists():
        return load_scene(path, certify=certify)
    if path.suffix == "" and spec in bundled_scenes():
        return load_bundled(spec, certify=certify)
    raise SceneError(f"scene file not found: {spec}")


__all__ = [
    "load_scene",
    "loads_scene",
    "save_scene",
    "dumps_scene",
    "problem_from_dict",
    "problem_to_dict",
    "validate_problem",
    "scene_hash",
    "bundled_scenes",
    "load_bundled",
    "resolve_scene",
]
