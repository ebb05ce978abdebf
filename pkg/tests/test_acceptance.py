"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are collected by ``conftest.py`` and repeated in the terminal
summary, so ``pytest tests/test_acceptance.py`` ends with the verdicts.
"""

import functools
import statistics
import time
from pathlib import Path

import numpy as np

from qsp.cli import main as cli_main
from qsp.geometry import BodyVolume, ConvexShape
from qsp.oracle import GridSpec, cached_grid_plan, grid_necessary_condition, grid_plan
from qsp.qmp import default_heuristics, density, plan_qmp
from qsp.roadmap import Ptc, plan_prm
from qsp.robots import disc_robot
from qsp.scene import NestedRobotSequence, PlanningProblem, check_nesting
from qsp.scenefile import load_bundled, scene_hash

from builders import BOUNDS, B, passes_above, square, theorem1_counterexamples
from conftest import report
from space_suite import run_suite

ORACLE_DIR = Path(__file__).parent / "fixtures" / "oracle"

# Spurious scene passages (see the scene file): closing one leaves the other.
LOWER_PASSAGE = [B(4.0, 0.25, 6.0, 1.0)]
UPPER_PASSAGE = [B(4.0, 6.5, 6.0, 9.0)]

COMPLETENESS_SCENES = ("spurious_Lshape", "nonsimple_rectangle", "arm3", "two_rooms")
COMPLETENESS_RUNS = 50
COMPLETENESS_PTC = 30.0
NARROW_RUNS = 20
NARROW_PTC = 25.0


def _oracle(problem, grid, tag="", blockers=()):
    return cached_grid_plan(problem, grid, ORACLE_DIR, scene_hash(problem), tag, blockers)


def _top_grid(problem):
    return GridSpec((64, 64, 32), problem.K) if problem.space(problem.K).dim == 3 else GridSpec((128, 128), problem.K)


@functools.lru_cache(maxsize=None)
def _qmp_runs(scene, runs, limit):
    p = load_bundled(scene)
    h = default_heuristics(p)
    return [plan_qmp(p, Ptc(time_limit=limit), h, np.random.default_rng(s)) for s in range(runs)]


# 1 ------------------------------------------------------------------------------------


def test_criterion_1_necessary_condition():
    t0 = time.perf_counter()
    cases = []
    disc_square = NestedRobotSequence.build([disc_robot(square(), "disc"), square()], BOUNDS)
    env = BodyVolume.of([B(3, 3, 5, 7), ConvexShape.disc((7, 2), 1.0), B(6.5, 6.5, 9, 7.5)])
    cases.append(("disc in square", disc_square, env, [GridSpec((64, 64, 16), 2)]))
    spur = load_bundled("spurious_Lshape")
    cases.append(("disc in L", spur.sequence, spur.environment, [GridSpec((64, 64, 16), 2)]))
    arms = load_bundled("arm3")
    cases.append(("arm chain", arms.sequence, arms.environment, [GridSpec((64, 64), 2), GridSpec((64, 64, 16), 3)]))
    violations, trials_bad, certified = 0, 0, True
    rng = np.random.default_rng(0)
    for _, seq, environment, grids in cases:
        certified &= check_nesting(seq, 200, rng).certified
        violations += grid_necessary_condition(seq, environment, grids).violations
    for problem in (_as_problem(disc_square, env), spur, arms):
        trials_bad += theorem1_counterexamples(problem, 10_000, rng)
    elapsed = time.perf_counter() - t0
    ok = certified and violations == 0 and trials_bad == 0 and elapsed < 60
    report(1, ok, f"grid violations {violations}, random counterexamples {trials_bad}, {elapsed:.1f}s")
    assert ok


def _as_problem(sequence, environment):
    return PlanningProblem(environment, sequence, np.array([1.0, 1.0, 0.0]), np.array([9.0, 9.0, 0.0]), BOUNDS)


# 2 ------------------------------------------------------------------------------------


def test_criterion_2_single_level_matches_prm():
    t0 = time.perf_counter()
    scenes = [("two_rooms", 2, 0.5), ("spurious_Lshape", 1, 0.05)]
    details, ok = [], True
    for name, k, limit in scenes:
        p = load_bundled(name).level(k)
        h = default_heuristics(p)
        qmp = sum(plan_qmp(p, Ptc(time_limit=limit), h, np.random.default_rng(s)).solved for s in range(50))
        prm = sum(plan_prm(p, Ptc(time_limit=limit), np.random.default_rng(s)).solved for s in range(50))
        ok &= abs(qmp - prm) <= 5  # 10 percentage points of 50 runs
        details.append(f"{name}: qmp {qmp}/50, prm {prm}/50")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 300
    report(2, ok, "; ".join(details) + f", {elapsed:.0f}s")
    assert ok


# 3 ------------------------------------------------------------------------------------


def test_criterion_3_completeness():
    details, ok = [], True
    for name in COMPLETENESS_SCENES:
        p = load_bundled(name)
        labelled = _oracle(p, _top_grid(p))["reachable"]
        runs = _qmp_runs(name, COMPLETENESS_RUNS, COMPLETENESS_PTC)
        solved = sum(r.solved for r in runs)
        ok &= labelled and solved >= 0.95 * COMPLETENESS_RUNS
        details.append(f"{name} {solved}/{COMPLETENESS_RUNS}")
    report(3, ok, ", ".join(details))
    assert ok


# 4 ------------------------------------------------------------------------------------


def test_criterion_4_spurious_path():
    p = load_bundled("spurious_Lshape")
    # Level 1: the grid shortest path takes the lower passage, which the full robot cannot use.
    shortest = grid_plan(p, GridSpec((128, 128), 1))
    level1_low = not passes_above(shortest.path, 4.0, 6.0, 1.0)
    lower_blocked = not _oracle(p, GridSpec((64, 64, 32), 2), "upper closed", UPPER_PASSAGE)["reachable"]
    upper_open = _oracle(p, GridSpec((64, 64, 32), 2), "lower closed", LOWER_PASSAGE)["reachable"]
    runs = _qmp_runs("spurious_Lshape", COMPLETENESS_RUNS, COMPLETENESS_PTC)
    solved = [r for r in runs if r.solved]
    upper = sum(passes_above(r.path.waypoints, 4.0, 6.0, 6.5) for r in solved)
    low_first = sum(not passes_above(r.levels[0].solution.waypoints, 4.0, 6.0, 1.0) for r in runs)
    ok = shortest.reachable and level1_low and lower_blocked and upper_open and solved and upper == len(solved)
    report(4, ok, f"oracle level-1 path low: {level1_low}, lower passage blocked for L: {lower_blocked}, "
                  f"level-1 path low in {low_first}/{len(runs)} runs, upper class {upper}/{len(solved)} solved")
    assert ok


# 5 ------------------------------------------------------------------------------------


def test_criterion_5_narrow_passage_speedup():
    t0 = time.perf_counter()
    p = load_bundled("narrow_passage_Lshape")
    h = default_heuristics(p)
    ptc = Ptc(time_limit=NARROW_PTC)
    # Unsolved runs count with the time they ran for (the limit).
    qmp = [plan_qmp(p, ptc, h, np.random.default_rng(s)) for s in range(NARROW_RUNS)]
    prm = [plan_prm(p, ptc, np.random.default_rng(s)) for s in range(NARROW_RUNS)]
    q_med = statistics.median(r.elapsed for r in qmp)
    p_med = statistics.median(r.elapsed for r in prm)
    elapsed = time.perf_counter() - t0
    ok = q_med < p_med and elapsed < 1200
    report(5, ok, f"median qmp {q_med:.2f}s ({sum(r.solved for r in qmp)}/{NARROW_RUNS} solved), "
                  f"prm {p_med:.2f}s ({sum(r.solved for r in prm)}/{NARROW_RUNS} solved), {elapsed:.0f}s")
    assert ok


# 6 ------------------------------------------------------------------------------------


def _max_gap(log, level):
    """Longest run of iterations without growing ``level`` after it became active.

    A new level starts with zero attempts, hence the lowest key, so its first
    growth marks its activation.
    """
    grown = np.flatnonzero(np.asarray(log) == level)
    marks = np.concatenate([grown[:1] - 1, grown, [len(log)]])
    return int(np.diff(marks).max() - 1)


def test_criterion_6_density_and_fairness():
    p = load_bundled("arm3_blocked")
    out = plan_qmp(p, Ptc(max_iterations=10_000), default_heuristics(p), np.random.default_rng(0))
    drift = max(abs(qr.density - density(qr)) for qr in out.levels)
    gaps = {qr.level: _max_gap(out.grow_log, qr.level) for qr in out.levels}
    ok = out.iterations == 10_000 and len(out.levels) == 3 and drift <= 1e-9 and max(gaps.values()) < 1000
    report(6, ok, f"density drift {drift:.1e}, longest gaps between growths per level {gaps}")
    assert ok


# 7 ------------------------------------------------------------------------------------


def test_criterion_7_metric_space_suite():
    t0 = time.perf_counter()
    failures = run_suite(1000, 0)
    elapsed = time.perf_counter() - t0
    bad = {k: v for k, v in failures.items() if v}
    ok = not bad and elapsed < 30
    report(7, ok, f"{len(failures)} family checks x 1000 cases, failures {bad or 0}, {elapsed:.1f}s")
    assert ok


# 8 ------------------------------------------------------------------------------------


def test_criterion_8_benchmark_determinism(tmp_path):
    args = ["benchmark", "--scene", "two_rooms", "--scene", "spurious_Lshape", "--runs", "4", "--iters", "300"]
    files = []
    for name, jobs in (("serial1", 1), ("serial2", 1), ("parallel", 2)):
        assert cli_main(args + ["--jobs", str(jobs), "--out", str(tmp_path / name)]) == 0
        files.append((tmp_path / name / "records.jsonl").read_bytes())
    ok = files[0] == files[1] == files[2] and len(files[0].splitlines()) == 16
    report(8, ok, f"{len(files[0].splitlines())} records, serial x2 and parallel byte-identical: {ok}")
    assert ok
