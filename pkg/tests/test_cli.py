import json
import statistics

import pytest

from qsp.bench import read_records, summarize
from qsp.cli import main

from test_scenefile import MINIMAL

# The bundled two-rooms scene solves quickly for both planners.
EASY = "two_rooms"


def test_plan_solved_writes_results(tmp_path, capsys):
    code = main(["plan", "--scene", EASY, "--seed", "1", "--out", str(tmp_path), "--svg", str(tmp_path / "p.svg")])
    assert code == 0
    result = json.loads((tmp_path / "result.json").read_text())
    assert result["success"] and len(result["waypoints"]) >= 2
    assert result["waypoints"][0] == [2.0, 2.0, 0.5]
    assert len(result["edge_lengths"]) == 2 and len(result["densities"]) == 2
    dumps = json.loads((tmp_path / "roadmaps.json").read_text())["roadmaps"]
    assert [d["level"] for d in dumps] == [1, 2]
    assert (tmp_path / "p.svg").read_text().startswith("<?xml")
    assert "solved" in capsys.readouterr().out


def test_plan_unsolvable_exits_2(tmp_path):
    code = main(["plan", "--scene", "arm3_blocked", "--iters", "300", "--out", str(tmp_path)])
    assert code == 2
    assert not json.loads((tmp_path / "result.json").read_text())["success"]


def test_plan_malformed_scene_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(MINIMAL.replace("x = [0, 10]", "x = [10, 0]"))
    assert main(["plan", "--scene", str(bad)]) == 1
    assert "bounds.x" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["plan"])
    assert info.value.code == 1
    assert main(["plan", "--scene", "no_such_scene"]) == 1
    with pytest.raises(SystemExit) as info:
        main(["plan", "--scene", EASY, "--planner", "rrt"])
    assert info.value.code == 1


def test_validate(capsys):
    assert main(["validate", "--scene", "arm3", "--samples", "200"]) == 0
    assert "certified" in capsys.readouterr().out


def test_render_round_trip(tmp_path):
    assert main(["plan", "--scene", EASY, "--iters", "200", "--out", str(tmp_path)]) in (0, 2)
    svg = tmp_path / "r.svg"
    assert main(["render", "--scene", EASY, "--roadmap", str(tmp_path / "roadmaps.json"),
                 "--path", str(tmp_path / "result.json"), "--svg", str(svg)]) == 0
    first = svg.read_bytes()
    main(["render", "--scene", EASY, "--roadmap", str(tmp_path / "roadmaps.json"),
          "--path", str(tmp_path / "result.json"), "--svg", str(svg)])
    assert svg.read_bytes() == first
    assert main(["render", "--scene", EASY, "--roadmap", str(tmp_path / "missing.json"), "--svg", str(svg)]) == 1


def test_benchmark_smoke_and_summary(tmp_path):
    out = tmp_path / "b"
    assert main(["benchmark", "--scene", EASY, "--runs", "5", "--time-limit", "30", "--out", str(out)]) == 0
    records = read_records(out)
    assert len(records) == 10 and all(r.success for r in records)
    assert {r.planner for r in records} == {"prm", "qmp"}
    assert all(r.solution_length > 0 for r in records)
    emitted = json.loads((out / "summary.json").read_text())["pairs"]
    assert emitted == summarize(records)
    # Independent recomputation from the raw record and timing files.
    times = [json.loads(l) for l in (out / "timings.jsonl").read_text().splitlines()]
    for pair in emitted:
        wt = [t["wall_time"] for t in times if t["planner"] == pair["planner"]]
        q1, med, q3 = statistics.quantiles(wt, n=4, method="inclusive")
        assert pair["wall_time"] == {"q1": q1, "median": med, "q3": q3}
        assert pair["successes"] == 5


def test_benchmark_records_are_deterministic(tmp_path):
    args = ["benchmark", "--scene", EASY, "--scene", "spurious_Lshape", "--runs", "3", "--iters", "150"]
    files = []
    for name, jobs in (("a", 1), ("b", 1), ("c", 2)):
        assert main(args + ["--jobs", str(jobs), "--out", str(tmp_path / name)]) == 0
        files.append((tmp_path / name / "records.jsonl").read_bytes())
    assert files[0] == files[1] == files[2]
    assert len(files[0].splitlines()) == 12


def test_benchmark_rejects_bad_jobs(tmp_path):
    assert main(["benchmark", "--scene", EASY, "--jobs", "0", "--out", str(tmp_path)]) == 1
