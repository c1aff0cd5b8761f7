import csv
import io
import json
import subprocess
import sys

import pytest

from conftest import MBPS
from viewalloc.allocator import allocate, allocation_to_dict
from viewalloc.cli import main
from viewalloc.generator import GeneratorParams
from viewalloc.oracle import gap_csv, gap_report
from viewalloc.prioritizer import PrioritizationConfig
from viewalloc.scene import dump_manifest, load_manifest
from viewalloc.simulator import TRACE_COLUMNS, load_trace, report_json, run_session

AXIS = ["--cam", "0,0,0", "--fwd", "0,0,1", "--fov-half-deg", "45", "--near", "10"]


@pytest.fixture
def manifest(tmp_path, i1_scene):
    path = tmp_path / "i1.json"
    path.write_text(dump_manifest(i1_scene))
    return path


def _trace(tmp_path, rows):
    path = tmp_path / "trace.csv"
    lines = [",".join(TRACE_COLUMNS)] + [",".join(map(str, r)) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_validate(manifest, capsys):
    assert main(["validate", "--manifest", str(manifest)]) == 0
    assert "3 models, L=2" in capsys.readouterr().out


def test_allocate_i1(manifest, capsys, i1):
    code = main(["allocate", "--manifest", str(manifest), "--budget-bps", str(22 * MBPS), *AXIS])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    rows = [(r["id"], r["level"], r["bitrate_bps"]) for r in doc["rows"]]
    assert rows == [("A", 0, 10 * MBPS), ("B", 1, 6 * MBPS), ("C", 1, 6 * MBPS)]
    assert doc["total_quality"] == 15_400_000
    # field-for-field identical to the library result
    assert doc == json.loads(json.dumps(allocation_to_dict(allocate(i1, 22 * MBPS))))


def test_allocate_csv(manifest, capsys):
    assert main(["allocate", "--manifest", str(manifest), "--budget-bps", str(20 * MBPS), "--format", "csv", *AXIS]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [(r["id"], r["class"], r["level"]) for r in rows] == [("A", "C1", "0"), ("B", "C2", "1"), ("C", "C3", "2")]


def test_allocate_infeasible(manifest, capsys):
    assert main(["allocate", "--manifest", str(manifest), "--budget-bps", str(8 * MBPS), *AXIS]) == 2
    err = capsys.readouterr().err
    assert "W_min" in err and str(9 * MBPS) in err


def test_allocate_malformed_manifest(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"ladder_levels": 3, "models": [')
    assert main(["allocate", "--manifest", str(bad), "--budget-bps", "1", *AXIS]) == 1
    assert "syntax error" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["allocate", "--budget-bps", "1", *AXIS],  # missing manifest flag
        ["allocate", "--manifest", "/nonexistent.json", "--budget-bps", "1", *AXIS],
        ["allocate", "--manifest", "{m}", "--budget-bps", "1", "--weights", "0.3,0.6,1", *AXIS],
        ["allocate", "--manifest", "{m}", "--budget-bps", "1", "--cam", "1,2", "--near", "1"],
        ["allocate", "--manifest", "{m}", "--budget-bps", "-5", *AXIS],
        ["bogus"],
    ],
)
def test_input_errors_exit_1(argv, manifest):
    argv = [a.replace("{m}", str(manifest)) for a in argv]
    assert main(argv) == 1


def test_validate_reports_every_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"ladder_levels": 2, "models": [
        {"id": "A", "levels_bps": [5, 5], "center": [0, 0, 0], "radius": 1},
        {"id": "A", "levels_bps": [5, 4], "center": [0, 0, 0], "radius": 1},
    ]}))
    assert main(["validate", "--manifest", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "not strictly decreasing" in err and "duplicate id A" in err


def test_simulate(manifest, tmp_path, i1_scene):
    trace = _trace(tmp_path, [
        (0, 1.0, 22 * MBPS, 0, 0, 0, 0, 0, 1, 45, 10),
        (1, 1.0, 22 * MBPS, 0, 0, 0, 0, 0, -1, 45, 10),
        (2, 2.0, 8 * MBPS, 0, 0, 0, 0, 0, 1, 45, 10),
    ])
    out = tmp_path / "out"
    assert main(["simulate", "--manifest", str(manifest), "--trace", str(trace), "--out-dir", str(out)]) == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["infeasible_intervals"] == 1
    assert doc["interval_quality"][0] == 15_400_000
    assert doc["interval_quality"][2] is None
    library = run_session(i1_scene, load_trace(trace.read_text()), PrioritizationConfig())
    assert (out / "report.json").read_text() == report_json(library)
    assert (out / "intervals.csv").exists() and (out / "allocations.csv").exists()


def test_simulate_identical_intervals(manifest, tmp_path, capsys):
    trace = _trace(tmp_path, [(i, 1.0, 22 * MBPS, 0, 0, 0, 0, 0, 1, 45, 10) for i in range(2)])
    assert main(["simulate", "--manifest", str(manifest), "--trace", str(trace)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["switch_counts"] == {"A": 0, "B": 0, "C": 0}
    assert doc["time_weighted_mean_quality"] == 15_400_000


def test_simulate_bad_trace(manifest, tmp_path):
    trace = tmp_path / "t.csv"
    trace.write_text("nope\n")
    assert main(["simulate", "--manifest", str(manifest), "--trace", str(trace)]) == 1


def test_gap(tmp_path, capsys):
    out = tmp_path / "gap"
    assert main(["gap", "--trials", "25", "--seed", "42", "--out-dir", str(out)]) == 0
    expected = gap_csv(gap_report(GeneratorParams(), 25, 42))
    assert (out / "gap.csv").read_text() == expected
    summary = json.loads((out / "gap_summary.json").read_text())
    assert summary["trials"] == 25 and summary["rel_gap"]["max"] <= 1


def test_gap_zero_trials(capsys):
    assert main(["gap", "--trials", "0", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("trial,n,L,W,")


def test_gap_rejects_cap_overflow():
    assert main(["gap", "--trials", "1", "--n-range", "2,20"]) == 1


def test_gen_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["gen", "--seed", "7", "--n", "3", "--levels", "2", "--intervals", "4", "--out-dir", str(d)]) == 0
    for name in ("manifest.json", "trace.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    scene = load_manifest((a / "manifest.json").read_text())
    assert len(scene) == 3 and scene.ladder_level_count == 3
    assert len(load_trace((a / "trace.csv").read_text()).intervals) == 4
    # generated files feed straight back into the other commands
    assert main(["simulate", "--manifest", str(a / "manifest.json"), "--trace", str(a / "trace.csv"),
                 "--out-dir", str(tmp_path / "sim")]) == 0


def test_gen_rejects_pigeonhole():
    assert main(["gen", "--levels", "3", "--bitrate-range", "1,2", "--out-dir", "/tmp/unused"]) == 1


def test_module_entry_point(manifest):
    proc = subprocess.run(
        [sys.executable, "-m", "viewalloc", "allocate", "--manifest", str(manifest), "--budget-bps", str(22 * MBPS), *AXIS],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["total_quality"] == 15_400_000
