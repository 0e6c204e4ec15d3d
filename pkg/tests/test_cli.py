import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from legendrian_lab import cli
from legendrian_lab import curves as cv

SVG = "{http://www.w3.org/2000/svg}"


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--suite", "nothing"])
    assert exc.value.code == 2
    assert cli.main(["plot", "--source", "gamma:x", "--out", "x.svg"]) == 2
    assert cli.main(["approximate", "--target", "circle"]) == 2
    assert cli.main(["flow", "--hamiltonian", "one", "--start", "1,2"]) == 2


def test_bad_environment_override(monkeypatch, capsys):
    monkeypatch.setenv("LEGENDRIAN_LAB_CURVE_N", "lots")
    assert cli.main(["verify", "--suite", "curves", "--quick"]) == 2
    monkeypatch.setenv("LEGENDRIAN_LAB_CURVE_N", "4")
    assert cli.main(["verify", "--suite", "curves", "--quick"]) == 2


def test_verify_json_deterministic(tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        code = cli.main(["verify", "--suite", "curves", "--quick", "--m-max", "10", "--json", str(tmp_path / name)])
        assert code == 0
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["pass"] and all(c["passed"] or c["informational"] for c in doc["checks"])


def test_plot_svg_markers(tmp_path, capsys):
    out = tmp_path / "fronts.svg"
    assert cli.main(["plot", "--source", "gamma:3", "--source", "psi:1", "--out", str(out)]) == 0
    root = ET.parse(out).getroot()
    cusps = root.findall(f".//{SVG}circle[@class='cusp']")
    assert len(cusps) == sum(cv.cusp_counts(3)) + 2
    assert root.findall(f".//{SVG}rect[@class='crossing']")


def test_approximate_writes_curve(tmp_path, capsys):
    out = tmp_path / "curve.json"
    code = cli.main(["approximate", "--target", "parabola", "--M", "25", "--d", "0.004",
                     "--grid", "2000", "--samples", "301", "--out", str(out)])
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["kind"] == "zigzag" and len(doc["samples"]) == 301
    back = cv.curve_from_json(doc)
    assert back.name
    plot = tmp_path / "curve.svg"
    assert cli.main(["plot", "--source", f"file:{out}", "--out", str(plot)]) == 0
    ET.parse(plot)


def test_flow_json_lines(tmp_path, capsys):
    out = tmp_path / "traj.jsonl"
    assert cli.main(["flow", "--hamiltonian", "one", "--start", "0,0,0,0,0", "--tau1", "0.5",
                     "--step", "0.1", "--out", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert len(rows) == 6
    assert rows[-1]["tau"] == pytest.approx(0.5)
    assert rows[-1]["pt"] == pytest.approx([0, 0, 0.5, 0, 0])


def test_missing_input_file_exits_one(tmp_path, capsys):
    assert cli.main(["approximate", "--target", f"file:{tmp_path / 'none.json'}"]) == 1


def test_report_with_schedule(tmp_path, capsys):
    sched = tmp_path / "sched.json"
    code = cli.main(["report", "--N", "2", "--quick", "--json", str(tmp_path / "r.json"),
                     "--schedule", "0.5", "--schedule-out", str(sched)])
    assert code == 0
    doc = json.loads(sched.read_text())
    assert doc["epsilon"] == 0.5 and len(doc["quarters"]) == 4
    assert cli.main(["report", "--N", "2", "--quick", "--schedule", "1.5",
                     "--schedule-out", str(sched)]) == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "legendrian_lab.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "verify" in proc.stdout
