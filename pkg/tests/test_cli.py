import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from tempsim.cli import main
from tempsim.io import serialize_scenario
from tempsim.scenarios import build_cache_scenario

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def metrics(text):
    return {k: float(v) for k, v in (line.split(" = ") for line in text.splitlines())}


def test_ratio():
    code, text = run("ratio", "--r", "1,0.5")
    assert code == 0
    assert text.splitlines() == ["apparent_time_ratio[1] = 3.162277660",
                                 "apparent_time_ratio[0.5] = 2.549509757"]


def test_sweep_to_stdout_and_file(tmp_path):
    code, text = run("sweep", "--n", "1,10,100,1000", "--one-minus-alpha", "1e-7,1e-4,1e-2")
    assert code == 0
    assert text == (GOLDEN / "surface_4x3.csv").read_text()
    target = tmp_path / "s.csv"
    assert run("sweep", "--n", "10", "--one-minus-alpha", "0.01", "--out", str(target))[0] == 0
    assert target.read_text().splitlines()[1] == "10,0.010000000,0.917431193"


@pytest.mark.parametrize("argv, key, value", [
    (["cache", "--y", "0.5", "--tp", "1.0"], "apparent_access_core0", 2.414213562),
    (["observer"], "apparent_time_observer1", 3.16227766),
    (["adder", "--xor2=-1,0"], "sum_delivery", 9.236067977),
    (["bus", "--n", "2"], "delivery_2", 7.2),
    (["distributed", "--n", "2"], "makespan", 5.3),
    (["ann", "--dedicated"], "skew", 2.0),
    (["ann"], "skew", 10.2),
])
def test_scenario_commands(argv, key, value):
    code, text = run(*argv, "--metrics")
    assert code == 0
    got = metrics(text)
    assert got[key] == pytest.approx(value, abs=1e-9)
    assert "payload_fraction" in got


def test_outputs_written(tmp_path):
    trace, svg = tmp_path / "t.csv", tmp_path / "d.svg"
    code, text = run("adder", "--out-trace", str(trace), "--out-svg", str(svg))
    assert code == 0 and text == ""
    assert trace.read_text().startswith("component,start,end,state,detail\n")
    assert svg.read_text().count('class="payload"') == 7


def test_run_scenario_file(tmp_path):
    path = tmp_path / "cache.json"
    path.write_text(serialize_scenario(build_cache_scenario()))
    code, text = run("run", str(path), "--metrics")
    assert code == 0
    assert metrics(text)["apparent_access_core1"] == pytest.approx(3.414213562, abs=1e-9)


def test_run_errors_exit_two(tmp_path, capsys):
    assert run("run", str(tmp_path / "missing.json"))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "x", "components": [{"id": 0, "kind": "sink", "position": [0, 0], "inputs": [4]}]}')
    assert run("run", str(bad))[0] == 2
    assert "DanglingReferenceError" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["ann", "--dedicated", "--shared"],
    ["adder", "--inputs", "1,2,0"],
    ["adder", "--xor2", "1"],
    ["sweep", "--n", "0.5", "--one-minus-alpha", "0.1"],
    ["ratio", "--r", "-1"],
    ["bus", "--n", "0"],
])
def test_usage_errors_exit_one(argv):
    assert run(*argv)[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tempsim", "ratio", "--r", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout == "apparent_time_ratio[1] = 3.162277660\n"
