import json
import os
import signal
import subprocess
import sys
import time

import pytest

from cabf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", "6e", "--arity", "3")
    assert code == 0
    assert "anf: x0x1x2 + x0x1 + x0 + x1" in out.splitlines()
    assert out.splitlines()[-1] == "6e,3,1,0,0,0,0"


def test_analyze_five_variables_reports_class(capsys):
    code, out, _ = run(capsys, "analyze", "288d1b41", "--arity", "5")
    assert code == 0 and "class: 288d1b41" in out


def test_analyze_binary_input(capsys):
    code, out, _ = run(capsys, "analyze", "0b01101110", "--arity", "3")
    assert code == 0 and "table: 6e" in out


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "0000ffff")
    assert (code, out.strip()) == (0, "aa55aa55")


def test_extend_compare(capsys):
    code, out, _ = run(capsys, "extend", "f0f0f0f0", "--compare")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "ffff0000" * 16  # x4, the centre input
    assert "class: aa55aa55" in lines
    header = next(line for line in lines if line.startswith("preserved_for,"))
    values = lines[lines.index(header) + 1].split(",")
    assert values[0] == "f0f0f0f0"
    flags = dict(zip(header.split(",")[1:], values[1:]))
    assert flags["balanced"] == "1" and flags["ci1"] == "0" and flags["degree_ge"] == "1"


def test_evolve(capsys):
    code, out, _ = run(capsys, "evolve", "e0", "--arity", "3", "--initial", ".####..", "--steps", "2")
    assert (code, out.splitlines()) == (0, [".####..", "..###..", "...##.."])


def test_evolve_truncating_needs_width(capsys):
    code, out, _ = run(capsys, "evolve", "ffffffff", "--arity", "5", "--initial", "#########",
                       "--steps", "3", "--boundary", "truncating")
    assert code == 3


def test_class_sweep_and_report(capsys, tmp_path):
    out_file = tmp_path / "c.json"
    code, out, _ = run(capsys, "class-sweep", "aa55aa55", "--output", str(out_file), "--format", "latex",
                       "--tables", "preservation")
    assert code == 0
    assert out.strip() == "aa55aa55 & 0 & 0 & 54 & 84.375 & 62 & 96.875 & 0 & 0 & 64 & 100 & 0 & 0 \\\\"
    code, out, _ = run(capsys, "report", str(out_file), "--tables", "properties")
    assert code == 0 and "aa55aa55,1,YES,0,0,54,84.375,62,96.875" in out


def test_sweep_range(capsys, tmp_path):
    ck = tmp_path / "ck.json"
    code, out, err = run(capsys, "sweep", "--range", "0:4096", "--chunk-size", "1024",
                         "--checkpoint", str(ck), "--tables", "properties")
    assert code == 0
    assert out.startswith("# range: [0, 4096)")
    assert "progress: 4096/4096" in err
    code, out2, _ = run(capsys, "report", str(ck), "--tables", "properties")
    assert code == 0 and out2.splitlines()[-1] == out.splitlines()[-1]


def test_sweep_sample(capsys):
    code, out, _ = run(capsys, "sweep", "--sample", "2000", "--seed", "5", "--format", "text")
    assert code == 0 and "sampled: 2000 rules, seed 5" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "6g", "--arity", "3"],
        ["analyze", "6e6", "--arity", "3"],
        ["classify", "6e"],
        ["class-sweep", "deadbeef"],
        ["class-sweep", "aa55ab55", "--limit", "10"],
        ["sweep", "--range", "10:5"],
        ["evolve", "6e", "--arity", "3", "--initial", "..x.."],
    ],
)
def test_data_errors_exit_3(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 3 and err.startswith("error:")


def test_report_bad_file(capsys, tmp_path):
    bad = tmp_path / "x.json"
    bad.write_text("[]")
    assert run(capsys, "report", str(bad))[0] == 3
    assert run(capsys, "report", str(tmp_path / "missing.json"))[0] == 3


@pytest.mark.parametrize("argv", [[], ["analyze", "6e"], ["sweep"], ["sweep", "--range", "1-2"],
                                  ["analyze", "6e", "--arity", "3", "--format", "x"]])
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def _cli(*args):
    return [sys.executable, "-m", "cabf.cli", *args]


def _wait_for_checkpoint(path, proc, timeout=60):
    deadline = time.time() + timeout
    while time.time() < deadline:
        if path.exists() and json.loads(path.read_text())["next_rule_index"] > 0:
            return
        time.sleep(0.05)
    proc.kill()
    pytest.fail("sweep never wrote a checkpoint")


@pytest.mark.slow
@pytest.mark.parametrize("sig", [signal.SIGKILL, signal.SIGTERM])
def test_killed_sweep_resumes_to_the_one_shot_result(tmp_path, sig):
    rng_arg = "0x51000000:0x51100000"
    ck = tmp_path / "ck.json"
    proc = subprocess.Popen(_cli("sweep", "--range", rng_arg, "--chunk-size", "16384",
                                 "--checkpoint", str(ck), "--workers", "2"),
                            stdout=subprocess.DEVNULL, stderr=subprocess.PIPE, text=True)
    _wait_for_checkpoint(ck, proc)
    os.kill(proc.pid, sig)
    _, err = proc.communicate(timeout=60)
    if sig == signal.SIGTERM:
        assert proc.returncode in (130, 0), err
    else:
        assert proc.returncode == -signal.SIGKILL
    resumed = subprocess.run(_cli("sweep", "--range", rng_arg, "--chunk-size", "16384",
                                  "--checkpoint", str(ck), "--output", str(tmp_path / "a.json")),
                             capture_output=True, text=True, check=True)
    one_shot = subprocess.run(_cli("sweep", "--range", rng_arg, "--output", str(tmp_path / "b.json")),
                              capture_output=True, text=True, check=True)
    a = json.loads((tmp_path / "a.json").read_text())["counters"]
    b = json.loads((tmp_path / "b.json").read_text())["counters"]
    assert a == b
    assert resumed.stdout.splitlines()[1:] == one_shot.stdout.splitlines()[1:]
