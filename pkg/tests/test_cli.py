import json
import subprocess
import sys

import pytest

from iqpoisson.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_relations_ai2(capsys):
    code, out, _ = run(capsys, "--diagram", "AI2", "--command", "verify-relations")
    assert code == 0
    assert "FAIL" not in out


def test_corrupt_formula_is_caught(capsys):
    code, out, _ = run(capsys, "--diagram", "AI2", "--command", "verify-relations", "--corrupt-formula")
    assert code == 1
    assert "FAIL" in out


def test_json_output_is_deterministic(capsys):
    argv = ("--diagram", "AI2", "--command", "poisson-table", "--format", "json")
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2
    json.loads(out1)


def test_golden_ai2_passes(capsys):
    code, _, _ = run(capsys, "--diagram", "AI2", "--command", "poisson-table", "--golden")
    assert code == 0


def test_golden_ci2_reports_differences(capsys):
    code, out, _ = run(capsys, "--diagram", "CI2", "--command", "poisson-table", "--golden")
    assert code == 1
    assert "FAIL" in out


def test_fii_needs_expensive(capsys):
    code, _, err = run(capsys, "--diagram", "FII", "--command", "integrality")
    assert code == 2
    assert "--expensive" in err


def test_rank_one_braid_check_skips(capsys):
    code, out, _ = run(capsys, "--diagram", "AI1", "--command", "braid-check")
    assert code == 0
    assert "skip" in out.lower()


def test_unknown_diagram(capsys):
    code, _, err = run(capsys, "--diagram", "XYZ9", "--command", "integrality")
    assert code == 2
    assert err.startswith("error:")


def test_bad_height(capsys):
    code, _, _ = run(capsys, "--diagram", "AI2", "--command", "root-vectors", "--height", "0")
    assert code == 2


def test_missing_command_is_usage_error(capsys):
    assert main(["--diagram", "AI2"]) == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "ai2.yaml"
    cfg.write_text("type: A2\nname: mine\n")
    code, out, _ = run(capsys, "--diagram", str(cfg), "--command", "root-vectors")
    assert code == 0
    assert out


def test_config_file_with_bad_key(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("type: A2\ncolour: red\n")
    code, _, err = run(capsys, "--diagram", str(cfg), "--command", "root-vectors")
    assert code == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "--diagram", "AIII3", "--command", "integrality", "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text()


@pytest.mark.parametrize("command", ["root-vectors", "braid-check", "pbw-expand"])
def test_aiii3_commands(capsys, command):
    code, _, _ = run(capsys, "--diagram", "AIII3", "--command", command)
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "iqpoisson", "--diagram", "AI1", "--command", "integrality"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
