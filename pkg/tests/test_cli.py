from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from qet.cli import EXIT_INPUT, EXIT_OK, EXIT_REFUTED, main

from .conftest import COINTOSS_ASSIGNMENT, PERTURBED_ASSIGNMENT, ROOT, RUS_ASSIGNMENT, check_golden


@pytest.fixture(autouse=True)
def _in_root(monkeypatch):
    # goldens mention program paths, so keep them relative
    monkeypatch.chdir(ROOT)


def run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.mark.parametrize(
    "golden, argv",
    [
        ("cli_check_cointoss.txt", ["check", "programs/cointoss.qps"]),
        ("cli_check_rus.txt", ["check", "programs/rus.qps"]),
        ("cli_run_cointoss.txt", ["run", "programs/cointoss.qps", "--steps", "12"]),
        ("cli_run_cointoss_plus.txt", ["run", "programs/cointoss.qps", "--steps", "10", "--preset", "ketplus"]),
        ("cli_run_rus.txt", ["run", "programs/rus.qps", "--steps", "8", "--format", "exact"]),
        ("cli_wp_cointoss.txt", ["wp", "programs/cointoss.qps", "--post", "Y_i", "--steps", "30", "--preset", "phi"]),
        ("cli_edl_rus.txt", ["edl", "programs/rus.qps", "--steps", "40"]),
        ("cli_infer_cointoss.txt", ["infer", "programs/cointoss.qps"]),
        ("cli_infer_rus.txt", ["infer", "programs/rus.qps"]),
    ],
)
def test_golden_output(golden, argv):
    code, text = run(*argv)
    assert code == EXIT_OK
    check_golden(golden, text)


def _assign(tmp_path, text, name="alpha.txt"):
    path = tmp_path / name
    path.write_text(text + "X := Y_i\n")
    return str(path)


def test_infer_check_not_refuted(tmp_path):
    code, text = run("infer", "programs/cointoss.qps", "--assign", _assign(tmp_path, COINTOSS_ASSIGNMENT), "--samples", "300")
    assert code == EXIT_OK
    assert text.splitlines()[-1] == "NotRefuted (300 samples)"


def test_infer_check_refuted(tmp_path):
    code, text = run("infer", "programs/cointoss.qps", "--assign", _assign(tmp_path, PERTURBED_ASSIGNMENT), "--samples", "300")
    assert code == EXIT_REFUTED
    check_golden("cli_infer_refuted.txt", text)


def test_infer_post_flag_overrides(tmp_path):
    path = tmp_path / "a.txt"
    path.write_text(RUS_ASSIGNMENT)
    code, text = run("infer", "programs/rus.qps", "--assign", str(path), "--post", "Y_i", "--samples", "100")
    assert code == EXIT_OK and "NotRefuted" in text


def test_export_files(tmp_path):
    check = tmp_path / "check.smt2"
    code, text = run(
        "infer", "programs/cointoss.qps", "--mode", "export-check",
        "--assign", _assign(tmp_path, COINTOSS_ASSIGNMENT), "--out", str(check),
    )
    assert code == EXIT_OK and text == f"wrote {check}\n"
    assert check.read_text().rstrip().endswith("(check-sat)")
    synth = tmp_path / "synth.smt2"
    code, _ = run("infer", "programs/cointoss.qps", "--mode", "export-synth", "--post", "Y_i", "--degree", "1", "--out", str(synth))
    assert code == EXIT_OK and "(get-model)" in synth.read_text()


def test_run_with_json_state(tmp_path):
    state = tmp_path / "s.json"
    state.write_text(json.dumps({"store": {"x": 0, "i": 5}, "rho": [["0", "0"], ["0", "1"]]}))
    code, text = run("run", "programs/cointoss.qps", "--steps", "3", "--state", str(state), "--format", "exact")
    assert code == EXIT_OK
    assert "final distribution: 1 configuration(s), mass 1" in text


@pytest.mark.parametrize(
    "argv, message",
    [
        (["check", "missing.qps"], "cannot read"),
        (["run", "programs/cointoss.qps", "--preset", "ket7"], "preset"),
        (["wp", "programs/cointoss.qps", "--post", "Y_i +"], "post"),
        (["infer", "programs/cointoss.qps", "--mode", "export-check", "--post", "Y_i"], "--assign"),
        (["infer", "programs/cointoss.qps", "--mode", "export-check"], "post-expectation"),
        (["infer", "programs/cointoss.qps", "--mode", "export-synth", "--post", "Y_i^3", "--degree", "2"], "degree"),
        (["run", "programs/cointoss.qps", "--steps", "-1"], "steps"),
    ],
)
def test_input_errors(argv, message, capsys):
    code, _ = run(*argv)
    assert code == EXIT_INPUT
    assert message in capsys.readouterr().err


def test_syntax_error_location(tmp_path, capsys):
    bad = tmp_path / "bad.qps"
    bad.write_text("bool x;\nx := 3")
    assert run("check", str(bad))[0] == EXIT_INPUT
    assert capsys.readouterr().err == f"error: {bad}:2:6: type error: expression has type nat, expected bool\n"


def test_usage_error_exit_code():
    assert run("frobnicate")[0] == EXIT_INPUT
    assert run()[0] == EXIT_INPUT


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "qet", "check", "programs/cointoss.qps"],
        capture_output=True, text=True, cwd=ROOT,
    )
    assert out.returncode == 0 and out.stdout.startswith("ok: programs/cointoss.qps")
