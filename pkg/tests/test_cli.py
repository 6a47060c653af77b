from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from hasse_forge import cli
from hasse_forge.config import Caps, caps_from_env
from hasse_forge.errors import InvalidArgument

CRITERION_ONE = "4,648,2106,13,2187,54,3"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    payload = json.loads(out.out) if out.out.strip() else None
    return code, payload, out.err


def test_verify_fm(capsys):
    code, data, _ = run(capsys, "verify-fm", "--p", "17", "--n", "2", "--septuple", CRITERION_ONE)
    assert code == 0
    assert data["report"]["overall"] == "pass" and data["report"]["H"] == "6"
    assert data["schema"].startswith("hasse-forge")


def test_verify_fm_failure_exit(capsys):
    code, data, _ = run(capsys, "verify-fm", "--p", "17", "--n", "2",
                        "--septuple", "5,648,2106,13,2187,54,3")
    assert code == 1 and data["report"]["overall"] == "fail"


def test_local_solve_refutation(capsys):
    code, data, _ = run(capsys, "local-solve", "--curve", "mordell:17,2,3", "--place", "17")
    assert code == 1
    assert data["certificate"]["verdict"] == "unsolvable"


def test_local_solve_success(capsys):
    code, data, _ = run(capsys, "local-solve", "--curve", "fermat-raw:1,1,-2,3", "--place", "7")
    assert code == 0 and data["certificate"]["verdict"] == "solvable"


def test_gen_mordell_and_check_cert(capsys, tmp_path):
    out = tmp_path / "cert.json"
    code, _, _ = run(capsys, "gen-mordell", "--p", "17", "--n", "2", "--out", str(out))
    assert code == 0
    data = json.loads(out.read_text())
    assert data["recipe"]["kappa_star"] == "1473823033760340245449934959273636595559937891849969"
    code, result, _ = run(capsys, "check-cert", str(out))
    assert code == 0 and result["result"]["ok"]

    data["certificate"]["brauer_samples"][0]["invariant"] = "0"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, result, _ = run(capsys, "check-cert", str(bad))
    assert code == 1 and not result["result"]["ok"]


def test_output_is_byte_identical(capsys, tmp_path):
    texts = []
    for i in range(2):
        out = tmp_path / f"run{i}.json"
        assert cli.main(["gen-mordell", "--p", "17", "--n", "2", "--no-certify",
                         "--out", str(out)]) == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_budget_exit_code(capsys):
    code, data, err = run(capsys, "dcc", "--family", "mordell")
    assert code == 2
    assert data["error"] == "SearchBudgetError"
    assert "expected_seconds" not in data["estimate"] and int(data["estimate"]["bits"]) > 30_000
    assert "budget" in err


def test_fixed_divisor_exit_code(capsys):
    code, data, _ = run(capsys, "gen-family-two", "--p", "17", "--schinzel")
    assert code == 1 and data["error"] == "NoPrimePossible"


def test_family_two_default(capsys):
    code, data, _ = run(capsys, "gen-family-two", "--p", "17")
    assert code == 0
    assert data["recipe"]["septuple"] == ["4", "-699678", "-215262", "13", "-2172605760", "6", "3"]


def test_generic_dcc(capsys):
    code, data, _ = run(capsys, "dcc", "--family", "generic", "--poly", "x**2-1",
                        "--n", "2", "--m", "2")
    assert code == 0
    assert data["sequence"]["genera"] == ["1", "3", "7"]
    assert data["report"]["verdict"].startswith("does not satisfy")


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["local-solve", "--curve", "mordell:17,2", "--place", "17"],
    ["local-solve", "--curve", "elliptic:1,2,3", "--place", "17"],
    ["verify-fm", "--p", "17", "--n", "2", "--septuple", CRITERION_ONE, "--cap", "bogus=3"],
    ["verify-fm", "--p", "17", "--n", "2", "--septuple", CRITERION_ONE, "--cap", "depth"],
    ["verify-fm", "--p", "13", "--n", "2", "--septuple", CRITERION_ONE],
    ["gen-mordell", "--p", "17", "--n", "2", "--jobs", "0"],
    ["dcc", "--family", "generic"],
    ["check-cert", "/nonexistent/cert.json"],
])
def test_usage_errors(capsys, argv):
    assert cli.main(argv) == 3


def test_parse_curve_shapes():
    assert cli.parse_curve("mordell:17,2,3").kappa == 3
    assert cli.parse_curve("mordell-raw:17,1,27,1").E == 27
    assert cli.parse_curve("fermat:17,1,5,7").m == 12
    assert cli.parse_curve("fermat-raw:1,1,-2,3").cz == -2


def test_caps_from_env():
    caps = caps_from_env({"HASSE_FORGE_CAP_SCHINZEL_SCAN": "10",
                          "HASSE_FORGE_CAP_PRIME_SCAN_SECONDS": "2.5"}, max_n=3)
    assert caps == Caps(schinzel_scan=10, prime_scan_seconds=2.5, max_n=3)
    with pytest.raises(InvalidArgument):
        caps_from_env({"HASSE_FORGE_CAP_DEPTH": "x"})
    with pytest.raises(InvalidArgument):
        Caps(max_n=0)


def test_env_cap_reaches_cli(capsys, monkeypatch):
    monkeypatch.setenv("HASSE_FORGE_CAP_MAX_N", "1")
    code, _, _ = run(capsys, "gen-mordell", "--p", "17", "--n", "2", "--no-certify")
    assert code == 3


@pytest.mark.skipif(shutil.which("hasse-forge") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["hasse-forge", "verify-fm", "--p", "17", "--n", "2",
                           "--septuple", CRITERION_ONE], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["overall"] == "pass"
