import json
import subprocess
import sys

import pytest

from kloosterman import cache
from kloosterman.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_power_sums_text(capsys):
    code, out, _ = run(capsys, "power-sums", "--p", "3", "--n", "2", "--rmax", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1].split() == ["1", "5", "-7", "6", "-1"]
    assert lines[2].split() == ["2", "71", "-73", "72", "-1"]


def test_power_sums_rank_one_exterior_is_zero(capsys):
    code, out, _ = run(capsys, "power-sums", "--p", "3", "--n", "1", "--rmax", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["schema_version"] == 1
    assert [row["exterior"] for row in doc["rows"]] == [0, 0, 0]


def test_power_sums_csv(capsys):
    code, out, _ = run(capsys, "power-sums", "--p", "2", "--n", "3", "--rmax", "2", "--format", "csv")
    assert out.splitlines()[0] == "r,tensor,frob2,exterior,symmetric"
    # tensor -1-2-4+8, frob2 (2^4-1)/3, exterior -2
    assert out.splitlines()[1] == "1,1,5,-2,3"


def test_invalid_prime(capsys):
    code, _, err = run(capsys, "power-sums", "--p", "4", "--n", "2")
    assert code == 2
    assert json.loads(err)["error"] == "p not prime"


def test_bound_error(capsys):
    code, _, err = run(capsys, "power-sums", "--p", "5", "--n", "2", "--chars", "1,2", "--rmax", "3", "--max-enum", "1000")
    assert code == 2 and json.loads(err)["kind"] == "bound"


def test_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["power-sums", "--n", "2"])
    assert exc.value.code == 2


def test_jobs_do_not_change_output(capsys):
    args = ["power-sums", "--p", "3", "--n", "3", "--rmax", "4", "--format", "json"]
    _, one, _ = run(capsys, *args)
    _, two, _ = run(capsys, *args, "--jobs", "2")
    assert one == two


def test_json_schema_round_trip(capsys):
    from kloosterman.cyclotomic import CycInt

    _, out, _ = run(capsys, "power-sums", "--p", "5", "--n", "2", "--chars", "1,2", "--rmax", "1", "--format", "json")
    row = json.loads(out)["rows"][0]
    t, f = CycInt.from_json(row["tensor"]), CycInt.from_json(row["frob2"])
    assert CycInt.from_json(row["symmetric"]) * 2 == t + f


def test_lfunction_verify_and_discover(capsys):
    code, out, _ = run(capsys, "lfunction", "--p", "3", "--n", "4", "--verify", "--format", "json")
    assert code == 0 and json.loads(out)["verified"]
    code, out, _ = run(capsys, "lfunction", "--p", "3", "--n", "3", "--discover", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["L"]["factors"] == [[3, 1]] and doc["swan"] == 1
    code, out, _ = run(capsys, "lfunction", "--p", "2", "--n", "2", "--kind", "kl", "--verify", "--rmax", "6")
    assert code == 0


def test_swan(capsys):
    code, out, _ = run(capsys, "swan", "--p", "5", "--n", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["swan"] == doc["predicted"] == 1


def test_gauss(capsys):
    code, out, _ = run(capsys, "gauss", "--p", "3", "--rmax", "2", "--format", "json")
    rows = json.loads(out)["rows"]
    assert code == 0
    assert [(r["c0"], r["c_plus"], r["c_minus"]) for r in rows] == [(2, 2, 4), (8, 32, 40)]
    assert all(r["agree"] == r["characters"] for r in rows)


def test_conductor(capsys):
    code, out, _ = run(capsys, "conductor", "--n", "2", "--q", "3", "--format", "json")
    rep = json.loads(out)["report"]
    assert code == 0 and rep["artin_ad"] == 12 and rep["gamma_log_q"] == 6 and rep["source"] == "computed"
    code, out, _ = run(capsys, "conductor", "--n", "3", "--q", "3", "--skip-compute")
    assert code == 0 and "(predicted)" in out and "24" in out


def test_verify_suite_small_grid(capsys):
    code, out, _ = run(capsys, "verify-suite", "--grid", "3:2,2:3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] == doc["total"] and doc["first_counterexample"] is None


def test_verify_suite_sign_injection_fails_at_frob2(capsys):
    code, out, _ = run(capsys, "verify-suite", "--grid", "3:2", "--inject-sign-bug", "--stop-first", "--format", "json")
    doc = json.loads(out)
    assert code == 1
    assert doc["first_counterexample"]["check"] == "frob2"


def test_cache_commands(tmp_path, capsys):
    try:
        code, out, _ = run(capsys, "power-sums", "--p", "3", "--n", "2", "--rmax", "1", "--cache-dir", str(tmp_path))
        code, out, _ = run(capsys, "cache", "info", "--cache-dir", str(tmp_path), "--format", "json")
        assert code == 0 and json.loads(out)["cache_dir"] == str(tmp_path)
        code, out, _ = run(capsys, "cache", "clear", "--cache-dir", str(tmp_path), "--format", "json")
        assert code == 0
        assert not list(tmp_path.glob("field_*.txt"))
    finally:
        cache.set_cache_dir(None)


def test_cache_does_not_change_output(tmp_path):
    argv = [sys.executable, "-m", "kloosterman.cli", "power-sums", "--p", "3", "--f", "2", "--n", "3", "--rmax", "2", "--format", "json"]
    plain = subprocess.run(argv, capture_output=True, text=True, check=True).stdout
    cold = subprocess.run(argv + ["--cache-dir", str(tmp_path)], capture_output=True, text=True, check=True).stdout
    assert list(tmp_path.glob("field_*.txt"))
    warm = subprocess.run(argv + ["--cache-dir", str(tmp_path)], capture_output=True, text=True, check=True).stdout
    assert plain == cold == warm
