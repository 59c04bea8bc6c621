import csv
import io
import json
import subprocess
import sys

import pytest

from quadromer import cli, suites
from quadromer.cli import RunConfig, main, parse_config_text
from quadromer.errors import ParameterError
from quadromer.suites import CheckResult


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_count_p2(capsys):
    code, out, _ = run(["count", "--region", "pn", "--n", "2"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert (row["value_numerator"], row["value_denominator"]) == ("625", "1")


def test_count_both_methods(capsys):
    code, out, _ = run(["count", "--region", "quadromers", "--n", "2", "--R1", "1", "--v1", "0", "--R2", "1", "--v2", "0",
                      "--method", "both", "--memo"], capsys)
    assert code == 0
    got = {r["method"]: (r["value_numerator"], r["value_denominator"]) for r in rows(out)}
    assert got == {"lgv": ("1", "4"), "tiler": ("1", "4")}


def test_omega_row(capsys):
    code, out, _ = run(["omega", "--r", "10", "--u", "1", "--R-grid", "50,100,200"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert row["method"] == "extrapolated" and (row["r"], row["u"]) == ("10", "1")
    assert abs(float(row["float_value"]) - 7.467e-4) < 1e-6
    assert 0 < float(row["error_estimate"]) < 1e-4


def test_isotropy_json(capsys):
    code, out, _ = run(["--format", "json", "isotropy", "--pairs", "2:4,7:1"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "isotropy"
    recs = doc["records"]
    assert {(r["r"], r["u"]) for r in recs} == {(2, 4), (7, 1)}
    assert recs[0]["group_max_deviation"] == recs[1]["group_max_deviation"]
    assert float(recs[0]["group_max_deviation"]) > 0


def test_omega_b_grid_sorted(capsys):
    code, out, _ = run(["omega-b", "--R1", "2,1", "--v1", "0", "--R2", "1", "--v2", "0", "--method", "quadruple_sum"], capsys)
    assert code == 0
    got = rows(out)
    assert [r["R1"] for r in got] == ["1", "2"]
    assert got[0]["value_numerator"] == "1" and got[0]["value_denominator"] == "4096"


def test_dump_region_json(capsys):
    code, out, _ = run(["dump-region", "--region", "pn", "--n", "1", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert len(doc["records"]) == 18 and len(doc["region"]["cells"]) == 18
    assert len(doc["region"]["half_weight_positions"]) == 1


def test_header_row_is_documented(capsys):
    for argv in (["count", "--region", "pn", "--n", "1"], ["omega-b", "--R1", "1", "--v1", "0", "--R2", "1", "--v2", "0"],
                 ["dump-region", "--region", "pn", "--n", "1"]):
        _, out, _ = run(argv, capsys)
        header = out.splitlines()[0].split(",")
        for col in header:
            assert col in cli.COLUMN_HELP


def test_help_lists_columns_and_exit_codes():
    text = cli.build_parser().format_help()
    for col in ("value_numerator", "error_estimate", "group_max_deviation", "half_weight_with", "radius2"):
        assert col in text
    assert "exit codes" in text


# --- exit codes -------------------------------------------------------------

def test_parameter_error_exit_2(capsys):
    code, _, err = run(["count", "--region", "quadromers", "--n", "1", "--R1", "9", "--v1", "0", "--R2", "1", "--v2", "0"], capsys)
    assert code == 2 and "error" in err


def test_missing_field_named(capsys):
    code, _, err = run(["omega", "--r", "3"], capsys)
    assert code == 2 and "u" in err


def test_budget_exit_4(capsys):
    code, _, _ = run(["count", "--region", "pn", "--n", "3", "--method", "tiler"], capsys)
    assert code == 4


def test_failed_check_exit_3(capsys, monkeypatch):
    monkeypatch.setitem(suites.SUITES, "eq212", lambda: [CheckResult("broken", False, "forced")])
    code, out, err = run(["verify", "--suites", "eq212"], capsys)
    assert code == 3 and "1 check(s) failed" in err
    assert rows(out)[0]["passed"] == "False"


def test_passing_suite_exit_0(capsys):
    code, out, _ = run(["verify", "--suites", "darboux-slope"], capsys)
    assert code == 0 and len(rows(out)) == 9


def test_unknown_suite():
    with pytest.raises(SystemExit) as info:
        main(["verify", "--suites", "nope"])
    assert info.value.code == 2


def test_unknown_command():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_low_dps_rejected(capsys):
    code, _, _ = run(["--dps", "10", "count", "--region", "pn", "--n", "1"], capsys)
    assert code == 2


# --- config, output, determinism ---------------------------------------------

def test_run_config_round_trip():
    cfg = RunConfig("omega", {"r": "10", "u": "1,2"}, "out.csv", "json", 50, (50, 100, 200))
    back = RunConfig.from_text(cfg.to_text())
    assert back == cfg
    assert back.to_text() == cfg.to_text()


def test_config_parser():
    assert parse_config_text("# c\n a-b = 1 # tail\n\nc=x\n") == {"a_b": "1", "c": "x"}
    with pytest.raises(ParameterError):
        parse_config_text("novalue\n")
    with pytest.raises(ParameterError):
        RunConfig.from_text("format = csv\n")


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("region = pn\nn = 1\nformat = json\n")
    code, out, _ = run(["--config", str(cfg), "count"], capsys)
    assert code == 0 and json.loads(out)["records"][0]["value_numerator"] == 9
    code, out, _ = run(["--config", str(cfg), "count", "--n", "2", "--format", "csv"], capsys)
    assert rows(out)[0]["value_numerator"] == "625"


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(["count", "--region", "pn", "--n", "1", "-o", "sub/c.csv"], capsys)
    assert code == 0 and out == ""
    assert rows((tmp_path / "sub" / "c.csv").read_text())[0]["value_numerator"] == "9"


@pytest.mark.parametrize("argv", [
    ["omega-b", "--R1", "1,2,3", "--v1", "0,1", "--R2", "1,2", "--v2", "0", "--workers", "2"],
    ["--format", "json", "count", "--region", "bumps", "--n", "3", "--k1", "0", "--k2", "1", "--l1", "0", "--l2", "1"],
    ["omega", "--r", "4", "--u", "1,2", "--R-grid", "20,40"],
])
def test_byte_identical_outputs(tmp_path, argv, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(argv + ["-o", str(a)]) == 0
    assert main(argv + ["-o", str(b), "--workers", "1"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "quadromer", "count", "--region", "pn", "--n", "1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and ",9,2," in res.stdout
