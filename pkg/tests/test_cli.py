import json

import pytest

from pvextract.cli import main
from pvextract.data import benchmark_path


def test_info(capsys):
    assert main(["info"]) == 0
    out = capsys.readouterr().out
    assert "np=50 cr=0.6 f=0.9 g=800" in out and "g=1600" in out
    assert "rp=[0, 100]" in out and "rp=[0, 2000]" in out


def test_fit_writes_report(tmp_path, capsys):
    code = main(["fit", "--model", "sdm", "--data", str(benchmark_path("rtc_france")),
                 "--temp-c", "33", "--gens", "30", "--runs", "2", "--out", str(tmp_path)])
    assert code == 0
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["stats"]["n_runs"] == 2 and rep["meta"]["config"]["g"] == 30
    assert rep["meta"]["dataset"] == "rtc_france"


def test_fit_builtin_name_without_temperature(tmp_path):
    assert main(["fit", "--model", "ddm", "--data", "photowatt_pwp201", "--gens", "5",
                 "--out", str(tmp_path)]) == 0


def test_missing_data_flag(capsys):
    assert main(["fit", "--model", "sdm"]) == 2
    assert "--data" in capsys.readouterr().err


def test_unknown_flag(capsys):
    assert main(["fit", "--model", "sdm", "--data", "rtc_france", "--bogus", "1"]) == 2


def test_bad_numeric_flag(capsys):
    assert main(["fit", "--model", "sdm", "--data", "rtc_france", "--gens", "ten"]) == 2
    assert "--gens" in capsys.readouterr().err


def test_invalid_config_is_usage_error(capsys, tmp_path):
    assert main(["fit", "--model", "sdm", "--data", "rtc_france", "--cr", "1.5",
                 "--out", str(tmp_path)]) == 2


def test_missing_file_is_runtime_failure(capsys, tmp_path):
    assert main(["fit", "--model", "sdm", "--data", str(tmp_path / "none.csv"), "--temp-c", "25",
                 "--bounds", str(tmp_path / "b.csv")]) == 1
    assert "none.csv" in capsys.readouterr().err


def test_unknown_dataset_needs_bounds(tmp_path, capsys):
    f = tmp_path / "mine.csv"
    f.write_text("0.1,0.7\n0.2,0.6\n0.3,0.5\n")
    assert main(["fit", "--model", "sdm", "--data", str(f), "--temp-c", "25"]) == 2
    assert "--bounds" in capsys.readouterr().err
    assert main(["fit", "--model", "sdm", "--data", str(f)]) == 2


def test_bounds_file(tmp_path):
    b = tmp_path / "b.csv"
    b.write_text("name,lower,upper\niph,0.7,0.8\ni0,0,1\nn,1,2\nrs,0,0.1\nrp,10,100\n")
    code = main(["fit", "--model", "sdm", "--data", "rtc_france", "--bounds", str(b),
                 "--gens", "10", "--out", str(tmp_path / "o")])
    assert code == 0
    theta = json.loads((tmp_path / "o" / "report.json").read_text())["best"]["theta"]
    assert 0.7 <= theta[0] <= 0.8 and 10 <= theta[4] <= 100


def test_bad_bounds_file(tmp_path, capsys):
    b = tmp_path / "b.csv"
    b.write_text("iph,0.7,0.8\n")
    assert main(["fit", "--model", "sdm", "--data", "rtc_france", "--bounds", str(b)]) == 1
    assert "b.csv" in capsys.readouterr().err


def test_certify_box_cap(tmp_path, capsys):
    out = tmp_path / "c.json"
    code = main(["certify", "--model", "sdm", "--data", "rtc_france", "--max-boxes", "1",
                 "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["terminated_by"] == "box_cap" and rep["boxes_processed"] == 1
    assert 0 <= rep["rmse_lower"] <= rep["rmse_upper"]
    assert set(rep) >= {"rmse_lower", "rmse_upper", "gap", "boxes_processed", "terminated_by"}


def test_certify_ddm_small_budget(capsys):
    assert main(["certify", "--model", "ddm", "--data", "rtc_france", "--max-boxes", "500"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["terminated_by"] == "box_cap" and rep["rmse_lower"] == 0.0


def test_certify_bad_eps(capsys):
    assert main(["certify", "--model", "sdm", "--data", "rtc_france", "--eps-f", "0"]) == 2


def test_bench_unknown_case(capsys):
    assert main(["bench", "--cases", "sdm-mars"]) == 2
    assert "sdm-mars" in capsys.readouterr().err


def test_bench_single_case(tmp_path, capsys):
    out = tmp_path / "bench.json"
    assert main(["bench", "--cases", "sdm-pw", "--runs", "2", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert len(rep["cases"]) == 1 and rep["cases"][0]["expected_min"] == "2.4250E-3"
    assert "sdm-pw" in capsys.readouterr().out


def test_curve(capsys):
    theta = "0.760775,0.323021,1.481184,0.036377,53.71852"
    assert main(["curve", "--model", "sdm", "--data", "rtc_france", "--theta", theta]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "v,i_measured,i_calculated,abs_error" and len(lines) == 27


def test_curve_wrong_length(capsys):
    assert main(["curve", "--model", "ddm", "--data", "rtc_france", "--theta", "1,2,3"]) == 2
