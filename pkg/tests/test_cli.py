import csv
import io
import subprocess
import sys

import pytest

from cvrepeater import repeater_success
from cvrepeater.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def trailer(text):
    return [line for line in text.splitlines() if line.startswith("#")]


def test_link_row(capsys):
    code, out, _ = run(["link", "--eta", "0.01", "--chi", "0.7"], capsys)
    assert code == 0
    (row,) = table(out)
    assert list(row) == ["eta", "chi", "N", "g", "eta_eff", "P", "V", "delta", "eb_bound", "preserved"]
    assert float(row["P"]) == pytest.approx(0.0552522, rel=1e-5)
    assert float(row["V"]) == pytest.approx(1.12634, rel=1e-5)
    assert row["preserved"] == "true" and row["N"] == "1"
    assert row["P"] == "5.52521875495e-02"


def test_lossless_link_with_explicit_gain(capsys):
    code, out, _ = run(["link", "--eta", "1", "--chi", "0.5", "--gain", "2"], capsys)
    (row,) = table(out)
    assert float(row["eta_eff"]) == pytest.approx(1.0)
    assert float(row["delta"]) >= 0


def test_numeric_link_row(capsys):
    code, out, _ = run(["link", "--eta", "0.1", "--chi", "0.5", "--numeric", "--grid-points", "32"], capsys)
    (row,) = table(out)
    closed = table(run(["link", "--eta", "0.1", "--chi", "0.5"], capsys)[1])[0]
    assert float(row["P"]) == pytest.approx(float(closed["P"]), rel=1e-3)


def test_sweep_shape(capsys):
    code, out, _ = run(["sweep", "--chi", "0.1,0.7", "--n-eta", "40"], capsys)
    rows = table(out)
    assert code == 0 and len(rows) == 80
    assert {r["chi"] for r in rows} == {"1.00000000000e-01", "7.00000000000e-01"}
    for r in rows:
        assert float(r["eb_bound"]) == pytest.approx(2 * float(r["eta_eff"]))


def test_concat2_row(capsys):
    code, out, _ = run(["concat2", "--eta", "4e-4", "--samples", "20000", "--seed", "3"], capsys)
    (row,) = table(out)
    assert code == 0
    assert float(row["eta_eff"]) == pytest.approx(0.02)
    assert float(row["P_stderr"]) > 0 and float(row["V_stderr"]) > 0
    assert int(row["samples"]) == 20000


def test_scaling_table(capsys):
    code, out, _ = run(["scaling", "--eta", "0.04", "--chi", "0.9", "--scissors", "3", "--max-m", "64"], capsys)
    rows = table(out)
    first = next(r for r in rows if r["repeater_wins"] == "true")
    assert first["M"] == "8"
    P = (0.04 * 0.9**4) ** 1.5
    for r in rows:
        assert r["P_M"] == f"{repeater_success(P, int(r['M'])):.11e}"


def test_scaling_without_loss_never_wins(capsys):
    _, out, _ = run(["scaling", "--eta", "1", "--chi", "0.9", "--max-m", "1024"], capsys)
    assert all(r["repeater_wins"] == "false" for r in table(out))


def test_negativity_modes(capsys):
    _, out, _ = run(["negativity", "--mode", "limit", "--eta", "0.3333333333333333"], capsys)
    (row,) = table(out)
    assert float(row["E_N_bare_limit"]) == pytest.approx(1.0, abs=1e-12)
    _, out, _ = run(["negativity", "--mode", "link", "--chi", "0.01", "--n-eta", "20"], capsys)
    rows = table(out)
    assert any(r["outperforms"] == "true" for r in rows)
    _, out, _ = run(["negativity", "--mode", "link", "--chi", "0.01", "--eta", "1e-9"], capsys)
    (row,) = table(out)
    assert float(row["E_N_protocol"]) < 1e-3 and float(row["E_N_bare_limit"]) < 1e-8


def test_output_is_byte_identical(tmp_path, capsys):
    args = ["concat2", "--eta", "4e-4", "--samples", "10000", "--seed", "9"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(args[:-1] + ["10", "--out", str(b)]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_worker_pool_keeps_row_order(tmp_path):
    args = ["sweep", "--chi", "0.1,0.7", "--n-eta", "12"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--workers", "3", "--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_trailer_records_resolved_config(capsys):
    _, out, _ = run(["link", "--eta", "0.01", "--chi", "0.7"], capsys)
    lines = trailer(out)
    assert lines[0] == "# command=link"
    assert "# eta=0.01" in lines
    assert lines[-1].startswith("# config_sha256=") and len(lines[-1]) == len("# config_sha256=") + 64
    assert not out.splitlines()[0].startswith("#")


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# single link\neta = 0.01\nchi = 0.1   # weak source\nscissors=1\n")
    _, out, _ = run(["link", "--config", str(cfg)], capsys)
    assert float(table(out)[0]["chi"]) == pytest.approx(0.1)
    _, out, _ = run(["link", "--config", str(cfg), "--chi", "0.7"], capsys)
    assert float(table(out)[0]["chi"]) == pytest.approx(0.7)


@pytest.mark.parametrize(
    "argv",
    [
        ["link", "--eta", "2", "--chi", "0.5"],
        ["link", "--eta", "0.5", "--chi", "1.0"],
        ["link", "--chi", "0.5"],
        ["link", "--eta", "abc", "--chi", "0.5"],
        ["scaling", "--eta", "0.04", "--chi", "0.9", "--max-m", "0"],
        ["concat2", "--eta", "0.1", "--gain", "1,2"],
        ["negativity", "--mode", "limit", "--eta", "1"],
        ["link", "--eta", "0.1", "--chi", "0.5", "--config", "/nonexistent.cfg"],
    ],
)
def test_parameter_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("cvrepeater: ") and out == ""


def test_malformed_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("eta 0.1\n")
    code, _, err = run(["link", "--config", str(cfg)], capsys)
    assert code == 2 and "expected key=value" in err


def test_budget_failure_exits_3(capsys):
    code, out, err = run(
        ["concat2", "--eta", "4e-4", "--samples", "20000", "--target-error", "1e-6"], capsys
    )
    assert code == 3
    assert "achieved" in err and out == ""


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "cvrepeater", "scaling", "--eta", "0.04", "--chi", "0.9", "--max-m", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("M,P_M,bare,repeater_wins")
