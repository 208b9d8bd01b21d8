import json
import math
import os

import numpy as np
import pytest

from zetapair import cli
from zetapair.export import read_csv


@pytest.fixture(scope="module")
def zfile(tmp_path_factory):
    path = tmp_path_factory.mktemp("z") / "z300.txt"
    assert cli.main(["zeros-compute", "--from", "0", "--to", "300", "--out", str(path)]) == 0
    return str(path)


def data_lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_zeros_compute_stdout(capsys):
    assert cli.main(["zeros-compute", "--from", "0", "--to", "30"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln and not ln.startswith("#")]
    assert len(lines) == 3
    assert abs(float(lines[0].split()[-1]) - 14.134725141734693) < 1e-9


def test_zeros_verify(tmp_path, capsys):
    path = tmp_path / "z.txt"
    assert cli.main(["zeros-compute", "--from", "0", "--to", "100", "--out", str(path)]) == 0
    capsys.readouterr()
    assert cli.main(["zeros-verify", "--in", str(path), "--T", "100"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["verified_count"] == 29 and out["listed"] == 29


def test_zeros_verify_rejects_missing_zero(tmp_path, capsys):
    path = tmp_path / "z.txt"
    cli.main(["zeros-compute", "--from", "0", "--to", "60", "--out", str(path)])
    lines = path.read_text().splitlines()
    body = [i for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    del lines[body[3]]
    path.write_text("\n".join(lines) + "\n")
    capsys.readouterr()
    code = cli.main(["zeros-verify", "--in", str(path), "--T", "60"])
    err = json.loads(capsys.readouterr().err)
    assert code == 2 and err["error"] == "IncompleteListError"


def test_unsorted_file_is_parse_error(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("21.022039638771556\n14.134725141734693\n")
    code = cli.main(["histogram", "--zeros", str(path)])
    err = json.loads(capsys.readouterr().err)
    assert code == 4 and err["error"] == "ParseError"


def test_histogram(zfile, capsys):
    assert cli.main(["histogram", "--zeros", zfile, "--bin", "0.1", "--range", "0:30"]) == 0
    rows = data_lines(capsys.readouterr().out)
    assert rows[0].split(",")[:4] == ["left", "right", "center", "count"]
    assert len(rows) == 301


def test_predict_gue_at_zero(capsys):
    assert cli.main(["predict", "--kernel", "K", "--T", "1000", "--u", "0", "--table-limit", "10000"]) == 0
    rows = data_lines(capsys.readouterr().out)
    want = -(math.log(1e3 / (2 * math.pi)) / (2 * math.pi)) ** 2
    assert rows[0] == "u,K"
    assert abs(float(rows[1].split(",")[1]) - want) < 1e-10


def test_predict_needs_one_u(capsys):
    assert cli.main(["predict", "--T", "1000"]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "InvalidArgumentError"


def test_bad_grid(zfile, capsys):
    assert cli.main(["paircorr", "--zeros", zfile, "--alpha", "0.5:0.1:0.1"]) == 2
    capsys.readouterr()


def test_compare_rows(zfile, capsys):
    assert cli.main(["compare", "--zeros", zfile, "--alpha-grid", "0:0.5:0.1"]) == 0
    rows = data_lines(capsys.readouterr().out)
    assert len(rows) == 7
    alphas = [float(r.split(",")[0]) for r in rows[1:]]
    assert alphas == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]


@pytest.mark.parametrize("cmd", [
    ["paircorr", "--alpha", "0:0.4:0.2"],
    ["histogram", "--range", "0:10"],
    ["montgomery"],
])
def test_threads_do_not_change_bytes(zfile, tmp_path, cmd):
    outs = []
    for t in (1, 3):
        path = tmp_path / f"t{t}.csv"
        assert cli.main([*cmd, "--zeros", zfile, "--threads", str(t), "--out", str(path)]) == 0
        outs.append(path.read_bytes())
        assert os.path.exists(tmp_path / f"t{t}.json")
    assert outs[0] == outs[1]


def test_rerun_reproduces(zfile, tmp_path):
    first = tmp_path / "a.csv"
    again = tmp_path / "b.csv"
    assert cli.main(["paircorr", "--zeros", zfile, "--alpha", "0.1,0.3", "--out", str(first)]) == 0
    assert cli.main(["rerun", "--from", str(first), "--out", str(again), "--threads", "2"]) == 0
    assert first.read_bytes() == again.read_bytes()
    config, header, rows = read_csv(again)
    assert config.command == "paircorr" and len(rows) == 2 and header[0] == "alpha"


def test_rerun_rejects_foreign_file(tmp_path, capsys):
    path = tmp_path / "x.csv"
    path.write_text("a,b\n1,2\n")
    assert cli.main(["rerun", "--from", str(path)]) == 4
    capsys.readouterr()


def test_plot_needs_out(zfile, capsys):
    assert cli.main(["montgomery", "--zeros", zfile, "--plot"]) == 2
    capsys.readouterr()


def test_plot_written(zfile, tmp_path):
    path = tmp_path / "h.csv"
    assert cli.main(["histogram", "--zeros", zfile, "--range", "0:10", "--overlay", "--plot",
                     "--out", str(path)]) == 0
    png = tmp_path / "h.png"
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    _, header, rows = read_csv(path)
    assert header[-1] == "predicted" and len(rows) == 100


def test_report(zfile, tmp_path, capsys):
    out = tmp_path / "rep"
    code = cli.main(["report", "--zeros", zfile, "--out-dir", str(out), "--range", "0:10",
                     "--alpha-grid", "0:0.2:0.1", "--skip-dense-montgomery"])
    assert code == 0
    listing = json.loads(capsys.readouterr().out)["files"]
    for pair in listing.values():
        for name in pair:
            assert (out / name).stat().st_size > 0
    meta = json.loads((out / "report.json").read_text())
    assert meta["zeros"] == 138 and set(meta["files"]) == {"histogram", "profile", "compare", "montgomery"}
    _, _, rows = read_csv(out / "montgomery.csv")
    assert len(rows) == 4 and np.isfinite([float(r[1]) for r in rows]).all()


def test_verify_suite(capsys, tmp_path):
    path = tmp_path / "v.csv"
    assert cli.main(["verify", "--suite", "digamma,diagonal", "--table-limit", "10000", "--out", str(path)]) == 0
    _, header, rows = read_csv(path)
    assert header[-1] == "passed" and all(r[-1] == "true" for r in rows) and len(rows) == 4
    assert cli.main(["verify", "--suite", "nonsense"]) == 2
    capsys.readouterr()
